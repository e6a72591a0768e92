"""Jaynes-Cummings evolution in the interaction picture.

``H_I = (detuning/2) sigma_z + lambda (sigma_+ a + sigma_- a^dag)`` with
``sigma_+ = |0><1|``. It couples only ``|0, k-1>`` and ``|1, k>``, so the
propagator is a direct sum of 2x2 rotations plus the uncoupled ``|1, 0>``.
Inside a Fock cutoff ``N`` the level ``|0, N-1>`` loses its partner
``|1, N>``; it is left uncoupled and any population there is reported.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import steering
from .hilbert import JointState, pure_state_concurrence, state_from_vector
from .steering import SweepGrid, SweepResult

log = logging.getLogger(__name__)

LEAK_TOL = 1e-10


@dataclass(frozen=True)
class JCModel:
    coupling_lambda: float
    n_cut: int
    detuning: float = 0.0

    def __post_init__(self):
        if not self.coupling_lambda > 0:
            raise ValueError("coupling_lambda must be positive")
        if self.n_cut < 2:
            raise ValueError("n_cut must be >= 2")
        if not math.isfinite(self.detuning):
            raise ValueError("detuning must be finite")


def jc_closed_form_state(n: int, lambda_t: float, n_cut: int) -> JointState:
    """``cos(sqrt(n) lt) |1,n> - i sin(sqrt(n) lt) |0,n-1>``."""
    if n < 1:
        raise ValueError("photon number must be >= 1")
    if n >= n_cut:
        raise ValueError(f"|{n}> lies outside the cutoff n_cut = {n_cut}")
    w = math.sqrt(n) * lambda_t
    psi = np.zeros(2 * n_cut, dtype=complex)
    psi[n_cut + n] = math.cos(w)
    psi[n - 1] = -1j * math.sin(w)
    return state_from_vector(psi, n_cut)


def propagator(model: JCModel, t: float) -> np.ndarray:
    """Interaction-picture ``exp(-i H_I t)`` on the truncated joint space."""
    nc = model.n_cut
    half = 0.5 * model.detuning
    u = np.zeros((2 * nc, 2 * nc), dtype=complex)
    # uncoupled levels: |1,0> and the truncation edge |0,nc-1>
    u[nc, nc] = np.exp(1j * half * t)
    u[nc - 1, nc - 1] = np.exp(-1j * half * t)
    for k in range(1, nc):
        g = model.coupling_lambda * math.sqrt(k)
        omega = math.hypot(half, g)
        c, s = math.cos(omega * t), math.sin(omega * t)
        # block basis (|0,k-1>, |1,k>), H = [[half, g], [g, -half]]
        sinc = s / omega if omega > 0 else t
        i0, i1 = k - 1, nc + k
        u[i0, i0] = c - 1j * half * sinc
        u[i1, i1] = c + 1j * half * sinc
        u[i0, i1] = u[i1, i0] = -1j * g * sinc
    return u


def jc_propagate(model: JCModel, initial: JointState, t: float) -> JointState:
    if initial.n_cut != model.n_cut:
        raise ValueError(f"state has n_cut = {initial.n_cut}, model expects {model.n_cut}")
    if not t >= 0:
        raise ValueError("t must be non-negative")
    u = propagator(model, t)
    rho = u @ initial.matrix @ u.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    edge = model.n_cut - 1
    leak = float(initial.matrix[edge, edge].real)
    notes = ()
    if leak > LEAK_TOL:
        msg = f"population {leak:.3g} on |0,{edge}> is held fixed at the Fock cutoff"
        log.warning(msg)
        notes = (msg,)
    return JointState(rho, model.n_cut, initial.purity, notes)


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    lambda_t: float
    state: JointState
    sweep: SweepResult
    concurrence: float

    @property
    def spread(self) -> float:
        return steering.steering_set_spread(self.sweep.points())

    def single_point(self, tol: float = 1e-8) -> bool:
        return self.spread < tol


def steering_trajectory(
    model: JCModel, n: int, times: Sequence[float], grid: SweepGrid
) -> list[TrajectoryPoint]:
    """Evolve ``|1, n>`` and sweep the steering set at each time."""
    if n < 1 or n >= model.n_cut:
        raise ValueError(f"need 1 <= n < n_cut, got n = {n}")
    psi = np.zeros(2 * model.n_cut, dtype=complex)
    psi[model.n_cut + n] = 1.0
    initial = state_from_vector(psi, model.n_cut)
    out = []
    for t in times:
        rho = jc_propagate(model, initial, float(t))
        f = steering.conditioned_operators(rho)
        out.append(
            TrajectoryPoint(
                float(t), model.coupling_lambda * float(t), rho, steering.sweep_arrays(f, grid), pure_state_concurrence(rho)
            )
        )
    return out
