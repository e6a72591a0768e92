"""Heterodyne steering of the qubit, plus the two-qubit steering ellipsoid.

Outcome ``beta`` of a heterodyne measurement projects the field on ``|beta>``
and leaves the qubit with Bloch components

    X_j = <beta|F_j|beta> / <beta|F_0|beta>,   F_v = Tr_S[rho (sigma_v (x) 1)].

The quadratic forms only involve ``<n|beta>`` for ``n`` inside the support of
the ``F_v``; those amplitudes are exact, so no Fock cutoff applies to ``beta``.
They are evaluated on the unit-normalized restriction of ``|beta>`` to that
support (see :mod:`hetsteer.kernels`) and the Gaussian mass is carried in log
form, which keeps the steered vector finite far out in the beta plane where the
outcome density underflows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import InvalidStateError, ZeroProbabilityOutcome
from .hilbert import (
    BLOCH_TOL,
    EIGEN_FLOOR,
    HERMITIAN_TOL,
    PAULI,
    TRACE_TOL,
    BlochVector,
    JointState,
    as_amplitude,
)

#: outcome treated as impossible when <b|F_0|b> / <b|b> (on the support) is below this
ZERO_PROB_TOL = 1e-14

OK = "ok"
ZERO_PROBABILITY = "zero_probability"


@dataclass(frozen=True)
class ConditionedOperators:
    """The four field operators ``F_v = Tr_S[rho (sigma_v (x) 1)]``, shape ``(4, n_cut, n_cut)``."""

    ops: np.ndarray

    def __post_init__(self):
        ops = np.array(self.ops, dtype=complex)
        if ops.ndim != 3 or ops.shape[0] != 4 or ops.shape[1] != ops.shape[2]:
            raise InvalidStateError(f"expected shape (4, N, N), got {ops.shape}")
        asym = np.max(np.abs(ops - ops.conj().transpose(0, 2, 1)))
        if asym > HERMITIAN_TOL:
            raise InvalidStateError(f"conditioned operators not Hermitian ({asym:.3g})")
        ops = 0.5 * (ops + ops.conj().transpose(0, 2, 1))
        tr = np.trace(ops[0]).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"Tr F_0 = {tr!r}, expected 1")
        lowest = np.linalg.eigvalsh(ops[0])[0]
        if lowest < EIGEN_FLOOR:
            raise InvalidStateError(f"F_0 has eigenvalue {lowest:.3g}")
        ops.setflags(write=False)
        object.__setattr__(self, "ops", ops)
        nz = np.flatnonzero(np.any(ops != 0, axis=(0, 1)) | np.any(ops != 0, axis=(0, 2)))
        object.__setattr__(self, "_support", int(nz[-1]) + 1 if nz.size else 1)

    @property
    def n_cut(self) -> int:
        return self.ops.shape[1]

    @property
    def support(self) -> int:
        """Number of leading Fock levels on which some ``F_v`` is non-zero."""
        return self._support

    @property
    def trimmed(self) -> np.ndarray:
        k = self._support
        return self.ops[:, :k, :k]

    f0 = property(lambda self: self.ops[0])
    f1 = property(lambda self: self.ops[1])
    f2 = property(lambda self: self.ops[2])
    f3 = property(lambda self: self.ops[3])

    def traces(self) -> np.ndarray:
        return np.trace(self.ops, axis1=1, axis2=2).real


def conditioned_operators(rho: JointState) -> ConditionedOperators:
    # F_v[n, m] = sum_ab sigma_v[b, a] <a n|rho|b m>
    ops = np.einsum("vba,anbm->vnm", PAULI, rho.blocks())
    return ConditionedOperators(ops)


@dataclass(frozen=True)
class SteeringSample:
    """One heterodyne outcome.

    ``raw_overlap`` is ``<beta|F_0|beta>``; ``density = raw_overlap / pi`` is the
    outcome density for the POVM ``|beta><beta|/pi``. Zero-probability outcomes
    keep ``bloch = None`` and ``flag = "zero_probability"``.
    """

    beta: complex
    bloch: BlochVector | None
    density: float
    raw_overlap: float
    flag: str = OK

    @property
    def ok(self) -> bool:
        return self.flag == OK


def _bloch_or_raise(q: np.ndarray, beta: complex) -> BlochVector:
    if not q[0] >= ZERO_PROB_TOL:
        raise ZeroProbabilityOutcome(
            f"outcome beta = {beta} has vanishing probability "
            f"(<beta|F_0|beta> relative to the support norm is {q[0]:.3g}); steered state undefined"
        )
    q0 = float(q[0])
    return BlochVector(float(q[1]) / q0, float(q[2]) / q0, float(q[3]) / q0)


def heterodyne_steer(f: ConditionedOperators, beta) -> SteeringSample:
    beta = as_amplitude(beta)
    q, log_mass = kernels.quadratic_forms(f.trimmed, np.array([beta]))
    bloch = _bloch_or_raise(q[0], beta)
    raw = float(q[0, 0]) * math.exp(float(log_mass[0]))
    return SteeringSample(beta, bloch, raw / math.pi, raw)


def mixed_projection_steer(
    f: ConditionedOperators, branches: Sequence[tuple[float, complex]]
) -> BlochVector:
    """Steer with the effect ``sum_i q_i |beta_i><beta_i|``.

    The result is the convex combination of the branch steered points, each
    weighted by ``q_i <beta_i|F_0|beta_i>``.
    """
    if not branches:
        raise ValueError("need at least one branch")
    w = np.array([float(q) for q, _ in branches])
    betas = np.array([as_amplitude(b) for _, b in branches])
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError(f"branch weights must be non-negative, got {w.tolist()}")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError(f"branch weights sum to {w.sum()!r}, expected 1")
    keep = w > 0
    w, betas = w[keep], betas[keep]
    q, log_mass = kernels.quadratic_forms(f.trimmed, betas)
    scale = np.exp(log_mass - log_mass.max()) * w
    num = scale @ q
    den = scale.sum()
    if not num[0] >= ZERO_PROB_TOL * den:
        raise ZeroProbabilityOutcome(
            f"mixed projection on {betas.tolist()} has vanishing probability; steered state undefined"
        )
    n0 = float(num[0])
    return BlochVector(float(num[1]) / n0, float(num[2]) / n0, float(num[3]) / n0)


@dataclass(frozen=True)
class SweepGrid:
    """Polar grid ``beta = r exp(i phi)``, ``r`` outer and ``phi`` inner.

    ``weights[i, k]`` is the polar area element for the trapezoid rule in ``r``
    and the uniform rule in ``phi``.
    """

    r_values: np.ndarray
    phi_values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r_values, dtype=float).reshape(-1)
        phi = np.asarray(self.phi_values, dtype=float).reshape(-1)
        w = np.asarray(self.weights, dtype=float).reshape(r.size, phi.size)
        if r.size < 1 or phi.size < 1:
            raise ValueError("grid needs at least one radius and one angle")
        if np.any(r < 0) or np.any(np.diff(r) <= 0):
            raise ValueError("radii must be non-negative and strictly increasing")
        if np.any(phi < 0) or np.any(phi >= 2 * np.pi):
            raise ValueError("angles must lie in [0, 2 pi)")
        if np.any(w < 0):
            raise ValueError("quadrature weights must be non-negative")
        for name, a in (("r_values", r), ("phi_values", phi), ("weights", w)):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @classmethod
    def polar(cls, r_max: float, n_r: int, n_phi: int, spacing: str = "linear", r_min: float = 1e-2):
        """Radii from 0 to ``r_max``; ``spacing="log"`` puts ``n_r - 1`` of them
        geometrically between ``r_min`` and ``r_max`` after the origin."""
        if not r_max > 0:
            raise ValueError("r_max must be positive")
        if n_r < 1 or n_phi < 1:
            raise ValueError("n_r and n_phi must be >= 1")
        if spacing == "linear":
            r = np.linspace(0.0, r_max, n_r)
        elif spacing == "log":
            if not 0 < r_min < r_max:
                raise ValueError("log spacing needs 0 < r_min < r_max")
            r = np.concatenate([[0.0], np.geomspace(r_min, r_max, n_r - 1)]) if n_r > 1 else np.array([0.0])
        else:
            raise ValueError(f"unknown radial spacing {spacing!r}")
        phi = 2 * np.pi * np.arange(n_phi) / n_phi
        return cls(r, phi, np.outer(trapezoid_radial_weights(r), np.full(n_phi, 2 * np.pi / n_phi)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.r_values.size, self.phi_values.size

    def betas(self) -> np.ndarray:
        return (self.r_values[:, None] * np.exp(1j * self.phi_values[None, :])).reshape(-1)

    def polar_points(self) -> tuple[np.ndarray, np.ndarray]:
        rr, pp = np.meshgrid(self.r_values, self.phi_values, indexing="ij")
        return rr.reshape(-1), pp.reshape(-1)


def trapezoid_radial_weights(r: np.ndarray) -> np.ndarray:
    """``r dr`` weights of the trapezoid rule on (possibly uneven) radii."""
    r = np.asarray(r, dtype=float)
    if r.size == 1:
        return np.zeros(1)
    d = np.diff(r)
    h = np.zeros_like(r)
    h[:-1] += d / 2
    h[1:] += d / 2
    return r * h


@dataclass(frozen=True)
class SweepResult:
    """Column view of a sweep; rows are in grid order."""

    r: np.ndarray
    phi: np.ndarray
    beta: np.ndarray
    quad: np.ndarray  # (M, 4) normalized quadratic forms
    log_mass: np.ndarray

    @property
    def ok(self) -> np.ndarray:
        return self.quad[:, 0] >= ZERO_PROB_TOL

    @property
    def raw_overlap(self) -> np.ndarray:
        return self.quad[:, 0] * np.exp(self.log_mass)

    @property
    def density(self) -> np.ndarray:
        return self.raw_overlap / np.pi

    @property
    def bloch(self) -> np.ndarray:
        """``(M, 3)`` steered components, NaN on zero-probability rows."""
        out = np.full((self.quad.shape[0], 3), np.nan)
        ok = self.ok
        out[ok] = self.quad[ok, 1:] / self.quad[ok, :1]
        return out

    def points(self) -> np.ndarray:
        """Steered Bloch vectors of the admissible outcomes only."""
        return self.bloch[self.ok]

    def samples(self) -> list[SteeringSample]:
        ok, bloch, raw = self.ok, self.bloch, self.raw_overlap
        out = []
        for i in range(self.beta.size):
            b = BlochVector(*map(float, bloch[i])) if ok[i] else None
            out.append(
                SteeringSample(
                    complex(self.beta[i]), b, float(raw[i]) / math.pi, float(raw[i]), OK if ok[i] else ZERO_PROBABILITY
                )
            )
        return out


def sweep_arrays(f: ConditionedOperators, grid: SweepGrid) -> SweepResult:
    r, phi = grid.polar_points()
    beta = grid.betas()
    q, log_mass = kernels.quadratic_forms(f.trimmed, beta)
    return SweepResult(r, phi, beta, q, log_mass)


def sweep(f: ConditionedOperators, grid: SweepGrid) -> list[SteeringSample]:
    return sweep_arrays(f, grid).samples()


def no_signalling_residual(f: ConditionedOperators, grid: SweepGrid) -> tuple[np.ndarray, float]:
    """Quadrature check of ``int d^2b (1/pi) <b|F_v|b> = Tr F_v``.

    Returns the per-component residual against the reduced qubit Bloch vector
    and the defect of the total outcome mass.
    """
    res = sweep_arrays(f, grid)
    raw = res.quad * np.exp(res.log_mass)[:, None]
    integral = grid.weights.reshape(-1) @ raw / np.pi
    tr = f.traces()
    return np.abs(integral[1:] - tr[1:]), float(abs(integral[0] - 1.0))


def steering_set_spread(points: np.ndarray) -> float:
    """Largest distance of a point from the centroid (0 for a single-point set)."""
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(points - points.mean(axis=0), axis=1)))


# --- two-qubit reference ------------------------------------------------------


@dataclass(frozen=True)
class TwoQubitTheta:
    """``Theta[mu, nu]`` with ``rho_AB = 1/4 sum Theta[mu, nu] sigma_mu (x) sigma_nu``.

    Row 0 holds ``(1, b)``, column 0 holds ``(1, a)`` and the lower-right block
    is the correlation matrix ``T``.
    """

    theta: np.ndarray
    check_positive: bool = True

    def __post_init__(self):
        th = np.array(self.theta, dtype=float)
        if th.shape != (4, 4) or not np.all(np.isfinite(th)):
            raise InvalidStateError("Theta must be a finite 4x4 real matrix")
        if th[0, 0] != 1.0:
            raise InvalidStateError(f"Theta[0, 0] must be 1, got {th[0, 0]}")
        if np.linalg.norm(th[1:, 0]) > 1 + BLOCH_TOL or np.linalg.norm(th[0, 1:]) > 1 + BLOCH_TOL:
            raise InvalidStateError("local Bloch vectors a, b must have norm <= 1")
        th.setflags(write=False)
        object.__setattr__(self, "theta", th)
        if self.check_positive:
            lowest = np.linalg.eigvalsh(self.density_matrix())[0]
            if lowest < EIGEN_FLOOR:
                raise InvalidStateError(f"Theta describes a non-positive operator (eigenvalue {lowest:.3g})")

    @classmethod
    def from_parts(cls, a=(0, 0, 0), b=(0, 0, 0), t=np.zeros((3, 3)), check_positive: bool = True):
        th = np.eye(4)
        th[1:, 0] = a
        th[0, 1:] = b
        th[1:, 1:] = t
        return cls(th, check_positive)

    a = property(lambda self: self.theta[1:, 0])
    b = property(lambda self: self.theta[0, 1:])
    t = property(lambda self: self.theta[1:, 1:])

    def density_matrix(self) -> np.ndarray:
        return 0.25 * np.einsum("mn,mij,nkl->ikjl", self.theta, PAULI, PAULI).reshape(4, 4)


def two_qubit_steered_point(theta: TwoQubitTheta, x) -> BlochVector:
    x = np.asarray(x, dtype=float)
    if np.linalg.norm(x) > 1 + BLOCH_TOL:
        raise ValueError("measurement vector must satisfy |x| <= 1")
    den = 1.0 + theta.b @ x
    if abs(den) < 1e-14:
        raise ZeroProbabilityOutcome(f"measurement x = {x.tolist()} occurs with zero probability")
    return BlochVector(*map(float, (theta.a + theta.t @ x) / den))


def fibonacci_sphere(samples: int) -> np.ndarray:
    """Deterministic, nearly uniform unit vectors (golden-angle spiral)."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    i = np.arange(samples) + 0.5
    z = 1.0 - 2.0 * i / samples
    rho = np.sqrt(1.0 - z * z)
    ang = np.pi * (3.0 - math.sqrt(5.0)) * np.arange(samples)
    return np.column_stack([rho * np.cos(ang), rho * np.sin(ang), z])


def two_qubit_ellipsoid(theta: TwoQubitTheta, samples: int) -> list[BlochVector]:
    return [two_qubit_steered_point(theta, x) for x in fibonacci_sphere(samples)]
