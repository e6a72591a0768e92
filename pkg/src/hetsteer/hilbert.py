"""Dense linear algebra on the qubit (x) truncated field-mode space.

Basis ordering is qubit-major: the joint index of ``|q>|n>`` is ``q * n_cut + n``.
Qubit level ``|0>`` is the +1 eigenvector of sigma_z.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy import special

from .errors import InvalidStateError, TruncationError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
EIGEN_FLOOR = -1e-10
BLOCH_TOL = 1e-9
DEFAULT_TAIL_TOL = 1e-6

#: identity followed by sigma_x, sigma_y, sigma_z
PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def as_amplitude(value) -> complex:
    """Coerce ``value`` to a finite Python complex."""
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"complex amplitude must be finite, got {value!r}")
    return z


def default_n_cut(beta_max: float) -> int:
    """Fock cutoff that keeps the Poisson tail of ``|beta_max>`` below ~1e-9."""
    b = abs(beta_max)
    return max(24, math.ceil(b * b + 6.0 * b + 10.0))


class BlochVector(NamedTuple):
    x1: float
    x2: float
    x3: float

    @property
    def norm(self) -> float:
        return math.sqrt(self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3)

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


@dataclass(frozen=True)
class FockVector:
    """Amplitudes over ``|0>..|n_cut-1>`` plus a bound on the discarded weight."""

    amplitudes: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size < 1:
            raise ValueError("a Fock vector needs at least one amplitude")
        if not np.all(np.isfinite(amps)):
            raise ValueError("Fock amplitudes must be finite")
        if not (self.tail_bound >= 0.0):
            raise ValueError("tail_bound must be non-negative")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_cut(self) -> int:
        return self.amplitudes.size

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


def coherent_state(
    beta, n_cut: int, tail_tol: float = DEFAULT_TAIL_TOL, check: bool = True
) -> FockVector:
    """Truncated coherent state ``|beta>`` (not renormalized).

    The amplitudes follow ``c[n+1] = c[n] * beta / sqrt(n+1)`` from
    ``c[0] = exp(-|beta|^2 / 2)``. ``tail_bound`` is the exact Poisson mass
    beyond the cutoff. With ``check`` set, a tail heavier than ``tail_tol``
    raises :class:`TruncationError`.
    """
    beta = as_amplitude(beta)
    if n_cut < 1:
        raise ValueError("n_cut must be >= 1")
    mean = abs(beta) ** 2
    # P(N, |beta|^2) is the Poisson probability of N or more photons
    tail = float(special.gammainc(n_cut, mean)) if mean > 0 else 0.0
    if check and tail > tail_tol:
        raise TruncationError(
            f"|beta|^2 = {mean:.6g} needs a larger cutoff than n_cut = {n_cut} "
            f"(discarded weight {tail:.3g} > {tail_tol:.1g})"
        )
    amps = np.empty(n_cut, dtype=complex)
    amps[0] = math.exp(-0.5 * mean)
    for n in range(n_cut - 1):
        amps[n + 1] = amps[n] * beta / math.sqrt(n + 1)
    return FockVector(amps, tail)


def fock_state(n: int, n_cut: int) -> FockVector:
    if n_cut < 1:
        raise ValueError("n_cut must be >= 1")
    if not 0 <= n < n_cut:
        raise ValueError(f"number state |{n}> lies outside the cutoff n_cut = {n_cut}")
    amps = np.zeros(n_cut, dtype=complex)
    amps[n] = 1.0
    return FockVector(amps)


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


@dataclass(frozen=True)
class JointState:
    """Density matrix of the qubit and field mode.

    ``purity`` is one of ``"pure"``, ``"mixed"`` or ``"unknown"``. ``notes``
    carries diagnostics attached by the operation that produced the state
    (for instance a truncation-leak warning from the propagator).
    """

    matrix: np.ndarray
    n_cut: int
    purity: str = "unknown"
    notes: tuple = field(default=(), compare=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        dim = 2 * self.n_cut
        if self.n_cut < 1 or m.shape != (dim, dim):
            raise InvalidStateError(
                f"expected a {dim}x{dim} matrix for n_cut = {self.n_cut}, got shape {m.shape}"
            )
        if not np.all(np.isfinite(m)):
            raise InvalidStateError("density matrix has non-finite entries")
        asym = np.max(np.abs(m - m.conj().T))
        if asym > HERMITIAN_TOL:
            raise InvalidStateError(f"density matrix is not Hermitian (max |rho - rho^H| = {asym:.3g})")
        m = _hermitize(m)
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace is {tr!r}, expected 1")
        lowest = np.linalg.eigvalsh(m)[0]
        if lowest < EIGEN_FLOOR:
            raise InvalidStateError(f"density matrix has eigenvalue {lowest:.3g} below {EIGEN_FLOOR}")
        if self.purity not in ("pure", "mixed", "unknown"):
            raise ValueError(f"unknown purity flag {self.purity!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "notes", tuple(self.notes))

    @property
    def dim(self) -> int:
        return 2 * self.n_cut

    def blocks(self) -> np.ndarray:
        """View as ``rho[a, :, b, :] = <a|rho|b>`` on the qubit indices."""
        return self.matrix.reshape(2, self.n_cut, 2, self.n_cut)

    def with_notes(self, *notes: str) -> "JointState":
        return JointState(self.matrix, self.n_cut, self.purity, self.notes + notes)


def joint_vector(c0: FockVector, c1: FockVector, w0=1.0, w1=0.0) -> np.ndarray:
    """Normalized ``w0 |0>(x)c0 + w1 |1>(x)c1`` as a flat joint-space vector."""
    if c0.n_cut != c1.n_cut:
        raise ValueError(f"field vectors disagree on n_cut ({c0.n_cut} vs {c1.n_cut})")
    w0, w1 = as_amplitude(w0), as_amplitude(w1)
    psi = np.concatenate([w0 * c0.amplitudes, w1 * c1.amplitudes])
    nrm = np.linalg.norm(psi)
    if nrm == 0.0:
        raise InvalidStateError("joint vector has zero norm")
    return psi / nrm


def pure_joint(c0: FockVector, c1: FockVector, w0=1.0, w1=0.0) -> JointState:
    psi = joint_vector(c0, c1, w0, w1)
    return state_from_vector(psi, c0.n_cut)


def state_from_vector(psi: np.ndarray, n_cut: int) -> JointState:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return JointState(np.outer(psi, psi.conj()), n_cut, "pure")


def product_state(qubit_rho: np.ndarray, field_rho: np.ndarray) -> JointState:
    field_rho = np.asarray(field_rho, dtype=complex)
    return JointState(np.kron(np.asarray(qubit_rho, dtype=complex), field_rho), field_rho.shape[0])


def mix_states(components: Iterable[tuple[float, JointState]]) -> JointState:
    """Convex combination of joint states."""
    components = list(components)
    if not components:
        raise ValueError("no components to mix")
    weights = np.array([w for w, _ in components], dtype=float)
    if np.any(weights < 0):
        raise ValueError(f"negative mixing weight in {weights.tolist()}")
    if abs(weights.sum() - 1.0) > 1e-12:
        raise ValueError(f"mixing weights sum to {weights.sum()!r}, expected 1")
    n_cut = components[0][1].n_cut
    if any(s.n_cut != n_cut for _, s in components):
        raise ValueError("cannot mix states with different n_cut")
    if len(components) == 1:
        return components[0][1]
    total = sum(w * s.matrix for w, s in components)
    return JointState(total, n_cut, "mixed")


def reduced_field(rho: JointState) -> np.ndarray:
    b = rho.blocks()
    return _hermitize(b[0, :, 0, :] + b[1, :, 1, :])


def reduced_qubit(rho: JointState) -> np.ndarray:
    return np.einsum("anbn->ab", rho.blocks())


def reduced_qubit_bloch(rho: JointState) -> BlochVector:
    rq = reduced_qubit(rho)
    x = [float(np.real(np.trace(rq @ s))) for s in PAULI[1:]]
    return BlochVector(*x)


def qubit_purity(rho: JointState) -> float:
    rq = reduced_qubit(rho)
    return float(np.real(np.trace(rq @ rq)))


def pure_state_concurrence(rho: JointState) -> float:
    """``sqrt(2 (1 - Tr rho_S^2))``; meaningful only for pure joint states."""
    return math.sqrt(max(0.0, 2.0 * (1.0 - qubit_purity(rho))))


def bloch_from_qubit_ket(ket: Sequence[complex]) -> BlochVector:
    ket = np.asarray(ket, dtype=complex)
    ket = ket / np.linalg.norm(ket)
    rq = np.outer(ket, ket.conj())
    return BlochVector(*(float(np.real(np.trace(rq @ s))) for s in PAULI[1:]))
