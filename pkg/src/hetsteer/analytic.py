"""Closed-form steered Bloch vectors for the worked example states.

Every function here is an independent oracle for the numeric engine in
:mod:`hetsteer.steering`. The outcome is ``beta = r exp(i phi)``.

Sign convention
---------------
For the Bell, mixed and Jaynes-Cummings states the published closed forms
have the components odd in ``beta`` (``X_1``, ``X_2``) with the opposite sign
to ``<beta|F_j|beta> / <beta|F_0|beta>``; equivalently they describe outcome
``-beta``. The operators ``F_j`` themselves agree with the direct partial
trace, the discrepancy enters when the odd-order derivatives of the delta
distribution are integrated. By default these functions return the
trace-consistent form; ``as_printed=True`` returns the published expressions,
which equal the default evaluated at ``-beta``. The coherent-pair expressions
need no correction.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroProbabilityOutcome
from .hilbert import BlochVector, as_amplitude

DEGENERATE_TOL = 1e-14


@dataclass(frozen=True)
class MixedStateParam:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class CoherentPairParam:
    gamma: complex
    gamma_prime: complex

    def __post_init__(self):
        object.__setattr__(self, "gamma", as_amplitude(self.gamma))
        object.__setattr__(self, "gamma_prime", as_amplitude(self.gamma_prime))


@dataclass(frozen=True)
class JCParam:
    n: int
    lambda_t: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"photon number must be a positive integer, got {self.n}")
        if not self.lambda_t >= 0:
            raise ValueError(f"lambda_t must be non-negative, got {self.lambda_t}")


BELL = "bell"


def _odd(as_printed: bool) -> float:
    return -1.0 if as_printed else 1.0


def bell_bloch(r: float, phi: float, as_printed: bool = False) -> BlochVector:
    """Steering of ``(|0,0> + |1,1>)/sqrt(2)``: an inverse stereographic projection."""
    s = _odd(as_printed)
    d = 1.0 + r * r
    return BlochVector(s * 2 * r * math.cos(phi) / d, -s * 2 * r * math.sin(phi) / d, (1 - r * r) / d)


def bell_raw_overlap(r: float) -> float:
    """``Tr[(1 (x) |b><b|) rho]`` for the Bell state."""
    return 0.5 * math.exp(-r * r) * (1 + r * r)


def stereographic_forward(r: float, phi: float) -> tuple[float, float]:
    """Polar angle ``2 arctan r`` and azimuth ``phi`` of the projected point."""
    return 2.0 * math.atan(r), phi


def stereographic_bloch(theta: float, azimuth: float, as_printed: bool = False) -> BlochVector:
    s = _odd(as_printed)
    st = math.sin(theta)
    return BlochVector(s * st * math.cos(azimuth), -s * st * math.sin(azimuth), math.cos(theta))


def product_bloch() -> BlochVector:
    """The single steered point of ``(|0,n> + |1,n>)/sqrt(2)``."""
    return BlochVector(1.0, 0.0, 0.0)


def mixed_bloch(param: MixedStateParam | float, r: float, phi: float, as_printed: bool = False) -> BlochVector:
    """Steering of ``p |+,2><+,2| + (1-p) |Phi><Phi|``."""
    p = param.p if isinstance(param, MixedStateParam) else MixedStateParam(param).p
    s = _odd(as_printed)
    r4 = r**4
    d = p * r4 + (1 - p) * (1 + r * r)
    if d < DEGENERATE_TOL:
        raise ZeroProbabilityOutcome(f"mixed state with p = {p} has no weight at r = {r}")
    return BlochVector(
        (p * r4 + s * 2 * (1 - p) * r * math.cos(phi)) / d,
        s * 2 * (1 - p) * r * math.sin(phi) / d,
        (1 - p) * (r * r - 1) / d,
    )


def _coherent_exponents(g: complex, gp: complex, beta: complex):
    bc = beta.conjugate()
    norm = -abs(beta) ** 2
    cross = -0.5 * abs(g) ** 2 - 0.5 * abs(gp) ** 2 + norm
    e_a = cross + g * bc + beta * gp.conjugate()
    e_b = cross + gp * bc + beta * g.conjugate()
    e_c = -abs(g) ** 2 + norm + 2.0 * (g * bc).real
    e_d = -abs(gp) ** 2 + norm + 2.0 * (gp * bc).real
    return e_a, e_b, e_c, e_d


def coherent_pair_bloch(param: CoherentPairParam, beta) -> BlochVector:
    """Steering of ``(|0,gamma> + |1,gamma'>)/sqrt(2)``, evaluated in log space."""
    beta = as_amplitude(beta)
    e_a, e_b, e_c, e_d = _coherent_exponents(param.gamma, param.gamma_prime, beta)
    log_norm = float(np.logaddexp(e_c, e_d))
    a = cmath.exp(e_a - log_norm)
    b = cmath.exp(e_b - log_norm)
    x = (a + b, 1j * (a - b), complex(math.exp(e_c - log_norm) - math.exp(e_d - log_norm)))
    for j, v in enumerate(x, 1):
        if abs(v.imag) >= 1e-10:
            raise ArithmeticError(f"X_{j} has imaginary residue {v.imag:.3g}")
    return BlochVector(x[0].real, x[1].real, x[2].real)


def jc_bloch(param: JCParam, r: float, phi: float, as_printed: bool = False) -> BlochVector:
    """Steering of the resonant Jaynes-Cummings state grown from ``|1, n>``."""
    s = _odd(as_printed)
    rn = math.sqrt(param.n)
    w = rn * param.lambda_t
    sn2, cs2, s2w = math.sin(w) ** 2, math.cos(w) ** 2, math.sin(2 * w)
    d = param.n * sn2 + r * r * cs2
    if d < DEGENERATE_TOL:
        raise ZeroProbabilityOutcome(
            f"JC state n = {param.n}, lambda t = {param.lambda_t} has no weight at r = {r}"
        )
    return BlochVector(
        s * r * rn * math.sin(phi) * s2w / d,
        s * r * rn * math.cos(phi) * s2w / d,
        (param.n * sn2 - r * r * cs2) / d,
    )


def jc_concurrence(param: JCParam) -> float:
    return abs(math.sin(2 * math.sqrt(param.n) * param.lambda_t))


def theta_overlap_integrals(case, beta, as_printed: bool = False) -> tuple[float, float, float, float]:
    """``(1/2) <beta|F_v|beta>`` for v = 0..3, in closed form.

    ``case`` is ``"bell"`` or one of :class:`MixedStateParam`,
    :class:`CoherentPairParam`, :class:`JCParam`.
    """
    beta = as_amplitude(beta)
    s = _odd(as_printed)
    bb = abs(beta) ** 2
    g = math.exp(-bb)
    re2 = 2 * beta.real  # beta + beta*
    im2 = 2 * beta.imag  # (beta - beta*) / i
    if case == BELL:
        return (0.25 * g * (1 + bb), s * 0.25 * g * re2, -s * 0.25 * g * im2, 0.25 * g * (1 - bb))
    if isinstance(case, MixedStateParam):
        p = case.p
        return (
            0.25 * g * (p * bb * bb + (1 - p) * (1 + bb)),
            0.25 * g * (p * bb * bb + s * (1 - p) * re2),
            s * 0.25 * (1 - p) * im2 * g,
            0.25 * (1 - p) * (bb - 1) * g,
        )
    if isinstance(case, CoherentPairParam):
        e_a, e_b, e_c, e_d = _coherent_exponents(case.gamma, case.gamma_prime, beta)
        a, b = cmath.exp(e_a), cmath.exp(e_b)
        return (
            0.25 * (math.exp(e_c) + math.exp(e_d)),
            0.25 * (a + b).real,
            0.25 * (1j * (a - b)).real,
            0.25 * (math.exp(e_c) - math.exp(e_d)),
        )
    if isinstance(case, JCParam):
        n = case.n
        w = math.sqrt(n) * case.lambda_t
        sn2, cs2, s2w = math.sin(w) ** 2, math.cos(w) ** 2, math.sin(2 * w)
        low = bb ** (n - 1) / math.factorial(n - 1)
        high = bb**n / math.factorial(n)
        pref = s2w / math.sqrt(math.factorial(n - 1) * math.factorial(n))
        # beta^n beta*^(n-1) = bb^(n-1) beta
        odd = bb ** (n - 1) * beta
        return (
            0.5 * g * (sn2 * low + cs2 * high),
            s * 0.25 * g * pref * 2 * odd.imag,
            s * 0.25 * g * pref * 2 * odd.real,
            0.5 * g * (sn2 * low - cs2 * high),
        )
    raise ValueError(f"unknown case {case!r}")
