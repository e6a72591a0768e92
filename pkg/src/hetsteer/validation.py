"""Analytic-versus-numeric validation suite behind ``hetsteer validate``.

Closed forms are looked up on the :mod:`hetsteer.analytic` module at call
time, so a patched implementation is what gets checked.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import directed_hausdorff

from . import analytic, dynamics, states, steering
from .hilbert import pure_state_concurrence, reduced_qubit_bloch
from .steering import SweepGrid, conditioned_operators, sweep_arrays

N_CUT = 60
STANDARD_GRID = dict(r_max=3.0, n_r=200, n_phi=64)
JC_LAMBDA_T = tuple(float(x) for x in np.linspace(0.1, 3.0, 16))
COHERENT_PAIRS = ((1.0, -1.0), (2j, 1.0), (0.5, 0.5))
MIXED_P = (0.1, 0.3, 0.5, 0.9)


@dataclass
class Check:
    name: str
    error: float
    tol: float
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"{status}  {self.name:<32} max_err={self.error:.3e}  tol={self.tol:.1e}  ({self.seconds:.2f}s){extra}"


def standard_grid() -> SweepGrid:
    return SweepGrid.polar(**STANDARD_GRID)


def wide_grid(n_r: int = 400, n_phi: int = 64) -> SweepGrid:
    return SweepGrid.polar(30.0, n_r, n_phi, spacing="log")


def _max_dev(numeric: np.ndarray, closed: np.ndarray) -> float:
    ok = ~np.isnan(numeric[:, 0])
    if not ok.any():
        return math.inf
    return float(np.max(np.abs(numeric[ok] - closed[ok])))


def _closed(fn: Callable, res, *args, **kw) -> np.ndarray:
    return np.array([fn(*args, r, p, **kw) for r, p in zip(res.r, res.phi)], dtype=float)


def check_bell_surface() -> tuple[float, str]:
    res = sweep_arrays(conditioned_operators(states.bell(N_CUT)), standard_grid())
    pts = res.points()
    return float(np.max(np.abs(np.sum(pts**2, axis=1) - 1.0))), f"{len(pts)} outcomes"


def check_bell_raw_overlap() -> tuple[float, str]:
    f = conditioned_operators(states.bell(N_CUT))
    err = max(
        abs(steering.heterodyne_steer(f, r).raw_overlap - analytic.bell_raw_overlap(r)) for r in (0.0, 0.5, 1.0, 2.0, 3.0)
    )
    return err, ""


def check_bell_closed_form() -> tuple[float, str]:
    res = sweep_arrays(conditioned_operators(states.bell(N_CUT)), standard_grid())
    return _max_dev(res.bloch, _closed(analytic.bell_bloch, res)), ""


def _printed_vs_negated(f, closed, *args) -> float:
    # published form at (r, phi + pi) is the trace form at (r, phi)
    res = sweep_arrays(f, standard_grid())
    flipped = np.array(
        [closed(*args, r, (p + math.pi) % (2 * math.pi), as_printed=True) for r, p in zip(res.r, res.phi)],
        dtype=float,
    )
    return _max_dev(res.bloch, flipped)


def check_printed_convention() -> tuple[float, str]:
    errs = [
        _printed_vs_negated(conditioned_operators(states.bell(N_CUT)), analytic.bell_bloch),
        _printed_vs_negated(conditioned_operators(states.mixed(0.3, N_CUT)), analytic.mixed_bloch, 0.3),
        _printed_vs_negated(
            conditioned_operators(dynamics.jc_closed_form_state(2, 0.4, N_CUT)),
            analytic.jc_bloch,
            analytic.JCParam(2, 0.4),
        ),
    ]
    return max(errs), "published odd components equal outcome -beta"


def check_stereographic() -> tuple[float, str]:
    rng = np.random.default_rng(7)
    err = 0.0
    for r, phi in zip(rng.uniform(0, 10, 100), rng.uniform(0, 2 * np.pi, 100)):
        th, az = analytic.stereographic_forward(r, phi)
        a = np.array(analytic.stereographic_bloch(th, az))
        b = np.array(analytic.bell_bloch(r, phi))
        err = max(err, float(np.max(np.abs(a - b))))
    return err, ""


def check_product() -> tuple[float, str]:
    grid = SweepGrid.polar(3.0, 40, 16)
    err = 0.0
    target = np.array(analytic.product_bloch())
    for n in (0, 1, 2):
        res = sweep_arrays(conditioned_operators(states.product(n, N_CUT)), grid)
        err = max(err, float(np.max(np.abs(res.points() - target))))
    return err, "n = 0, 1, 2"


def check_mixed() -> tuple[float, str]:
    grid = standard_grid()
    err = 0.0
    for p in MIXED_P:
        res = sweep_arrays(conditioned_operators(states.mixed(p, N_CUT)), grid)
        err = max(err, _max_dev(res.bloch, _closed(analytic.mixed_bloch, res, p)))
        origin = np.array(steering.heterodyne_steer(conditioned_operators(states.mixed(p, N_CUT)), 0).bloch)
        err = max(err, float(np.max(np.abs(origin - [0.0, 0.0, -1.0]))))
    return err, f"p in {MIXED_P}"


def _coherent_pair_sweeps():
    grid = standard_grid()
    for g, gp in COHERENT_PAIRS:
        yield (g, gp), sweep_arrays(conditioned_operators(states.coherent_pair(g, gp, N_CUT)), grid)


def check_coherent_pair() -> tuple[float, str]:
    err = 0.0
    for (g, gp), res in _coherent_pair_sweeps():
        param = analytic.CoherentPairParam(g, gp)
        closed = np.array([analytic.coherent_pair_bloch(param, b) for b in res.beta])
        err = max(err, _max_dev(res.bloch, closed))
    return err, f"{len(COHERENT_PAIRS)} amplitude pairs"


def check_coherent_pair_surface() -> tuple[float, str]:
    err = 0.0
    for _, res in _coherent_pair_sweeps():
        err = max(err, float(np.max(np.abs(np.linalg.norm(res.points(), axis=1) - 1.0))))
    return err, ""


def check_jc_closed_form() -> tuple[float, str]:
    grid = standard_grid()
    model = dynamics.JCModel(1.0, N_CUT)
    err = 0.0
    for n in (1, 2, 3):
        init = states.jc_initial(n, N_CUT)
        for lt in JC_LAMBDA_T:
            res = sweep_arrays(conditioned_operators(dynamics.jc_propagate(model, init, lt)), grid)
            err = max(err, _max_dev(res.bloch, _closed(analytic.jc_bloch, res, analytic.JCParam(n, lt))))
    return err, "n = 1, 2, 3 x 16 times"


def check_jc_propagator() -> tuple[float, str]:
    model = dynamics.JCModel(1.0, N_CUT)
    err = 0.0
    for n in (1, 2, 3):
        init = states.jc_initial(n, N_CUT)
        for lt in JC_LAMBDA_T:
            a = dynamics.jc_propagate(model, init, lt).matrix
            b = dynamics.jc_closed_form_state(n, lt, N_CUT).matrix
            err = max(err, float(np.max(np.abs(a - b))))
    return err, ""


def check_jc_concurrence() -> tuple[float, str]:
    model = dynamics.JCModel(1.0, N_CUT)
    err = 0.0
    for n in (1, 2, 3):
        init = states.jc_initial(n, N_CUT)
        for lt in JC_LAMBDA_T:
            c = pure_state_concurrence(dynamics.jc_propagate(model, init, lt))
            err = max(err, abs(c - analytic.jc_concurrence(analytic.JCParam(n, lt))))
    return err, ""


def check_theta_integrals() -> tuple[float, str]:
    grid = SweepGrid.polar(3.0, 31, 16)
    cases = [
        (analytic.BELL, states.bell(N_CUT)),
        (analytic.MixedStateParam(0.3), states.mixed(0.3, N_CUT)),
        (analytic.CoherentPairParam(1.0, -1.0), states.coherent_pair(1.0, -1.0, N_CUT)),
        (analytic.JCParam(2, 0.7), dynamics.jc_closed_form_state(2, 0.7, N_CUT)),
    ]
    err = 0.0
    for case, rho in cases:
        res = sweep_arrays(conditioned_operators(rho), grid)
        half = 0.5 * res.quad * np.exp(res.log_mass)[:, None]
        closed = np.array([analytic.theta_overlap_integrals(case, b) for b in res.beta])
        err = max(err, float(np.max(np.abs(half - closed))))
    return err, "bell, mixed, coherent pair, JC"


def no_signalling_cases():
    return [
        ("bell", states.bell(N_CUT)),
        ("mixed p=0.5", states.mixed(0.5, N_CUT)),
        ("jc n=1 lt=pi/8", dynamics.jc_closed_form_state(1, math.pi / 8, N_CUT)),
    ]


def check_no_signalling() -> tuple[float, str]:
    fine = SweepGrid.polar(6.0, 200, 64)
    coarse = SweepGrid.polar(6.0, 100, 32)
    err, monotone = 0.0, True
    for _, rho in no_signalling_cases():
        f = conditioned_operators(rho)
        rf, mf = steering.no_signalling_residual(f, fine)
        rc, mc = steering.no_signalling_residual(f, coarse)
        err = max(err, float(rf.max()), mf)
        monotone &= max(rf.max(), mf) < max(rc.max(), mc)
    return (err if monotone else math.inf), "refinement reduces residual" if monotone else "refinement did not help"


def check_two_qubit() -> tuple[float, str]:
    ent = steering.TwoQubitTheta.from_parts(t=np.diag([1.0, -1.0, 1.0]))
    pts = np.array(steering.two_qubit_ellipsoid(ent, 500))
    err = float(np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0)))
    a = np.array([0.0, 0.0, 0.5])
    flat = np.array(steering.two_qubit_ellipsoid(steering.TwoQubitTheta.from_parts(a=a), 200))
    return max(err, float(np.max(np.abs(flat - a)))), ""


def mixed_geometry_properties(grid: SweepGrid | None = None) -> dict:
    """Near-(1,0,0) distance, non-convexity witness gap and p=0.3 vs 0.9 Hausdorff distance."""
    grid = grid or wide_grid()
    lo = sweep_arrays(conditioned_operators(states.mixed(0.3, N_CUT)), grid).points()
    hi = sweep_arrays(conditioned_operators(states.mixed(0.9, N_CUT)), grid).points()
    near = float(np.min(np.linalg.norm(lo - [1.0, 0.0, 0.0], axis=1)))
    tree = cKDTree(lo)
    sub = lo[:: max(1, len(lo) // 300)]
    i, j = np.triu_indices(len(sub), k=1)
    mids = 0.5 * (sub[i] + sub[j])
    gaps, _ = tree.query(mids)
    k = int(np.argmax(gaps))
    hd = max(directed_hausdorff(lo, hi)[0], directed_hausdorff(hi, lo)[0])
    return {
        "near_plus": near,
        "witness_gap": float(gaps[k]),
        "witness": (sub[i[k]], sub[j[k]]),
        "hausdorff": float(hd),
    }


def check_mixed_geometry() -> tuple[float, str]:
    props = mixed_geometry_properties()
    ok = props["near_plus"] < 0.02 and props["witness_gap"] > 0.05 and props["hausdorff"] > 0.1
    detail = (
        f"dist to (1,0,0) {props['near_plus']:.2e}, witness gap {props['witness_gap']:.3f}, "
        f"Hausdorff {props['hausdorff']:.3f}"
    )
    return (props["near_plus"] if ok else math.inf), detail


def check_reduced_bloch() -> tuple[float, str]:
    jc = dynamics.jc_closed_form_state(2, math.pi / (2 * math.sqrt(2)), N_CUT)
    got = [reduced_qubit_bloch(states.bell(N_CUT)), reduced_qubit_bloch(jc)]
    want = [(0.0, 0.0, 0.0), (0.0, 0.0, 1.0)]
    return float(max(np.max(np.abs(np.subtract(g, w))) for g, w in zip(got, want))), ""


CHECKS: list[tuple[str, Callable[[], tuple[float, str]], float]] = [
    ("bell_surface_law", check_bell_surface, 1e-9),
    ("bell_raw_overlap", check_bell_raw_overlap, 1e-10),
    ("bell_closed_form", check_bell_closed_form, 1e-9),
    ("stereographic_projection", check_stereographic, 1e-12),
    ("product_single_point", check_product, 1e-12),
    ("reduced_qubit_bloch", check_reduced_bloch, 1e-12),
    ("mixed_closed_form", check_mixed, 1e-9),
    ("coherent_pair_closed_form", check_coherent_pair, 1e-8),
    ("coherent_pair_surface_law", check_coherent_pair_surface, 1e-9),
    ("jc_closed_form", check_jc_closed_form, 1e-8),
    ("jc_propagator", check_jc_propagator, 1e-12),
    ("jc_concurrence", check_jc_concurrence, 1e-10),
    ("theta_overlap_integrals", check_theta_integrals, 1e-9),
    ("published_sign_convention", check_printed_convention, 1e-9),
    ("no_signalling", check_no_signalling, 1e-3),
    ("two_qubit_ellipsoid", check_two_qubit, 1e-9),
    ("mixed_state_geometry", check_mixed_geometry, 0.02),
]


def run_all(checks=None) -> list[Check]:
    out = []
    for name, fn, tol in checks or CHECKS:
        t0 = time.perf_counter()
        try:
            err, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            err, detail = math.inf, f"{type(exc).__name__}: {exc}"
        out.append(Check(name, err, tol, bool(err < tol), detail, time.perf_counter() - t0))
    return out
