"""Acceptance criteria 1-9, each at its stated tolerance and time budget.

Closed forms are written out here rather than imported so the numeric
pipeline is checked against an independent transcription. The mixed-state
and JC forms below are the published expressions; they agree with the
direct trace when evaluated at the reflected outcome -beta.
"""
import math
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.spatial import cKDTree
from scipy.spatial.distance import directed_hausdorff

from hetsteer import dynamics, hilbert, states, steering
from hetsteer.steering import SweepGrid, TwoQubitTheta

from conftest import report

N_CUT = 60


def standard_grid() -> SweepGrid:
    return SweepGrid.polar(3.0, 200, 64)


def sweep(rho, grid):
    return steering.sweep_arrays(steering.conditioned_operators(rho), grid)


def printed_mixed(p, r, phi):
    d = p * r**4 + (1 - p) * (1 + r * r)
    return np.stack(
        [(p * r**4 - 2 * (1 - p) * r * np.cos(phi)) / d, -2 * (1 - p) * r * np.sin(phi) / d, (1 - p) * (r * r - 1) / d],
        axis=-1,
    )


def printed_coherent_pair(g, gp, beta):
    bc = np.conj(beta)
    cross = -0.5 * abs(g) ** 2 - 0.5 * abs(gp) ** 2 - np.abs(beta) ** 2
    a = np.exp(cross + g * bc + beta * np.conj(gp))
    b = np.exp(cross + gp * bc + beta * np.conj(g))
    c = np.exp(-abs(g) ** 2 - np.abs(beta) ** 2 + g * bc + beta * np.conj(g))
    d = np.exp(-abs(gp) ** 2 - np.abs(beta) ** 2 + gp * bc + beta * np.conj(gp))
    theta0 = c + d
    return np.stack([(a + b) / theta0, 1j * (a - b) / theta0, (c - d) / theta0], axis=-1)


def printed_jc(n, lt, r, phi):
    w = math.sqrt(n) * lt
    d = n * math.sin(w) ** 2 + r * r * math.cos(w) ** 2
    s2 = math.sin(2 * w)
    return np.stack(
        [
            -r * math.sqrt(n) * np.sin(phi) * s2 / d,
            -r * math.sqrt(n) * np.cos(phi) * s2 / d,
            (n * math.sin(w) ** 2 - r * r * math.cos(w) ** 2) / d,
        ],
        axis=-1,
    )


def reflected(res):
    return res.r, (res.phi + np.pi) % (2 * np.pi)


def test_criterion_1_bell_surface_law():
    t0 = time.perf_counter()
    res = sweep(states.bell(N_CUT), standard_grid())
    pts = res.points()
    dev = float(np.max(np.abs(np.sum(pts**2, axis=1) - 1.0)))
    elapsed = time.perf_counter() - t0
    ok = res.ok.all() and dev < 1e-9 and elapsed < 2.0
    report(1, ok, f"max |X^2 - 1| = {dev:.2e} (< 1e-9) over {pts.shape[0]} outcomes in {elapsed:.2f}s (< 2s)")
    assert res.ok.all() and dev < 1e-9 and elapsed < 2.0


def test_criterion_2_bell_projection_probability():
    f = steering.conditioned_operators(states.bell(N_CUT))
    errs = []
    for r in (0.0, 0.5, 1.0, 2.0, 3.0):
        for phi in (0.0, 1.0, 4.0):
            raw = steering.heterodyne_steer(f, r * complex(math.cos(phi), math.sin(phi))).raw_overlap
            errs.append(abs(raw - 0.5 * math.exp(-r * r) * (1 + r * r)))
    err = max(errs)
    report(2, err < 1e-10, f"max |raw - e^(-r^2)(1+r^2)/2| = {err:.2e} (< 1e-10)")
    assert err < 1e-10


def test_criterion_3_mixed_closed_form():
    grid = standard_grid()
    worst, origin = 0.0, 0.0
    for p in (0.1, 0.3, 0.5, 0.9):
        res = sweep(states.mixed(p, N_CUT), grid)
        assert res.ok.all()
        worst = max(worst, float(np.max(np.abs(res.bloch - printed_mixed(p, *reflected(res))))))
        at0 = steering.heterodyne_steer(steering.conditioned_operators(states.mixed(p, N_CUT)), 0).bloch
        origin = max(origin, float(np.max(np.abs(at0.as_array() - [0, 0, -1]))))
    ok = worst < 1e-9 and origin < 1e-12
    report(3, ok, f"max deviation from closed form {worst:.2e} (< 1e-9); r = 0 gives (0,0,-1) to {origin:.1e}")
    assert worst < 1e-9 and origin < 1e-12


def test_criterion_4_mixed_geometry_properties():
    t0 = time.perf_counter()
    grid = SweepGrid.polar(30.0, 400, 64, spacing="log")
    c03 = sweep(states.mixed(0.3, N_CUT), grid).points()
    c09 = sweep(states.mixed(0.9, N_CUT), grid).points()
    near_plus = float(np.min(np.linalg.norm(c03 - [1.0, 0.0, 0.0], axis=1)))

    tree = cKDTree(c03)
    rng = np.random.default_rng(0)
    gap = 0.0
    for _ in range(20):
        i = rng.integers(0, len(c03), 4000)
        j = rng.integers(0, len(c03), 4000)
        d, _ = tree.query(0.5 * (c03[i] + c03[j]))
        gap = max(gap, float(d.max()))
        if gap > 0.05:
            break
    haus = max(directed_hausdorff(c03, c09)[0], directed_hausdorff(c09, c03)[0])
    elapsed = time.perf_counter() - t0
    ok = near_plus < 0.02 and gap > 0.05 and haus > 0.1 and elapsed < 30
    report(
        4,
        ok,
        f"dist to (1,0,0) {near_plus:.2e} (< 0.02); midpoint gap {gap:.3f} (> 0.05); "
        f"Hausdorff(p=0.3, p=0.9) {haus:.3f} (> 0.1); {elapsed:.1f}s (< 30s)",
    )
    assert near_plus < 0.02 and gap > 0.05 and haus > 0.1 and elapsed < 30


def test_criterion_5_coherent_pair():
    grid = standard_grid()
    worst, norm_dev = 0.0, 0.0
    for g, gp in ((1.0, -1.0), (2j, 1.0), (0.5, 0.5)):
        res = sweep(states.coherent_pair(g, gp, N_CUT), grid)
        assert res.ok.all()
        ref = printed_coherent_pair(complex(g), complex(gp), res.beta)
        assert np.max(np.abs(ref.imag)) < 1e-12
        worst = max(worst, float(np.max(np.abs(res.bloch - ref.real))))
        norm_dev = max(norm_dev, float(np.max(np.abs(np.sum(res.bloch**2, axis=1) - 1.0))))
    ok = worst < 1e-8 and norm_dev < 1e-9
    report(5, ok, f"max deviation from closed form {worst:.2e} (< 1e-8); unit-norm deviation {norm_dev:.2e} (< 1e-9)")
    assert worst < 1e-8 and norm_dev < 1e-9


def _jc_hamiltonian(n_cut: int) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, n_cut)), 1)
    sp = np.array([[0.0, 1.0], [0.0, 0.0]])
    return np.kron(sp, a) + np.kron(sp.T, a.T)


def test_criterion_6_jc_trajectory():
    t0 = time.perf_counter()
    grid = standard_grid()
    lts = np.linspace(0.1, 3.0, 16)
    model = dynamics.JCModel(1.0, N_CUT)
    h = _jc_hamiltonian(N_CUT)
    keep = np.ones(2 * N_CUT, bool)
    keep[N_CUT - 1] = False  # truncation edge has no partner inside the space
    form_err = prop_err = conc_err = 0.0
    for lt in lts:
        u = dynamics.propagator(model, lt)
        ref = expm(-1j * h * lt)
        prop_err = max(prop_err, float(np.max(np.abs((u - ref)[np.ix_(keep, keep)]))))
    for n in (1, 2, 3):
        init = states.jc_initial(n, N_CUT)
        for lt in lts:
            rho = dynamics.jc_propagate(model, init, lt)
            res = sweep(rho, grid)
            r, phi = reflected(res)
            ok = res.ok
            form_err = max(form_err, float(np.max(np.abs(res.bloch[ok] - printed_jc(n, lt, r[ok], phi[ok])))))
            qubit = hilbert.reduced_qubit(rho)
            c = math.sqrt(max(0.0, 2 * (1 - np.trace(qubit @ qubit).real)))
            conc_err = max(conc_err, abs(c - abs(math.sin(2 * math.sqrt(n) * lt))))
    elapsed = time.perf_counter() - t0
    ok = form_err < 1e-8 and prop_err < 1e-12 and conc_err < 1e-10 and elapsed < 10
    report(
        6,
        ok,
        f"closed form {form_err:.2e} (< 1e-8); propagator {prop_err:.2e} (< 1e-12); "
        f"concurrence {conc_err:.2e} (< 1e-10); {elapsed:.1f}s (< 10s)",
    )
    assert form_err < 1e-8 and prop_err < 1e-12 and conc_err < 1e-10 and elapsed < 10


def _quadrature(rho, grid):
    res = sweep(rho, grid)
    raw = res.raw_overlap
    w = grid.weights.reshape(-1) * raw / np.pi
    x = np.where(res.ok[:, None], res.bloch, 0.0)
    return w @ x


def test_criterion_7_no_signalling():
    cases = {
        "bell": states.bell(N_CUT),
        "mixed p=0.5": states.mixed(0.5, N_CUT),
        "jc n=1 lt=pi/8": dynamics.jc_closed_form_state(1, math.pi / 8, N_CUT),
    }
    fine, coarse = SweepGrid.polar(6.0, 200, 64), SweepGrid.polar(6.0, 100, 32)
    parts, ok = [], True
    for name, rho in cases.items():
        target = hilbert.reduced_qubit_bloch(rho).as_array()
        e_fine = float(np.max(np.abs(_quadrature(rho, fine) - target)))
        e_coarse = float(np.max(np.abs(_quadrature(rho, coarse) - target)))
        ok &= e_fine < 1e-3 and e_fine < e_coarse
        parts.append(f"{name} {e_fine:.1e} (coarse {e_coarse:.1e})")
    report(7, ok, "residual < 1e-3 and shrinking: " + "; ".join(parts))
    assert ok


def _steer_by_density(rho_ab: np.ndarray, x: np.ndarray) -> np.ndarray:
    pauli = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1.0, -1.0])]
    proj = 0.5 * (np.eye(2) + sum(xi * s for xi, s in zip(x, pauli)))
    cond = np.einsum("ikjl,lk->ij", rho_ab.reshape(2, 2, 2, 2), proj)
    cond /= np.trace(cond)
    return np.array([np.trace(cond @ s).real for s in pauli])


def test_criterion_8_two_qubit_reference():
    corr = TwoQubitTheta.from_parts(t=np.diag([1.0, -1.0, 1.0]))
    pts = np.array(steering.two_qubit_ellipsoid(corr, 1000))
    norm_dev = float(np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0)))
    xs = steering.fibonacci_sphere(1000)
    direct = np.array([_steer_by_density(corr.density_matrix(), x) for x in xs])
    direct_dev = float(np.max(np.abs(direct - pts)))
    a = (0.1, -0.3, 0.4)
    flat = np.array(steering.two_qubit_ellipsoid(TwoQubitTheta.from_parts(a=a, t=np.zeros((3, 3))), 1000))
    flat_dev = float(np.max(np.abs(flat - a)))
    ok = norm_dev < 1e-9 and flat_dev < 1e-12 and direct_dev < 1e-12
    report(8, ok, f"T=diag(1,-1,1) unit-norm dev {norm_dev:.1e} (< 1e-9); T=0 collapse dev {flat_dev:.1e}")
    assert ok


def test_criterion_9_validate_suite():
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "hetsteer", "validate"], capture_output=True, text=True)
    elapsed = time.perf_counter() - t0
    ok = proc.returncode == 0 and elapsed < 60
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()
    report(9, ok, f"validate exit {proc.returncode} in {elapsed:.1f}s (< 60s): {summary}")
    assert ok, proc.stdout + proc.stderr
