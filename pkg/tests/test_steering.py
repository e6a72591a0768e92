import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from hetsteer import hilbert, states, steering
from hetsteer.errors import InvalidStateError, ZeroProbabilityOutcome
from hetsteer.steering import SweepGrid, TwoQubitTheta

from conftest import random_density


def projected_bloch(rho: hilbert.JointState, beta: complex):
    # condition on |beta> in the full truncated space, read off the qubit state
    v = hilbert.coherent_state(beta, rho.n_cut, check=False).amplitudes
    blk = rho.blocks()  # (2, N, 2, N)
    s = np.einsum("n,anbm,m->ab", v.conj(), blk, v)
    p = s.trace().real
    s = s / p
    return np.array([2 * s[0, 1].real, -2 * s[0, 1].imag, (s[0, 0] - s[1, 1]).real]), p


@pytest.fixture(scope="module")
def random_state():
    rng = np.random.default_rng(7)
    return hilbert.JointState(random_density(rng, 2 * 10), 10)


def test_operators_trace_to_reduced_bloch(random_state):
    f = steering.conditioned_operators(random_state)
    assert np.allclose(f.traces()[1:], hilbert.reduced_qubit_bloch(random_state).as_array(), atol=1e-13)
    assert f.traces()[0] == pytest.approx(1.0)


def test_support_trimming():
    f = steering.conditioned_operators(states.bell(30))
    assert f.support == 2
    assert f.trimmed.shape == (4, 2, 2)
    assert steering.conditioned_operators(states.plus_two(30)).support == 3


@given(st.floats(0, 2.5), st.floats(0, 2 * math.pi))
@settings(max_examples=60, deadline=None)
def test_steer_matches_direct_projection(r, phi):
    rho = _STATE
    beta = r * complex(math.cos(phi), math.sin(phi))
    s = steering.heterodyne_steer(_F, beta)
    x, p = projected_bloch(rho, beta)
    assert np.allclose(s.bloch.as_array(), x, atol=1e-11)
    assert s.raw_overlap == pytest.approx(p, rel=1e-10)
    assert s.density == pytest.approx(p / math.pi, rel=1e-10)


_STATE = hilbert.JointState(random_density(np.random.default_rng(3), 2 * 40, rank=3), 40)
_F = steering.conditioned_operators(_STATE)


def test_zero_probability_raises_and_is_flagged():
    f = steering.conditioned_operators(states.mixed(1.0, 8))
    with pytest.raises(ZeroProbabilityOutcome):
        steering.heterodyne_steer(f, 0)
    res = steering.sweep_arrays(f, SweepGrid.polar(2.0, 5, 4))
    assert not res.ok[:4].any() and res.ok[4:].all()
    assert np.isnan(res.bloch[:4]).all()
    samples = res.samples()
    assert samples[0].flag == steering.ZERO_PROBABILITY and samples[0].bloch is None
    assert samples[5].ok


def test_single_branch_mixed_projection_is_identical(random_state):
    f = steering.conditioned_operators(random_state)
    for beta in (0, 0.3 + 0.2j, -1.7j, 2.2):
        assert tuple(steering.mixed_projection_steer(f, [(1.0, beta)])) == tuple(steering.heterodyne_steer(f, beta).bloch)


def in_hull(points: np.ndarray, x: np.ndarray, slack: float = 1e-9) -> bool:
    # find lambda >= 0, sum lambda = 1, points^T lambda = x
    k = points.shape[0]
    a_eq = np.vstack([points.T, np.ones(k)])
    b_eq = np.concatenate([x, [1.0]])
    res = linprog(np.zeros(k), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * k, method="highs")
    return res.status == 0 and np.allclose(a_eq @ res.x, b_eq, atol=slack)


def test_mixed_projection_lies_in_hull():
    rng = np.random.default_rng(11)
    f = _F
    for _ in range(200):
        m = rng.integers(2, 5)
        betas = rng.normal(size=m) + 1j * rng.normal(size=m)
        w = rng.dirichlet(np.ones(m))
        x = steering.mixed_projection_steer(f, list(zip(w, betas))).as_array()
        pts = np.array([steering.heterodyne_steer(f, b).bloch.as_array() for b in betas])
        assert in_hull(pts, x)


def test_mixed_projection_validates_weights():
    with pytest.raises(ValueError):
        steering.mixed_projection_steer(_F, [])
    with pytest.raises(ValueError):
        steering.mixed_projection_steer(_F, [(0.5, 0), (0.6, 1)])
    with pytest.raises(ValueError):
        steering.mixed_projection_steer(_F, [(1.5, 0), (-0.5, 1)])


def test_sweep_is_deterministic(backend):
    f = steering.conditioned_operators(states.mixed(0.3, 20))
    g = SweepGrid.polar(3.0, 30, 16)
    a, b = steering.sweep_arrays(f, g), steering.sweep_arrays(f, g)
    assert a.quad.tobytes() == b.quad.tobytes()
    assert a.log_mass.tobytes() == b.log_mass.tobytes()


def test_sweep_order_r_outer():
    g = SweepGrid.polar(1.0, 3, 4)
    r, phi = g.polar_points()
    assert r.tolist() == [0, 0, 0, 0, 0.5, 0.5, 0.5, 0.5, 1, 1, 1, 1]
    assert np.allclose(phi[:4], [0, math.pi / 2, math.pi, 3 * math.pi / 2])
    assert np.allclose(g.betas(), r * np.exp(1j * phi))


def test_grid_weights_integrate_disk_area():
    for spacing in ("linear", "log"):
        g = SweepGrid.polar(2.0, 400, 8, spacing)
        assert g.weights.sum() == pytest.approx(math.pi * 4.0, rel=1e-4)


@pytest.mark.parametrize(
    "kwargs",
    [dict(r_max=0, n_r=3, n_phi=3), dict(r_max=1, n_r=0, n_phi=3), dict(r_max=1, n_r=3, n_phi=3, spacing="cubic"),
     dict(r_max=1, n_r=3, n_phi=3, spacing="log", r_min=2)],
)
def test_grid_rejects_bad_arguments(kwargs):
    with pytest.raises(ValueError):
        SweepGrid.polar(**kwargs)


def test_no_signalling_residual_shrinks():
    f = steering.conditioned_operators(states.bell(30))
    coarse, _ = steering.no_signalling_residual(f, SweepGrid.polar(6.0, 50, 16))
    fine, mass = steering.no_signalling_residual(f, SweepGrid.polar(6.0, 200, 64))
    assert fine.max() < coarse.max()
    assert fine.max() < 1e-3 and mass < 1e-3


def test_conditioned_operator_validation():
    with pytest.raises(InvalidStateError):
        steering.ConditionedOperators(np.zeros((3, 2, 2)))
    ops = np.zeros((4, 2, 2), dtype=complex)
    ops[0] = np.diag([0.5, 0.5])
    ops[1, 0, 1] = 1.0
    with pytest.raises(InvalidStateError):
        steering.ConditionedOperators(ops)


# two-qubit reference


def test_ellipsoid_for_maximally_correlated():
    th = TwoQubitTheta.from_parts(t=np.diag([1.0, -1.0, 1.0]))
    xs = steering.fibonacci_sphere(500)
    pts = np.array(steering.two_qubit_ellipsoid(th, 500))
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)
    assert np.allclose(pts, xs * [1, -1, 1])


def test_ellipsoid_collapses_without_correlations():
    a = (0.2, -0.1, 0.5)
    th = TwoQubitTheta.from_parts(a=a, t=np.zeros((3, 3)))
    assert np.allclose(steering.two_qubit_ellipsoid(th, 50), [a] * 50)


def test_theta_positivity():
    with pytest.raises(InvalidStateError):
        TwoQubitTheta.from_parts(t=np.eye(3))
    th = TwoQubitTheta.from_parts(t=np.eye(3), check_positive=False)
    xs = steering.fibonacci_sphere(20)
    assert np.allclose(steering.two_qubit_ellipsoid(th, 20), xs)


def test_theta_density_matrix_is_bell():
    th = TwoQubitTheta.from_parts(t=np.diag([1.0, -1.0, 1.0]))
    v = np.array([1, 0, 0, 1]) / math.sqrt(2)
    assert np.allclose(th.density_matrix(), np.outer(v, v))


def test_two_qubit_zero_probability():
    th = TwoQubitTheta.from_parts(b=(0, 0, 1.0), check_positive=False)
    with pytest.raises(ZeroProbabilityOutcome):
        steering.two_qubit_steered_point(th, (0, 0, -1.0))


def test_fibonacci_sphere():
    xs = steering.fibonacci_sphere(1000)
    assert np.allclose(np.linalg.norm(xs, axis=1), 1)
    assert np.allclose(xs.mean(axis=0), 0, atol=1e-3)
