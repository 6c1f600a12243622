import numpy as np
import pytest

from helpers import cgauss, random_spec
from rankone.asymptotics import (
    fit_small_tau,
    large_tau_check,
    large_tau_model,
    local_moving_roots,
    match,
    predict_small_tau,
    small_tau_error,
    small_tau_model,
    trace_curves,
)
from rankone.errors import DegenerateError
from rankone.jordan import JordanSpec
from rankone.perturbation import PerturbationSystem, p_uv_tau
from rankone.poly import evaluate

J2 = JordanSpec.of([(0, [2])])
J3 = JordanSpec.of([(0, [3])])
DIAG01 = JordanSpec.of([(0, [1]), (1, [1])])


def random_system(rng, spec):
    return PerturbationSystem.from_jordan(spec, cgauss(rng, spec.n), cgauss(rng, spec.n))


def test_match_is_bijection():
    prev = np.array([0, 1, 2j])
    perm, dist = match(prev, np.array([2j + 0.01, 0.02, 1.0]))
    assert sorted(perm) == [0, 1, 2]
    assert list(perm) == [1, 2, 0]
    assert dist == pytest.approx(0.02)


# -- tracing ----------------------------------------------------------------

def test_trace_J2_square_roots():
    sys = PerturbationSystem.from_jordan(J2, [0, 1], [1, 0])
    cb = trace_curves(sys, 0.0, 4.0, 41)
    assert cb.n_branches == 2 and cb.branches.shape[1] == cb.taus.size
    roots = np.sqrt(cb.taus)
    # Branches never swap sign labels after leaving 0.
    b = cb.branches
    if b[0, -1].real < 0:
        b = b[::-1]
    np.testing.assert_allclose(b[0], roots, atol=1e-8)
    np.testing.assert_allclose(b[1], -roots, atol=1e-8)


def test_trace_diag01_real_and_separate():
    sys = PerturbationSystem.from_jordan(DIAG01, [1, 1], [1, 1])
    cb = trace_curves(sys, -2.0, 2.0, 201)
    assert 0.0 in cb.taus
    assert np.abs(cb.branches.imag).max() <= 1e-10
    gap = np.abs(cb.branches[0] - cb.branches[1])
    # Discriminant 4 tau^2 + 1 >= 1, so the gap is at least 1.
    assert gap.min() >= 1 - 1e-10


def test_trace_J3_three_branches_meet_only_at_zero():
    rng = np.random.default_rng(42)
    sys = random_system(rng, J3)
    cb = trace_curves(sys, -5.0, 5.0, 401)
    assert cb.n_branches == 3
    assert cb.taus.size == 401 and np.all(np.diff(cb.taus) > 0)
    off = np.abs(cb.taus) > 1e-3
    b = cb.branches[:, off]
    d = np.min([np.abs(b[i] - b[k]).min() for i in range(3) for k in range(i + 1, 3)])
    assert d > 1e-6
    at0 = cb.branches[:, cb.taus == 0.0]
    assert np.abs(at0).max() == 0


def test_trace_rejects_bad_grid():
    sys = PerturbationSystem.from_jordan(J2, [0, 1], [1, 0])
    with pytest.raises(ValueError):
        trace_curves(sys, 1.0, 0.0, 10)
    with pytest.raises(ValueError):
        trace_curves(sys, 0.0, 1.0, 1)


@pytest.mark.parametrize("seed", range(10))
def test_branch_permanence(seed):
    rng = np.random.default_rng(seed)
    sys = random_system(rng, random_spec(rng, n_max=7))
    cb = trace_curves(sys, -3.0, 3.0, 61)
    for t, col in zip(cb.taus, cb.branches.T):
        p = p_uv_tau(sys, t)
        scale = p.scale()
        for z in col:
            assert abs(evaluate(p, z)) <= 1e-8 * scale * max(1.0, abs(z)) ** p.degree


# -- small tau --------------------------------------------------------------

def test_small_tau_brunovsky_J3():
    u = np.array([0.7, -1.2 + 0.5j, 0.9 - 0.3j])
    sys = PerturbationSystem.from_jordan(J3, u, [1, 0, 0])
    model = small_tau_model(sys)
    assert model.exponents == [3]
    assert model.coefficients[0] == pytest.approx(u[2])
    fit = fit_small_tau(sys, 0)
    assert fit["slope"] == pytest.approx(1 / 3, abs=1e-3)
    assert fit["abs_c"] == pytest.approx(abs(u[2]), rel=1e-3)


def test_small_tau_diag01():
    sys = PerturbationSystem.from_jordan(DIAG01, [1, 1], [1, 1])
    model = small_tau_model(sys)
    assert model.exponents == [1, 1]
    assert model.coefficients[0] == pytest.approx(1)
    fit = fit_small_tau(sys, 0)
    assert fit["slope"] == pytest.approx(1, abs=1e-6)
    assert fit["abs_c"] == pytest.approx(1, rel=1e-4)


def test_predict_small_tau():
    u = np.array([0.0, 0.0, 1.0])
    model = small_tau_model(PerturbationSystem.from_jordan(J3, u + [1, 0, 0], [1, 0, 0]))
    assert predict_small_tau(model, 0, 0, 0) == 0
    assert predict_small_tau(model, 0, 0, 1e-6) == pytest.approx(1e-2)
    pts = [predict_small_tau(model, 0, k, 1e-6) for k in range(3)]
    np.testing.assert_allclose(np.abs(pts), 1e-2)
    assert abs(pts[1] - pts[0]) == pytest.approx(abs(pts[2] - pts[1]))
    with pytest.raises(ValueError):
        predict_small_tau(model, 0, 3, 1e-6)


def test_small_tau_undefined_where_p_uv_vanishes():
    # p_uv = lambda for diag(0, 1) with u = v = (0, 1): vanishes at 0.
    sys = PerturbationSystem.from_jordan(DIAG01, [0, 1], [0, 1])
    model = small_tau_model(sys)
    assert model.coefficients[0] is None and model.coefficients[1] is not None
    with pytest.raises(DegenerateError):
        predict_small_tau(model, 0, 0, 1e-3)


@pytest.mark.parametrize("pairs", [[(0, [3])], [(0, [2, 1]), (1, [1])]])
@pytest.mark.parametrize("seed", range(10))
def test_small_tau_error_order(pairs, seed):
    spec = JordanSpec.of(pairs)
    sys = random_system(np.random.default_rng(seed), spec)
    model = small_tau_model(sys)
    for j, n in enumerate(spec.largest):
        c6 = small_tau_error(sys, model, j, 1e-6) / 1e-6 ** (2 / n)
        c8 = small_tau_error(sys, model, j, 1e-8) / 1e-8 ** (2 / n)
        assert c6 / c8 <= 4 and c8 / c6 <= 4


def test_local_roots_count():
    sys = random_system(np.random.default_rng(3), JordanSpec.of([(0, [2, 1]), (1, [1])]))
    assert local_moving_roots(sys, 0, 1e-6).size == 2
    assert local_moving_roots(sys, 1, 1e-6).size == 1


# -- large tau --------------------------------------------------------------

def test_large_tau_diag01():
    sys = PerturbationSystem.from_jordan(DIAG01, [1, 1], [1, 1])
    model = large_tau_model(sys)
    assert model.ray_slope == 2
    np.testing.assert_allclose(model.finite_limits.expanded(), [0.5])
    assert model.tau0_estimate > 0


def test_large_tau_J3_brunovsky():
    u = np.array([1.0, 0.5 - 1j, -2.0])
    sys = PerturbationSystem.from_jordan(J3, u, [1, 0, 0])
    model = large_tau_model(sys, estimate_tau0=False)
    assert model.ray_slope == pytest.approx(u[0])
    lim = model.finite_limits.expanded()
    np.testing.assert_allclose(np.abs(u[0] * lim ** 2 + u[1] * lim + u[2]), 0, atol=1e-12)


def test_large_tau_degenerate_J2():
    sys = PerturbationSystem.from_jordan(J2, [0, 1], [1, 0])
    with pytest.raises(DegenerateError):
        large_tau_model(sys)


@pytest.mark.parametrize("seed", range(20))
def test_large_tau_convergence(seed):
    rng = np.random.default_rng(seed)
    sys = random_system(rng, random_spec(rng, n_max=8))
    model = large_tau_model(sys, estimate_tau0=False)
    lim = model.finite_limits.expanded()
    d5, _ = large_tau_check(sys, lim, 1e5)
    d6, escaping = large_tau_check(sys, lim, 1e6)
    # Bounded roots approach their limits like 1/tau.
    assert d6 <= 1e-2
    if d6 > 1e-9:
        assert 5 <= d5 / d6 <= 20
    assert abs(escaping / 1e6 - model.ray_slope) <= 1e-3 * abs(model.ray_slope)
