import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linear_sum_assignment

from rankone.poly import (
    Poly,
    RootFindingError,
    derivative,
    divide,
    evaluate,
    exact_divide,
    find_roots,
    from_roots,
    gcd_numeric,
    multiply,
    normalized_resultant,
    residual_ok,
    resultant,
    sylvester_matrix,
    taylor_shift,
)


def P(*coeffs):
    return Poly(coeffs)


def match_error(found, expected):
    found = np.asarray(found, dtype=complex)
    expected = np.asarray(expected, dtype=complex)
    C = np.abs(np.subtract.outer(found, expected))
    i, j = linear_sum_assignment(C)
    return C[i, j].max(initial=0.0)


def random_separated_roots(rng, k, radius=10.0, sep=0.1):
    roots = []
    while len(roots) < k:
        z = complex(*rng.uniform(-radius, radius, size=2))
        if abs(z) <= radius and all(abs(z - w) >= sep for w in roots):
            roots.append(z)
    return roots


# -- construction -----------------------------------------------------------

def test_trailing_zeros_trimmed():
    assert P(1, 2, 0, 1e-14).degree == 1
    assert P(0, 0).is_zero()
    assert Poly().degree == -1


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        P(1, np.nan)
    with pytest.raises(ValueError):
        P(np.inf)


# -- evaluate / derivative / multiply / divide ------------------------------

@pytest.mark.parametrize("p, z, expected", [
    (P(-1, 0, 1), 1, 0),
    (P(0, 0, 0, 1), 2, 8),
    (P(-1, 2), 0.5j, -1 + 1j),
    (Poly(), 3 + 1j, 0),
])
def test_evaluate(p, z, expected):
    assert evaluate(p, z) == pytest.approx(expected)


def test_derivative():
    assert derivative(P(0, 0, 0, 1)) == P(0, 0, 3)
    assert derivative(P(5)).is_zero()
    assert derivative(Poly()).is_zero()
    t0 = 0.3 - 0.2j
    assert derivative(P(t0, -(1 + 2 * t0), 1)).allclose(P(-(1 + 2 * t0), 2), 0)


gaussian_int = st.builds(complex, st.integers(-50, 50), st.integers(-50, 50))


@settings(max_examples=80, deadline=None)
@given(st.lists(gaussian_int, min_size=1, max_size=8),
       st.lists(gaussian_int, min_size=1, max_size=8), gaussian_int, gaussian_int)
def test_derivative_linear(pc, qc, a, b):
    # Gaussian-integer data keeps the coefficient arithmetic exact.
    p, q = Poly(pc), Poly(qc)
    assert derivative(p * a + q * b) == derivative(p) * a + derivative(q) * b


def test_multiply():
    assert multiply(P(-1, 1), P(1, 1)) == P(-1, 0, 1)
    assert multiply(Poly(), P(1, 2)).is_zero()
    assert multiply(P(-2, 1), P(2, -3, 1)) == P(-4, 8, -5, 1)


def test_divide():
    q, r = divide(P(-1, 0, 1), P(-1, 1))
    assert q == P(1, 1) and r.scale() == 0
    q, r = divide(P(0, 0, 0, 1), P(0, 0, 1))
    assert q == P(0, 1) and r.scale() == 0
    q, r = divide(P(-4, 8, -5, 1), P(-2, 1))
    assert q.allclose(P(2, -3, 1)) and r.scale() < 1e-14
    with pytest.raises(ZeroDivisionError):
        divide(P(1, 1), Poly())


def test_divide_overflow_raises():
    with pytest.raises(OverflowError):
        divide(P(1e300, 1e300, 1), P(1e-300, 1e-10))


def test_exact_divide_rejects_remainder():
    with pytest.raises(ArithmeticError):
        exact_divide(P(1, 0, 1), P(-1, 1))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10), min_size=1, max_size=10),
       st.lists(st.complex_numbers(max_magnitude=10), min_size=1, max_size=6))
def test_divide_multiply_inverse(pc, dc):
    p, d = Poly(pc), Poly(dc)
    if d.is_zero() or abs(d.lead) < 1e-3 * d.scale():
        return
    try:
        quot, rem = divide(p, d)
    except OverflowError:
        assert abs(d.lead) < 1e-290
        return
    back = multiply(quot, d) + rem
    # Error scales with the quotient, which grows when d has a large root.
    size = max(p.coeffs.size, back.coeffs.size)
    diff = np.zeros(size, complex)
    diff[: back.coeffs.size] += back.coeffs
    diff[: p.coeffs.size] -= p.coeffs
    bound = 1e-12 * (np.abs(quot.coeffs).sum() * np.abs(d.coeffs).sum() + np.abs(rem.coeffs).sum()
                     + np.abs(p.coeffs).sum()) + 1e-300  # subnormal floor
    assert np.abs(diff).max(initial=0.0) <= bound


# -- gcd --------------------------------------------------------------------

def test_gcd_numeric():
    assert gcd_numeric(P(0, 0, 0, 1), P(0, 0, 3)) == P(0, 0, 1)
    assert gcd_numeric(P(-1, 0, 1), P(-2, 1)) == P(1)
    g = gcd_numeric(from_roots([2, 2, 5]), from_roots([2, 7]))
    assert g.allclose(P(-2, 1), 1e-9)
    # Oracle: the gcd divides both inputs exactly.
    exact_divide(from_roots([2, 2, 5]), g)
    exact_divide(from_roots([2, 7]), g)


# -- sylvester / resultant ---------------------------------------------------

def test_sylvester_layout():
    S = sylvester_matrix(P(-1, 0, 1), P(-2, 1))
    assert S.shape == (3, 3)
    np.testing.assert_array_equal(S, [[1, 0, -1], [1, -2, 0], [0, 1, -2]])
    np.testing.assert_array_equal(sylvester_matrix(P(0, 1), P(0, 1)), [[1, 0], [1, 0]])
    with pytest.raises(ValueError):
        sylvester_matrix(Poly(), P(1, 1))


def test_resultant_examples():
    assert abs(resultant(P(-1, 0, 1), P(-1, 1))) < 1e-14
    assert resultant(P(-1, 0, 1), P(-2, 1)) == pytest.approx(3)
    # Product formula oracle: prod over roots of q1 of q2(root), q1 monic.
    assert resultant(P(-1, 0, 1), P(-2, 1)) == pytest.approx((1 - 2) * (-1 - 2))


@pytest.mark.parametrize("b, c", [(1.0, 2.0), (-3 + 1j, 0.5j), (0.0, -1.0), (2.0, 1.0)])
def test_resultant_quadratic_discriminant(b, c):
    # Expanding the 3x3 determinant symbolically gives 4c - b^2.
    assert resultant(P(c, b, 1), P(b, 2)) == pytest.approx(4 * c - b * b)


@pytest.mark.parametrize("seed", range(20))
def test_resultant_common_root_equivalence(seed):
    rng = np.random.default_rng(seed)
    r1 = random_separated_roots(rng, int(rng.integers(1, 5)), 3.0, 0.3)
    r2 = [z + 0.5 for z in random_separated_roots(rng, int(rng.integers(1, 5)), 3.0, 0.3)]
    # Keep the pair coprime by construction.
    if min(abs(a - b) for a in r1 for b in r2) < 0.2:
        return
    assert abs(resultant(from_roots(r1), from_roots(r2))) > 0
    r2[0] = r1[0]
    assert normalized_resultant(from_roots(r1), from_roots(r2)) <= 1e-8


def test_sylvester_dimension_property():
    rng = np.random.default_rng(3)
    for _ in range(20):
        d1, d2 = rng.integers(1, 8, size=2)
        q1 = Poly(rng.normal(size=d1 + 1) + 1.0)
        q2 = Poly(rng.normal(size=d2 + 1) + 1.0)
        assert sylvester_matrix(q1, q2).shape == (q1.degree + q2.degree,) * 2


@pytest.mark.parametrize("seed", range(30))
def test_discriminant_detects_double_roots(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 6))
    roots = random_separated_roots(rng, k, 2.0, 0.3)
    planted = seed % 2 == 0
    if planted:
        roots = roots + [roots[0]]
    p = from_roots(roots)
    disc_small = normalized_resultant(p, derivative(p)) <= 1e-12
    rs = find_roots(p)
    assert disc_small == planted
    assert (rs.multiplicities.max() >= 2) == planted


# -- roots ------------------------------------------------------------------

def test_find_roots_examples():
    rs = find_roots(P(-4, 0, 1))
    assert match_error(rs.roots, [2, -2]) < 1e-14
    rs = find_roots(P(0, 0, 0, 1))
    assert list(rs.roots) == [0] and list(rs.multiplicities) == [3]
    t0 = 0.5j
    rs = find_roots(P(t0, -(1 + 2 * t0), 1))
    assert list(rs.multiplicities) == [2]
    assert abs(rs.roots[0] - (1 + 1j) / 2) < 1e-7
    assert residual_ok(P(t0, -(1 + 2 * t0), 1), rs)


def test_find_roots_rejects_constants():
    with pytest.raises(ValueError):
        find_roots(P(3))


def test_find_roots_reports_nonconvergence():
    p = from_roots(np.exp(2j * np.pi * np.arange(12) / 12) * 3)
    with pytest.raises(RootFindingError) as info:
        find_roots(p, max_iters=1)
    assert len(info.value.best.residuals) > 0


def test_from_roots():
    assert from_roots([1, -1]) == P(-1, 0, 1)
    assert from_roots([]) == P(1)
    assert from_roots([2, 2, 5]) == P(-20, 24, -9, 1)


@pytest.mark.parametrize("seed", range(200))
def test_roots_round_trip(seed):
    rng = np.random.default_rng(seed)
    roots = random_separated_roots(rng, int(rng.integers(1, 11)))
    p = from_roots(roots)
    rs = find_roots(p)
    assert rs.count == p.degree
    assert match_error(rs.expanded(), roots) <= 1e-8
    assert residual_ok(p, rs)


def test_taylor_shift():
    p = P(1, -2, 0, 3)
    a = 0.7 - 0.2j
    shifted = taylor_shift(p, a)
    for z in [0, 1, 2j, -0.5 + 0.1j]:
        assert evaluate(shifted, z) == pytest.approx(evaluate(p, a + z))
