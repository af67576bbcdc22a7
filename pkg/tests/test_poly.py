import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cbc.poly import (
    PolyMatrix,
    Polynomial,
    VariableCountError,
    eval_monomials,
    gram_basis,
    mono_text,
    monomials_up_to,
    parse_monomial,
)

NV = 2
coeffs = st.floats(min_value=-5, max_value=5, allow_nan=False).filter(lambda c: c == 0 or abs(c) > 1e-6)
monos = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(monos, coeffs, max_size=6).map(lambda d: Polynomial(d, NV))
points = st.tuples(st.floats(-2, 2), st.floats(-2, 2)).map(np.array)


@given(polys, polys, polys)
def test_ring_axioms(p, q, r):
    assert (p + q).allclose(q + p)
    assert (p * q).allclose(q * p, atol=1e-8)
    assert ((p + q) + r).allclose(p + (q + r))
    assert ((p * q) * r).allclose(p * (q * r), atol=1e-6)
    assert (p * (q + r)).allclose(p * q + p * r, atol=1e-6)
    assert (p - p).is_zero()
    assert (p * Polynomial.constant(1.0, NV)).allclose(p)


@given(polys, polys, points)
def test_evaluation_is_a_homomorphism(p, q, x):
    assert np.isclose((p * q).eval(x), p.eval(x) * q.eval(x), rtol=1e-9, atol=1e-8)
    assert np.isclose((p + q).eval(x), p.eval(x) + q.eval(x), rtol=1e-9, atol=1e-9)


@given(polys)
def test_normalization_idempotent(p):
    assert p.normalized() == p.normalized().normalized()
    assert p.normalized() == p


@given(polys, st.lists(points, min_size=1, max_size=5))
def test_eval_many_matches_eval(p, pts):
    pts = np.array(pts)
    assert np.allclose(p.eval_many(pts), [p.eval(x) for x in pts])


def test_eval_example():
    p = Polynomial({(2, 0): 3.0, (1, 1): -1.0, (0, 0): 2.0}, 2)
    assert p.eval([2.0, 5.0]) == pytest.approx(3 * 4 - 10 + 2)
    assert p.degree == 2


def test_zero_coefficients_dropped():
    p = Polynomial({(1, 0): 1.0, (0, 1): 0.0}, 2)
    assert p.monomials() == [(1, 0)]
    assert (Polynomial.var(0, 2) - Polynomial.var(0, 2)).terms == {}


def test_mixed_variable_count_rejected():
    with pytest.raises(VariableCountError):
        Polynomial.var(0, 2) + Polynomial.var(0, 3)


def test_quadratic_form():
    P = np.array([[2.0, 0.5], [0.5, 1.0]])
    B = Polynomial.quadratic_form(P)
    assert B.coeff((2, 0)) == 2.0 and B.coeff((1, 1)) == 1.0 and B.coeff((0, 2)) == 1.0
    x = np.array([0.3, -0.7])
    assert B.eval(x) == pytest.approx(x @ P @ x)


def test_monomials_up_to_counts():
    # binomial(n + d, d)
    assert len(monomials_up_to(2, 3)) == 10
    assert len(monomials_up_to(3, 2)) == 10
    assert len(monomials_up_to(2, 3, min_deg=1)) == 9
    assert monomials_up_to(2, 1) == [(0, 0), (0, 1), (1, 0)]


def test_gram_basis_examples():
    assert gram_basis(2, 1) == [(0, 0), (0, 1), (1, 0)]
    # 2 state variables + 2 lifting variables, degree <= 2, exactly linear in the lifting ones
    lifted = gram_basis(4, 2, linear_in=[2, 3])
    assert len(lifted) == 2 * 3
    assert all(m[2] + m[3] == 1 for m in lifted)
    with pytest.raises(ValueError):
        gram_basis(2, -1)


def test_monomial_text_round_trip():
    for m in monomials_up_to(3, 3):
        assert parse_monomial(mono_text(m), 3) == m
    assert mono_text((2, 0, 1)) == "x1^2*x3"
    with pytest.raises(ValueError):
        parse_monomial("x4", 3)
    with pytest.raises(ValueError):
        parse_monomial("y1", 3)


def test_eval_monomials_shape():
    out = eval_monomials([(1, 0), (1, 1)], np.array([[2.0, 3.0], [1.0, -1.0]]))
    assert np.allclose(out, [[2.0, 6.0], [1.0, -1.0]])


def test_polymatrix_product_and_transpose():
    x1, x2 = Polynomial.var(0, 2), Polynomial.var(1, 2)
    A = PolyMatrix([[x1, x2], [Polynomial.constant(1.0, 2), x1 * x2]], 2)
    v = PolyMatrix([[x1], [x2]], 2)
    prod = A @ v
    pt = np.array([0.5, -2.0])
    assert np.allclose(prod.eval(pt), A.eval(pt) @ v.eval(pt))
    assert np.allclose(A.T().eval(pt), A.eval(pt).T)
    N = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.allclose((N @ A).eval(pt), N @ A.eval(pt))
    assert np.allclose((A @ N).eval(pt), A.eval(pt) @ N)
