from hypothesis import given
from hypothesis import strategies as st

from oracles import laurent_mul_naive
from strategies import laurent

from lagcap.laurent import GradingParams, LaurentGF2, lp_add, lp_mul, monomial_action, monomial_degree

import pytest

T = LaurentGF2.monomial


def lp(*exps):
    return LaurentGF2.from_terms(exps)


def test_addition_examples():
    assert lp_add(lp(0, 1), T(1)) == LaurentGF2.one()
    assert lp_add(LaurentGF2.zero(), lp(-2, 5)) == lp(-2, 5)
    assert lp_add(lp(-1, 2), lp(2, 3)) == lp(-1, 3)


def test_multiplication_examples():
    assert lp_mul(lp(0, 1), lp(0, 1)) == lp(0, 2)
    assert lp_mul(T(3), T(-5)) == T(-2)
    assert lp_mul(lp(0, 4, 7), LaurentGF2.zero()).is_zero()


def test_canonical_form():
    assert lp(3, 1, 3, 2) == LaurentGF2((1, 2))
    assert hash(lp(2, 1)) == hash(lp(1, 2))
    assert str(LaurentGF2.zero()) == "0"


def test_grading_examples():
    p2 = GradingParams(2, 0.5)
    assert monomial_degree(3, 2, p2) == -1
    assert monomial_degree(4, 0, GradingParams(3, 1.0)) == 4
    assert monomial_degree(0, -1, p2) == 2
    assert monomial_action(0.0, 1, p2) == -1.0
    assert monomial_action(0.3, 0, p2) == 0.3
    assert monomial_action(0.0, -1, p2) == 1.0


def test_params_derive_a0():
    assert GradingParams(4, 0.25).a0 == 1.0
    with pytest.raises(ValueError):
        GradingParams(1, 1.0)
    with pytest.raises(ValueError):
        GradingParams(2, 0.0)


@given(laurent, laurent, laurent)
def test_ring_axioms(p, q, r):
    assert lp_add(lp_add(p, q), r) == lp_add(p, lp_add(q, r))
    assert lp_add(p, q) == lp_add(q, p)
    assert lp_add(p, p).is_zero()
    assert lp_mul(p, lp_add(q, r)) == lp_add(lp_mul(p, q), lp_mul(p, r))
    assert lp_mul(lp_mul(p, q), r) == lp_mul(p, lp_mul(q, r))
    assert lp_mul(p, q) == lp_mul(q, p)


@given(laurent, laurent)
def test_product_matches_naive(p, q):
    assert set(lp_mul(p, q).exponents) == laurent_mul_naive(set(p.exponents), set(q.exponents))


@given(st.integers(-50, 50))
def test_monomials_invertible(a):
    assert lp_mul(T(a), T(a).inverse()) == LaurentGF2.one()
    assert T(a).inverse() == T(-a)


@given(st.integers(-10, 10), st.integers(-5, 5), st.integers(-5, 5), st.integers(2, 6))
def test_degree_shift_composes(d, r1, r2, N):
    p = GradingParams(N, 0.5)
    assert monomial_degree(d, r1 + r2, p) == monomial_degree(monomial_degree(d, r1, p), r2, p)


@given(st.integers(-20, 20).map(lambda k: k / 8), st.integers(-5, 5), st.sampled_from([0.5, 0.25, 1.0]))
def test_action_periodicity(a, r, tau):
    p = GradingParams(2, tau)
    assert monomial_action(a, r + 1, p) == monomial_action(a, r, p) - p.a0
