"""Tests for truncated multivariate series."""

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Poly

from parahilb.errors import OrderMismatchError, TruncationError
from parahilb.lattice import IndexVector, Window
from parahilb.series import (
    L,
    Z,
    MultiDegree,
    MultiSeries,
    TruncationOrder,
    expand_factor,
    format_poly,
    mul,
    product,
)

ORDER = TruncationOrder.uniform(3, Window(-1, 2), 1)


def x0(k: int = 1, z: int = 0) -> MultiDegree:
    return MultiDegree.of(z, k)


term_keys = st.tuples(
    st.integers(0, 3),
    st.integers(0, 3),
    st.tuples(st.integers(0, 1), st.integers(0, 1)),
)
series = st.dictionaries(term_keys, st.integers(-5, 5), max_size=8).map(
    lambda terms: MultiSeries(ORDER, terms)
)


def test_multidegree_validation():
    """Test that negative exponents and x at level 0 are rejected."""
    assert MultiDegree.of(1, 2, {1: 0}) == MultiDegree(1, 2)
    with pytest.raises(TruncationError):
        MultiDegree.of(-1, 0)
    with pytest.raises(TruncationError):
        MultiDegree.of(0, 1, {-1: -2})
    with pytest.raises(TruncationError):
        MultiDegree.of(0, 1, {0: 1})


def test_truncation_order_needs_caps_for_window_levels():
    """Test that caps must cover exactly the window levels."""
    window = Window(-1, 2)
    with pytest.raises(TruncationError):
        TruncationOrder(2, window, ((1, 1),))
    with pytest.raises(TruncationError):
        TruncationOrder(-1, window, ((-1, 1), (1, 1)))
    order = TruncationOrder(2, window, ((1, 3), (-1, 0)))
    assert order.caps == ((-1, 0), (1, 3))
    assert order.to_json() == {"n0": 2, "window": [-1, 2], "caps": {"-1": 0, "1": 3}}


def test_order_around_vector():
    """Test the tightest order containing x^v."""
    order = TruncationOrder.around(IndexVector({0: 2, 2: 1}))
    assert order.n0 == 2
    assert order.window == Window(-1, 3)
    assert dict(order.caps) == {-1: 0, 1: 0, 2: 1}


def test_monomial_outside_order():
    """Test that a monomial beyond the order is an error, not a silent zero."""
    with pytest.raises(TruncationError):
        MultiSeries.monomial(1, x0(4), ORDER)
    with pytest.raises(TruncationError):
        MultiSeries.monomial(1, MultiDegree.of(0, 0, {2: 1}), ORDER)
    assert len(MultiSeries.monomial(3, x0(3), ORDER)) == 1


def test_mul_truncates():
    """Test that products drop terms beyond the order."""
    a = MultiSeries.monomial(1, x0(2), ORDER)
    assert len(a * a) == 0
    b = MultiSeries.monomial(2, MultiDegree.of(1, 1, {1: 1}), ORDER)
    assert len(b * b) == 0
    c = MultiSeries.monomial(2, MultiDegree.of(1, 1, {-1: 1}), ORDER)
    assert c * b == MultiSeries.monomial(4, MultiDegree.of(2, 2, {-1: 1, 1: 1}), ORDER)


def test_expand_factor_binomial():
    """Test (1 + c x^d)^e for positive and negative e."""
    cube = expand_factor(1, x0(), 3, ORDER)
    assert [c for _, c in cube.terms()] == [1, 3, 3, 1]

    geometric = expand_factor(-1, x0(z=2), -1, ORDER)
    assert [(d.z, d.x0, c) for d, c in geometric.terms()] == [
        (0, 0, 1),
        (2, 1, 1),
        (4, 2, 1),
        (6, 3, 1),
    ]

    with pytest.raises(TruncationError):
        expand_factor(1, MultiDegree.of(2, 0), -1, ORDER)


def test_inverse_factors_cancel():
    """Test (1 - x)(1 - x)^(-1) = 1."""
    d = MultiDegree.of(1, 1, {1: 1})
    inverse = expand_factor(-1, d, -1, ORDER)
    direct = expand_factor(-1, d, 1, ORDER)
    assert inverse * direct == MultiSeries.one(ORDER)
    assert product([], ORDER) == MultiSeries.one(ORDER)


def test_coefficients_do_not_overflow():
    """Test exact big-integer coefficients."""
    order = TruncationOrder.uniform(30, Window(-1, 1), 0)
    s = expand_factor(-1, MultiDegree.of(0, 1), -200, order)
    coeff = s.coefficient(IndexVector({0: 30}))
    assert coeff == Poly(sympy.binomial(229, 30), Z, domain="ZZ")
    assert int(sympy.binomial(229, 30)) > 2**63


def test_order_mismatch():
    """Test that series with different orders do not mix."""
    other = TruncationOrder.uniform(2, Window(-1, 2), 1)
    with pytest.raises(OrderMismatchError):
        MultiSeries.one(ORDER) + MultiSeries.one(other)
    with pytest.raises(OrderMismatchError):
        mul(MultiSeries.one(ORDER), MultiSeries.one(other))


def test_coefficient_extraction():
    """Test coefficient of x^v as a polynomial in z or L."""
    s = expand_factor(-1, MultiDegree.of(2, 1), -1, ORDER)
    s = s * expand_factor(-1, MultiDegree.of(0, 1), -1, ORDER)
    assert format_poly(s.coefficient(IndexVector({0: 2}))) == "1+z^2+z^4"
    assert format_poly(s.coefficient(IndexVector({0: 2}), L)) == "1+L^2+L^4"
    assert format_poly(s.coefficient(IndexVector({0: 1, 1: 1}))) == "0"
    with pytest.raises(TruncationError):
        s.coefficient(IndexVector({0: -1}))
    with pytest.raises(TruncationError):
        s.coefficient(IndexVector({0: 4}))


def test_specialize_zero():
    """Test setting every x_alpha to 0."""
    s = expand_factor(1, MultiDegree.of(0, 1, {1: 1}), 1, ORDER)
    s = s + expand_factor(1, MultiDegree.of(0, 1), 1, ORDER)
    special = s.specialize_zero()
    assert [(d.x0, d.x, c) for d, c in special.terms()] == [(0, (), 2), (1, (), 1)]


def test_format_poly():
    """Test ascending rendering with signs."""
    assert format_poly(Poly(1 + 2 * Z**2 + Z**4, Z)) == "1+2z^2+z^4"
    assert format_poly(Poly(-1 + Z - 3 * Z**2, Z)) == "-1+z-3z^2"
    assert format_poly(Poly(0, Z)) == "0"
    assert format_poly(Poly(L**3, L)) == "L^3"
    assert format_poly(7) == "7"


@settings(max_examples=50, deadline=None)
@given(series, series, series)
def test_ring_axioms(a, b, c):
    """Test that truncated multiplication is a commutative ring product."""
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == MultiSeries(ORDER)
    assert a * MultiSeries.one(ORDER) == a
