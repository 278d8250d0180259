"""Exact polynomial and truncated bivariate series arithmetic."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from traceforge.polyring import (
    BiSeries,
    CommPoly,
    VarSet,
    poly_from_text,
    poly_to_text,
    series_add,
    series_inv_geom,
    series_mul,
)

VS = VarSet(("a", "b", "c"))


def mk(*terms):
    return CommPoly(VS, {m: Fraction(c) for m, c in terms})


def test_varset_rejects_duplicates():
    with pytest.raises(ValueError):
        VarSet(("a", "a"))


def test_basic_ring_ops():
    p = mk(((1, 0, 0), 1), ((0, 1, 0), -2))
    q = mk(((0, 0, 1), 3))
    assert (p + q) - q == p
    assert p * q == mk(((1, 0, 1), 3), ((0, 1, 1), -6))
    assert (p - p).is_zero()
    assert p.scale(0).is_zero()
    assert p.degree() == 1
    assert (p * p).degree() == 2
    assert p.coeff((0, 1, 0)) == -2
    assert p.coeff((5, 5, 5)) == 0


def test_zero_coefficients_are_dropped():
    p = mk(((1, 0, 0), 1))
    q = mk(((1, 0, 0), -1))
    assert len(p + q) == 0
    assert CommPoly(VS, {(0, 0, 0): Fraction(0)}).is_zero()


def test_text_round_trip_fixed():
    p = mk(((2, 0, 1), Fraction(7, 3)), ((0, 0, 0), -1))
    assert poly_from_text(VS, poly_to_text(p)) == p
    assert poly_to_text(mk()) == ""
    assert poly_from_text(VS, "") == mk()


def test_text_rejects_malformed():
    with pytest.raises(ValueError):
        poly_from_text(VS, "1/2 1 2")  # wrong arity
    with pytest.raises(ValueError):
        poly_from_text(VS, "1/2 1 0 0\n1/3 1 0 0")  # duplicate monomial
    with pytest.raises(ValueError):
        poly_from_text(VS, "1/2 -1 0 0")  # negative exponent


coeffs = st.fractions(
    min_value=-100, max_value=100, max_denominator=50
).filter(lambda f: f != 0)
monos = st.tuples(*(st.integers(0, 5) for _ in range(3)))
polys = st.dictionaries(monos, coeffs, max_size=8).map(
    lambda d: CommPoly(VS, d)
)


@settings(max_examples=60, deadline=None)
@given(polys)
def test_text_round_trip(p):
    assert poly_from_text(VS, poly_to_text(p)) == p


@settings(max_examples=40, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert p * (q + r) == p * q + p * r
    assert (p * q) * r == p * (q * r)


def test_series_inverse_of_geometric_factor():
    D = 6
    s = series_inv_geom(1, 1, D)
    # multiply back by (1 - t^1 u^1): result is 1 up to the cutoff
    one_minus = BiSeries(D, {(0, 0): Fraction(1), (1, 1): Fraction(-1)})
    prod = series_mul(s, one_minus)
    assert prod == BiSeries(D, {(0, 0): Fraction(1)})


def test_series_inv_geom_rejects_constant():
    with pytest.raises(ValueError):
        series_inv_geom(0, 0, 5)


def test_series_degree_mismatch():
    with pytest.raises(ValueError):
        series_add(BiSeries(3), BiSeries(4))
    with pytest.raises(ValueError):
        series_mul(BiSeries(3), BiSeries(4))
