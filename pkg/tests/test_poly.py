from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cbtrace.poly import Poly, linear_form, monomials
from cbtrace.scalars import GaussianRational, Q

small = st.integers(-4, 4)


@st.composite
def polys(draw, rank=2, deg=3):
    terms = {}
    for _ in range(draw(st.integers(0, 4))):
        e = tuple(draw(st.integers(0, deg)) for _ in range(rank))
        terms[e] = GaussianRational(draw(small), draw(small))
    return Poly(rank, terms)


@given(polys(), polys(), polys())
def test_ring_axioms(f, g, h):
    assert (f + g) * h == f * h + g * h
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f - f == Poly.zero(2)


@given(polys(), st.lists(st.fractions(-3, 3, max_denominator=4), min_size=2, max_size=2))
def test_shift_composes_and_matches_evaluation(f, v):
    w = [-x for x in v]
    assert f.shift(v).shift(w) == f
    pt = [0.3, -1.1]
    assert abs(f.shift(v).evaluate(pt) - f.evaluate([a + float(b) for a, b in zip(pt, v)])) < 1e-8


@given(polys())
def test_conj_negate_is_involution(f):
    assert f.conj_negate().conj_negate() == f
    pt = [0.7, 0.2]
    assert abs(f.conj_negate().evaluate(pt) - np.conj(f.evaluate([-0.7, -0.2]))) < 1e-9


@given(polys(), polys())
def test_derivative_leibniz(f, g):
    assert (f * g).derivative(0) == f.derivative(0) * g + f * g.derivative(0)


@given(polys())
def test_json_round_trip(f):
    assert Poly.from_json(f.to_json()) == f


def test_degree_and_zero():
    assert Poly.zero(1).degree() == -1
    assert (Poly.var(2, 0) ** 3 + Poly.const(2, 1)).degree() == 3
    assert not Poly(2, {(1, 0): GaussianRational(0)}).terms


def test_monomial_order():
    assert monomials(2, 2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert len(monomials(3, 4)) == 35


def test_linear_form_and_substitute():
    f = linear_form([1, 2], Q("1/2"))
    assert f.evaluate([1, 1]) == 3.5
    g = f.substitute([Poly.var(1, 0), Poly.var(1, 0)])
    assert g == linear_form([3], Q("1/2"))


def test_rank_mismatch_raises():
    with pytest.raises(ValueError):
        Poly.var(1, 0) + Poly.var(2, 0)
