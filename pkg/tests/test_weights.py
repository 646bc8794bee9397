from __future__ import annotations

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from cbtrace.algebra import CoulombData
from cbtrace.poly import Poly
from cbtrace.scalars import GaussianRational as G
from cbtrace.scalars import Q
from cbtrace.weights import (
    WeightFunction,
    admissible_numerator_exponents,
    calibrate_rho_offset,
    numerator_nonnegativity,
    quadrature_functional,
    quadrature_trace,
)

from instances import five_imaginary, sech, triple


def test_admissible_exponents_examples():
    assert admissible_numerator_exponents(sech()) == [(0,)]
    assert admissible_numerator_exponents(sech().with_zeta([0])) == []
    three = CoulombData.build([(1,)] * 3, [0, 0, 0], [Q("3/2")])
    assert admissible_numerator_exponents(three) == [(-1,), (0,), (1,)]


def test_sech_closed_form():
    wf = WeightFunction.for_data(sech())
    x = np.linspace(-3, 3, 13)[:, None]
    assert np.allclose(wf(x), 0.5 / np.cosh(np.pi * x[:, 0]), rtol=1e-13, atol=0)


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
def test_sech_moments_euler(k):
    val = quadrature_trace(sech(), WeightFunction.for_data(sech()), Poly.monomial((2 * k,)), tol=1e-12)
    expect = int(sympy.euler(2 * k)) / (2 * 4**k)
    assert abs(val - expect) < 1e-9 * max(1, abs(expect))


def test_odd_moment_vanishes():
    assert abs(quadrature_trace(sech(), WeightFunction.for_data(sech()), Poly.monomial((3,)))) < 1e-12


@pytest.mark.parametrize("data", [sech(), triple(), five_imaginary()], ids=["sech", "triple", "five"])
def test_quasi_periodicity(data):
    rng = np.random.default_rng(11)
    wf = WeightFunction.for_data(data, {m: 1 for m in admissible_numerator_exponents(data)})
    d = data.d
    x = rng.uniform(-1.5, 1.5, (100, d))
    for lam in [tuple(int(v) for v in rng.integers(-2, 3, d)) for _ in range(6)]:
        phase = complex(data.phase(lam))
        lhs = wf(x + 1j * np.array(lam, dtype=float))
        rhs = phase * wf(x)
        assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_decay_violation_and_pole_raise():
    bad = WeightFunction.for_data(sech(), {(1,): 1})
    with pytest.raises(ValueError, match="decay"):
        quadrature_functional(sech(), bad)
    edge = CoulombData.build([(1,), (1,)], [Q("1/2"), Q("-1/2")], [1])
    with pytest.raises(ValueError, match="1/2"):
        quadrature_functional(edge)


def test_quadrature_stable_under_box_enlargement():
    data = triple()
    T = quadrature_functional(data, degree=4, tol=1e-10)
    assert T.meta["converged"]
    from cbtrace import weights

    L = T.meta["box_half_width"]
    n = T.meta["nodes_per_panel"]
    wf = WeightFunction.for_data(data)
    wide = weights._moments(wf, 4, 1.25 * L, n)
    assert max(abs(wide[k] - complex(T.moment(k))) for k in wide) < 1e-10


def test_weight_json_round_trip():
    data = five_imaginary()
    wf = WeightFunction.for_data(data, {(0,): G(1, Q("1/3")), (2,): 2})
    back = WeightFunction.from_json(wf.to_json(), data)
    assert back == wf


@pytest.mark.parametrize(
    "num,verdict",
    [
        ({(0,): 1}, "certified"),
        ({(-2,): 1, (-1,): 2, (0,): 1}, "certified"),
        ({(1,): 1}, "refuted"),
        ({(0,): 1, (1,): 2, (2,): 1, (3,): 1}, "refuted"),
        ({(0,): -1}, "refuted"),
        ({(0,): 1, (2,): -3, (4,): 3}, "certified"),
    ],
)
def test_nonnegativity_rank1(num, verdict):
    assert numerator_nonnegativity(num).verdict == verdict


def test_nonnegativity_rank2():
    assert numerator_nonnegativity({(2, 0): 1, (0, 2): 3}).verdict == "certified"
    res = numerator_nonnegativity({(1, 0): 1, (0, 0): Q("1/10")}, seed=1)
    assert res.verdict == "refuted" and res.witness is not None
    x, y = res.witness
    assert x + 0.1 < 0
    assert numerator_nonnegativity({(2, 0): 1, (1, 1): -1, (0, 2): 1}, seed=2).verdict == "likely"


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=3).filter(any))
def test_nonnegativity_of_squares(coeffs):
    # (sum c_k y^k)^2 is nonnegative on the real line
    p = sympy.Poly(sum(c * sympy.Symbol("y") ** k for k, c in enumerate(coeffs)) ** 2, sympy.Symbol("y"))
    num = {(k,): int(c) for (k,), c in zip(p.monoms(), p.coeffs())}
    if num:
        assert numerator_nonnegativity(num).verdict == "certified"


def test_calibrated_offset_is_odd():
    assert calibrate_rho_offset() == 1
    assert sech().rho_offset == (1,)
