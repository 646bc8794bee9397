from __future__ import annotations

import cmath
import math

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from cbtrace.algebra import CoulombData
from cbtrace.lattice import lines_with_coweights
from cbtrace.poly import Poly, monomials
from cbtrace.scalars import GaussianRational as G
from cbtrace.scalars import Q, root_of_unity
from cbtrace.series import (
    ExponentialFraction,
    GeneratingSeries,
    check_generating_ode,
    decay_and_boundedness_check,
    exp_linear,
    fit_series_to_fraction,
    generating_series,
    reduce_fraction,
    twist_shift,
)
from cbtrace.traces import TraceFunctional, solve_trace_space
from cbtrace.weights import quadrature_functional

from instances import sech, triple


def sech_trace(degree=10):
    T = solve_trace_space(sech(), degree=degree, mode="exact").basis[0]
    return T.normalized().scaled(Q(1) / 2)


def frac(num, den):
    return ExponentialFraction(1, {(Q(m),): Poly.const(1, c) for m, c in num.items()}, den)


def test_zero_trace_gives_zero_series():
    assert not generating_series(TraceFunctional.zero(2, 4), 4).coeffs


def test_sech_series_coefficients():
    u = generating_series(sech_trace(), 4)
    assert u.coeffs == {(0,): G(Q("1/2")), (2,): G(Q("-1/16")), (4,): G(Q("5/768"))}
    y = sympy.Symbol("y")
    ref = sympy.series(1 / (2 * sympy.cosh(y / 2)), y, 0, 11).removeO()
    u10 = generating_series(sech_trace(), 10)
    for k in range(11):
        c = u10.coeff((k,))
        assert sympy.Rational(int(c.re.numerator), int(c.re.denominator)) == ref.coeff(y, k)


def test_overflow_raises():
    with pytest.raises(ValueError, match="exceeds"):
        generating_series(TraceFunctional.zero(1, 3), 5)


def test_shift_and_multiplication_rules():
    T = sech_trace(10)
    u = generating_series(T, 8)
    lam = [Q(2)]
    shifted = TraceFunctional(1, 8, {a: T(Poly.monomial(a).shift(lam)) for a in monomials(1, 8)}, "exact")
    assert generating_series(shifted, 8) == (exp_linear(lam, 1, 8) * u)
    times_z = TraceFunctional(1, 9, {a: T(Poly.monomial((a[0] + 1,))) for a in monomials(1, 9)}, "exact")
    assert generating_series(times_z, 8).coeffs == generating_series(T, 9).derivative(0).coeffs


def test_ode_examples():
    data = sech()
    u = generating_series(sech_trace(), 10)
    for lam in (1, -1, 2, -2):
        assert check_generating_ode(data, u, (lam,)).is_zero()
    assert check_generating_ode(data, GeneratingSeries(1, 6, {}), (1,)).is_zero()
    with pytest.raises(ValueError, match="order"):
        check_generating_ode(data, u.truncate(3), (2,))


def test_ode_detects_a_wrong_series():
    u = generating_series(sech_trace(), 10)
    bad = u + GeneratingSeries(1, 10, {(2,): G(Q("1/1000"))})
    assert not check_generating_ode(sech(), bad, (1,)).is_zero()


def test_ode_rank1_kernel_characterization():
    # P_1 = (z + 1/4)(z - 1/4); numerators e^{-b y} with P(-b) = 0 solve the equation
    data = CoulombData.build([(1,), (1,)], [Q("1/4"), Q("-1/4")], [Q("1/3")], normalize=False)
    s = data.phase((1,))
    good = frac({Q("-1/4"): 2, Q("1/4"): G(1, 1)}, [((1,), s)]).taylor(10)
    assert check_generating_ode(data, good, (1,)).is_zero()
    bad = frac({Q("1/3"): 1}, [((1,), s)]).taylor(10)
    assert not check_generating_ode(data, bad, (1,)).is_zero()


def test_fit_sech_exact():
    data = sech()
    fit = fit_series_to_fraction(generating_series(sech_trace(), 10), lines_with_coweights(data.weights), data)
    assert fit.exact and fit.residual == 0
    nz = {mu: S for mu, S in fit.fraction.numerator.items() if S}
    assert nz == {(Q(0),): Poly.const(1, 1)}
    assert complex(fit.fraction.denominator[0][1]) == -1


def test_fit_zero_series():
    data = sech()
    fit = fit_series_to_fraction(GeneratingSeries(1, 6, {}), lines_with_coweights(data.weights), data)
    assert not any(fit.fraction.numerator.values())


def test_fit_underdetermined_raises():
    data = triple()
    u = generating_series(quadrature_functional(data, degree=2), 2)
    with pytest.raises(ValueError, match="underdetermined"):
        fit_series_to_fraction(u, lines_with_coweights(data.weights), data)


def test_moment_consistency_d2():
    data = triple()
    u = generating_series(quadrature_functional(data, degree=8, tol=1e-12), 8)
    fit = fit_series_to_fraction(u, lines_with_coweights(data.weights), data)
    assert fit.residual < 1e-8
    assert decay_and_boundedness_check(fit.fraction).verdict == "decaying"
    back = fit.fraction.taylor(8)
    for a in monomials(2, 8):
        diff = abs(complex(back.coeff(a)) - complex(u.coeff(a))) * math.factorial(a[0]) * math.factorial(a[1])
        assert diff < 1e-7


def test_decay_examples():
    s = G(-1)
    assert decay_and_boundedness_check(frac({0: 1}, [((1,), s)])).verdict == "decaying"
    v = decay_and_boundedness_check(frac({1: 1}, [((1,), s)]))
    assert v.verdict == "unbounded" and v.witness[0] == (Q(1),)
    poly_num = ExponentialFraction(1, {(Q("1/2"),): Poly.var(1, 0)}, [((1,), s)])
    assert decay_and_boundedness_check(poly_num).verdict == "unbounded"
    assert decay_and_boundedness_check(frac({Q("1/2"): 1}, [((1,), s)])).verdict == "bounded"


def test_reduce_decaying_is_single_term():
    f = frac({0: 1}, [((1,), G(-1))])
    red = reduce_fraction(f)
    assert red.verdict == "reduced" and len(red.terms) == 1
    shift, q, g = red.terms[0]
    assert shift == (Q(0),) and q == {(0,): G(1)} and g is f


def test_reduce_telescoping_example():
    s = G(0, 1)
    f = frac({Q("3/2"): 1}, [((1,), s)])
    red = reduce_fraction(f)
    shifts = sorted(t[0][0] for t in red.terms)
    assert shifts == [Q("1/2"), Q(1)]
    point = next(t for t in red.terms if t[0] == (Q(1),))
    assert not point[2].denominator and point[1] == {(0,): G(1)}
    main = next(t for t in red.terms if t[0] == (Q("1/2"),))
    assert main[2].numerator == {(Q(0),): Poly.const(1, s)}


@given(
    st.lists(st.fractions(-3, 3, max_denominator=2), min_size=1, max_size=3, unique=True),
    st.lists(st.sampled_from([Q("1/3"), Q("1/2"), Q("1/5"), Q("3/4")]), min_size=1, max_size=3),
    st.lists(st.sampled_from([1, -1, 2]), min_size=3, max_size=3),
)
def test_reduce_rank1_is_an_identity(mus, zetas, lams):
    den = [((lam,), root_of_unity(z)) for lam, z in zip(lams, zetas)]
    f = frac({Q(m): 1 for m in mus}, den)
    red = reduce_fraction(f)
    assert red.verdict == "reduced"
    for _, _, g in red.terms:
        if g.denominator:
            assert decay_and_boundedness_check(g).verdict == "decaying"
    for y in (0.37, -1.3, 2.2):
        assert abs(red.evaluate([y]) - f.evaluate([y])) < 1e-9 * max(1, abs(f.evaluate([y])))


def test_reduce_rank2_fallback():
    s = G(-1)
    f = ExponentialFraction(2, {(Q(2), Q(0)): Poly.const(2, 1)}, [((1, 0), s), ((0, 1), s)])
    assert reduce_fraction(f).verdict == "unreduced"


@pytest.mark.parametrize("eta", [Q("1/4"), Q("1/3"), Q("-1/6")])
def test_twist_shift_generates_twisted_trace(eta):
    data = sech()
    f = fit_series_to_fraction(generating_series(sech_trace(), 10), lines_with_coweights(data.weights), data).fraction
    g = twist_shift(f, [eta])
    moved = data.with_zeta([data.zeta[0] + eta])
    assert check_generating_ode(moved, g.taylor(10), (1,)).is_zero()
    y = 0.41
    assert abs(g.evaluate([y]) - f.evaluate([y - 2j * cmath.pi * float(eta)])) < 1e-12
