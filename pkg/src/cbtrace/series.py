"""Exponential generating functions of traces and exponential fractions.

For a trace ``T`` the generating function is
``u_T(y) = sum_alpha T(z^alpha) y^alpha / alpha!``.  It turns multiplication
by ``z_j`` into ``d/dy_j`` and ``T -> T o S_lam`` into multiplication by
``exp(lam . y)``, so the trace condition becomes the constant-coefficient
equation ``P_lam(d)(e^{lam/2} u) = exp(2 pi i zeta(lam)) P_lam(d)(e^{-lam/2} u)``.

Series are stored as ordinary Taylor coefficients ``alpha -> c_alpha``
truncated at a total order.  Coefficients are exact scalars or complex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .algebra import CoulombData, p_lambda
from .lattice import Zonotope
from .linalg import rref
from .poly import Poly, monomials
from .scalars import GaussianRational, Q, is_exact, root_of_unity
from .traces import TraceFunctional

__all__ = [
    "GeneratingSeries",
    "ExponentialFraction",
    "generating_series",
    "check_generating_ode",
    "fit_series_to_fraction",
    "decay_and_boundedness_check",
    "reduce_fraction",
    "twist_shift",
    "FitResult",
    "Reduction",
]


def _lift(x):
    """Exact rationals become GaussianRational so they mix with complex."""
    if isinstance(x, (int,)) or type(x).__name__ == "mpq":
        return GaussianRational(Q(x))
    return x


def _mul(a, b):
    if isinstance(a, complex) or isinstance(b, complex) or isinstance(a, float) or isinstance(b, float):
        return complex(a) * complex(b)
    return _lift(a) * _lift(b)


def _add(a, b):
    if isinstance(a, complex) or isinstance(b, complex) or isinstance(a, float) or isinstance(b, float):
        return complex(a) + complex(b)
    return _lift(a) + _lift(b)


def _is_zero(x) -> bool:
    return not x


def _factorial(alpha) -> int:
    out = 1
    for a in alpha:
        out *= math.factorial(a)
    return out


@dataclass
class GeneratingSeries:
    """Truncated power series ``sum_{|alpha| <= order} c_alpha y^alpha``."""

    rank: int
    order: int
    coeffs: dict

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.coeffs.values())

    def coeff(self, alpha):
        return self.coeffs.get(tuple(alpha), GaussianRational(0))

    def truncate(self, order: int) -> "GeneratingSeries":
        return GeneratingSeries(self.rank, order, {k: v for k, v in self.coeffs.items() if sum(k) <= order})

    def is_zero(self, tol: float | None = None) -> bool:
        if tol is None:
            return all(_is_zero(v) for v in self.coeffs.values())
        return self.max_abs() <= tol

    def max_abs(self) -> float:
        return max((abs(complex(v)) for v in self.coeffs.values()), default=0.0)

    def __add__(self, other: "GeneratingSeries") -> "GeneratingSeries":
        order = min(self.order, other.order)
        out = {}
        for src in (self.coeffs, other.coeffs):
            for k, v in src.items():
                if sum(k) <= order:
                    out[k] = _add(out[k], v) if k in out else v
        return GeneratingSeries(self.rank, order, _clean(out))

    def scale(self, c) -> "GeneratingSeries":
        return GeneratingSeries(self.rank, self.order, _clean({k: _mul(v, c) for k, v in self.coeffs.items()}))

    def __sub__(self, other: "GeneratingSeries") -> "GeneratingSeries":
        return self + other.scale(GaussianRational(-1))

    def __mul__(self, other: "GeneratingSeries") -> "GeneratingSeries":
        order = min(self.order, other.order)
        out: dict = {}
        for k1, v1 in self.coeffs.items():
            s1 = sum(k1)
            for k2, v2 in other.coeffs.items():
                if s1 + sum(k2) > order:
                    continue
                k = tuple(a + b for a, b in zip(k1, k2))
                p = _mul(v1, v2)
                out[k] = _add(out[k], p) if k in out else p
        return GeneratingSeries(self.rank, order, _clean(out))

    def derivative(self, j: int) -> "GeneratingSeries":
        out = {}
        for k, v in self.coeffs.items():
            if k[j]:
                e = list(k)
                e[j] -= 1
                out[tuple(e)] = _mul(v, k[j])
        return GeneratingSeries(self.rank, max(self.order - 1, -1), out)

    def apply_operator(self, P: Poly) -> "GeneratingSeries":
        """``P(d/dy) u``; the result is valid through order ``order - deg P``."""
        order = self.order - max(P.degree(), 0)
        out: dict = {}
        for gamma, c in P.terms.items():
            for k, v in self.coeffs.items():
                if any(a < g for a, g in zip(k, gamma)):
                    continue
                e = tuple(a - g for a, g in zip(k, gamma))
                if sum(e) > order:
                    continue
                mult = 1
                for a, g in zip(k, gamma):
                    mult *= math.perm(a, g)
                p = _mul(_mul(v, mult), c)
                out[e] = _add(out[e], p) if e in out else p
        return GeneratingSeries(self.rank, order, _clean(out))

    def inverse(self) -> "GeneratingSeries":
        """Multiplicative inverse; requires a nonzero constant term."""
        a0 = self.coeff((0,) * self.rank)
        if _is_zero(a0):
            raise ZeroDivisionError("series has zero constant term")
        inv0 = 1 / complex(a0) if isinstance(a0, complex) else _lift(a0).inverse()
        by_deg: dict[int, dict] = {}
        for k, v in self.coeffs.items():
            by_deg.setdefault(sum(k), {})[k] = v
        out: dict = {(0,) * self.rank: inv0}
        for deg in range(1, self.order + 1):
            acc: dict = {}
            for j in range(1, deg + 1):
                for k1, v1 in by_deg.get(j, {}).items():
                    for k2, v2 in out.items():
                        if sum(k2) != deg - j:
                            continue
                        k = tuple(a + b for a, b in zip(k1, k2))
                        p = _mul(v1, v2)
                        acc[k] = _add(acc[k], p) if k in acc else p
            for k, v in acc.items():
                out[k] = _mul(_mul(v, inv0), GaussianRational(-1))
        return GeneratingSeries(self.rank, self.order, _clean(out))

    def divide_linear(self, ell) -> "GeneratingSeries":
        """Exact quotient by the linear form ``ell . y`` (order drops by one).

        Raises
        ------
        ValueError
            If a homogeneous component is not divisible.
        """
        ell = [Q(x) for x in ell]
        j0 = next(j for j, a in enumerate(ell) if a)
        inv = _lift(1 / ell[j0])
        out: dict = {}
        by_deg: dict[int, dict] = {}
        for k, v in self.coeffs.items():
            by_deg.setdefault(sum(k), {})[k] = v
        for deg in range(0, self.order + 1):
            rem = dict(by_deg.get(deg, {}))
            # long division in the variable y_{j0}
            while rem:
                k = max(rem, key=lambda e: (e[j0], e))
                v = rem.pop(k)
                if _is_zero(v):
                    continue
                if k[j0] == 0:
                    if abs(complex(v)) > 1e-9 * max(1.0, self.max_abs()) or is_exact(v):
                        raise ValueError("series is not divisible by the linear form")
                    continue
                q = list(k)
                q[j0] -= 1
                q = tuple(q)
                c = _mul(v, inv)
                out[q] = _add(out[q], c) if q in out else c
                for j, a in enumerate(ell):
                    if j == j0 or not a:
                        continue
                    e = list(q)
                    e[j] += 1
                    e = tuple(e)
                    sub = _mul(c, _lift(-a))
                    rem[e] = _add(rem[e], sub) if e in rem else sub
                    if _is_zero(rem[e]):
                        del rem[e]
        return GeneratingSeries(self.rank, self.order - 1, _clean(out))

    def to_moments(self) -> dict:
        return {k: _mul(v, _factorial(k)) for k, v in self.coeffs.items()}

    def to_json(self) -> dict:
        from .scalars import format_rational

        terms = []
        for k in sorted(self.coeffs):
            v = self.coeffs[k]
            if is_exact(v) and hasattr(v, "re"):
                terms.append({"exp": list(k), "re": format_rational(v.re), "im": format_rational(v.im)})
            else:
                c = complex(v)
                terms.append({"exp": list(k), "re": c.real, "im": c.imag})
        return {"rank": self.rank, "order": self.order, "terms": terms}


def _clean(d: dict) -> dict:
    return {k: v for k, v in d.items() if not _is_zero(v)}


def exp_linear(v, rank: int, order: int) -> GeneratingSeries:
    """Taylor series of ``exp(v . y)`` for a rational vector ``v``."""
    v = [Q(x) for x in v]
    out = {}
    for alpha in monomials(rank, order):
        c = Q(1)
        for a, x in zip(alpha, v):
            c *= x**a
        if c:
            out[alpha] = GaussianRational(c / _factorial(alpha))
    return GeneratingSeries(rank, order, out)


def denominator_factor(lam, s, rank: int, order: int) -> GeneratingSeries:
    """Series of ``exp(lam.y/2) - s exp(-lam.y/2)``."""
    half = [Q(x) / 2 for x in lam]
    return exp_linear(half, rank, order) - exp_linear([-h for h in half], rank, order).scale(s)


def generating_series(T: TraceFunctional, order: int | None = None) -> GeneratingSeries:
    """Coefficients ``T(z^alpha)/alpha!`` through ``order``.

    Raises
    ------
    ValueError
        If ``order`` exceeds the trace's degree bound.
    """
    order = T.degree if order is None else order
    if order > T.degree:
        raise ValueError(f"order {order} exceeds the trace degree {T.degree}")
    out = {}
    for alpha in monomials(T.rank, order):
        v = T.moments.get(alpha)
        if v is None or _is_zero(v):
            continue
        f = _factorial(alpha)
        out[alpha] = complex(v) / f if isinstance(v, complex) else _lift(v) * GaussianRational(Q(1) / f)
    return GeneratingSeries(T.rank, order, out)


def check_generating_ode(data: CoulombData, u: GeneratingSeries, lam) -> GeneratingSeries:
    """``P_lam(d)(e^{lam/2} u) - exp(2 pi i zeta(lam)) P_lam(d)(e^{-lam/2} u)``.

    Valid through order ``u.order - deg P_lam``.

    Raises
    ------
    ValueError
        If the series order is below ``deg P_lam + 2``.
    """
    P = p_lambda(data, lam)
    if u.order < P.degree() + 2:
        raise ValueError(f"series order {u.order} < deg P_lam + 2 = {P.degree() + 2}")
    half = [Q(x) / 2 for x in lam]
    plus = (exp_linear(half, u.rank, u.order) * u).apply_operator(P)
    minus = (exp_linear([-h for h in half], u.rank, u.order) * u).apply_operator(P)
    phase = data.phase(lam)
    if not u.exact:
        phase = complex(phase)
    return plus - minus.scale(phase)


# exponential fractions -------------------------------------------------------------------


@dataclass
class ExponentialFraction:
    """``sum_mu S_mu(y) e^{mu.y} / prod_l (e^{lam_l.y/2} - s_l e^{-lam_l.y/2})``.

    ``numerator`` maps a rational vector ``mu`` to a :class:`Poly` (exact) or
    to a dict ``alpha -> complex`` (numeric fits).
    """

    rank: int
    numerator: dict
    denominator: list  # [(lam, s)]

    def _num_poly_items(self):
        for mu, S in self.numerator.items():
            if isinstance(S, Poly):
                yield mu, dict(S.terms)
            else:
                yield mu, dict(S)

    def numerator_series(self, order: int) -> GeneratingSeries:
        total = GeneratingSeries(self.rank, order, {})
        for mu, terms in self._num_poly_items():
            e = exp_linear(mu, self.rank, order)
            S = GeneratingSeries(self.rank, order, {k: v for k, v in terms.items() if sum(k) <= order})
            total = total + S * e
        return total

    def taylor(self, order: int) -> GeneratingSeries:
        """Taylor series at zero (requires regularity there)."""
        vanishing = [lam for lam, s in self.denominator if complex(s) == 1]
        F = self.numerator_series(order + len(vanishing))
        for lam, s in self.denominator:
            D = denominator_factor(lam, s, self.rank, F.order)
            if complex(s) == 1:
                # D = (lam . y) g with g(0) = 1
                g = D.divide_linear(lam)
                F = F.truncate(F.order).divide_linear(lam)
                F = F * g.truncate(F.order).inverse()
            else:
                F = F * D.truncate(F.order).inverse()
        return F.truncate(order)

    def evaluate(self, y) -> complex:
        y = np.asarray(y, dtype=complex)
        num = 0j
        for mu, terms in self._num_poly_items():
            s = sum(complex(c) * np.prod(y ** np.array(k)) for k, c in terms.items())
            num += s * np.exp(np.dot(np.array([float(m) for m in mu]), y))
        den = 1 + 0j
        for lam, s in self.denominator:
            t = np.dot(np.array(lam, dtype=float), y)
            den *= np.exp(t / 2) - complex(s) * np.exp(-t / 2)
        return complex(num / den)

    def polytope(self) -> Zonotope:
        """``sum_l [-1/2, 1/2] lam_l``."""
        return Zonotope.symmetrized([lam for lam, _ in self.denominator], self.rank)

    def nonzero_exponents(self, tol: float = 1e-8) -> list:
        out = []
        for mu, terms in self._num_poly_items():
            if any(abs(complex(c)) > tol for c in terms.values()):
                out.append(mu)
        return out

    def to_json(self) -> dict:
        from .scalars import format_rational

        num = []
        for mu, terms in sorted(self._num_poly_items()):
            coeffs = []
            for k in sorted(terms):
                c = terms[k]
                if is_exact(c) and hasattr(c, "re"):
                    coeffs.append({"exp": list(k), "re": format_rational(c.re), "im": format_rational(c.im)})
                else:
                    cc = complex(c)
                    coeffs.append({"exp": list(k), "re": cc.real, "im": cc.imag})
            num.append({"mu": [format_rational(Q(m)) for m in mu], "S": coeffs})
        den = [{"lambda": list(lam), "s": str(s)} for lam, s in self.denominator]
        return {"numerator": num, "denominator": den}


@dataclass
class FitResult:
    fraction: ExponentialFraction
    residual: float
    exact: bool
    support: list


def default_support(lines: list, rank: int) -> list:
    """Points of ``(Z/2)^d`` in the closed polytope ``sum_l [-1/2,1/2] lam_l``."""
    Z = Zonotope.symmetrized([ln.coweight for ln in lines], rank)
    box = Z.bounding_box()
    ranges = [range(math.floor(2 * lo), math.ceil(2 * hi) + 1) for lo, hi in box]
    out = []
    for pt in product(*ranges):
        mu = tuple(Q(p) / 2 for p in pt)
        if Z.contains(mu, strict=False):
            out.append(mu)
    return out


def fit_series_to_fraction(
    u: GeneratingSeries,
    lines: list,
    data: CoulombData,
    support: list | None = None,
    poly_degree: int = 0,
    exact: bool | None = None,
) -> FitResult:
    """Find numerator data ``S_mu`` so that the fraction's series matches ``u``.

    Solves ``prod_l D_l * u = sum_mu S_mu e^{mu.y}`` through order
    ``u.order`` with ``D_l = e^{lam_l/2} - exp(2 pi i zeta(lam_l)) e^{-lam_l/2}``.

    Raises
    ------
    ValueError
        If the candidate support makes the linear system underdetermined.
    """
    d = u.rank
    if support is None:
        support = default_support(lines, d)
    support = [tuple(Q(x) for x in mu) for mu in support]
    den = [(ln.coweight, data.phase(ln.coweight)) for ln in lines]
    if exact is None:
        exact = u.exact
    lhs = u
    for lam, s in den:
        lhs = lhs * denominator_factor(lam, s if exact else complex(s), d, u.order)
    rows_idx = monomials(d, u.order)
    gammas = monomials(d, poly_degree)
    cols = []
    for mu in support:
        e = exp_linear(mu, d, u.order)
        for g in gammas:
            cols.append((mu, g, (GeneratingSeries(d, u.order, {g: GaussianRational(1)}) * e).coeffs))
    nunk = len(cols)
    if not u.coeffs and not lhs.coeffs:
        frac = ExponentialFraction(d, {}, den)
        return FitResult(frac, 0.0, True, support)
    if exact:
        aug = []
        for a in rows_idx:
            row = [_lift(c[2].get(a, GaussianRational(0))) for c in cols]
            row.append(_lift(lhs.coeffs.get(a, GaussianRational(0))))
            aug.append(row)
        m, piv = rref(aug)
        if nunk in piv:
            exact = False  # inconsistent: fall back to least squares
        else:
            if len(piv) < nunk:
                raise ValueError(f"underdetermined support: rank {len(piv)} < {nunk} unknowns")
            sol = [GaussianRational(0)] * nunk
            for i, p in enumerate(piv):
                sol[p] = m[i][nunk]
            num = {}
            for (mu, g, _), c in zip(cols, sol):
                if c:
                    num.setdefault(mu, {})[g] = c
            num = {mu: Poly(d, t) for mu, t in num.items()}
            return FitResult(ExponentialFraction(d, num, den), 0.0, True, support)
    A = np.array([[complex(c[2].get(a, 0)) for c in cols] for a in rows_idx])
    b = np.array([complex(lhs.coeffs.get(a, 0)) for a in rows_idx])
    # scale rows by alpha! so that every equation is on the moment scale
    scale = np.array([float(_factorial(a)) for a in rows_idx])
    A, b = A * scale[:, None], b * scale
    sv = np.linalg.svd(A, compute_uv=False)
    r = int(np.sum(sv > 1e-12 * sv[0])) if sv.size else 0
    if r < nunk:
        raise ValueError(f"underdetermined support: numerical rank {r} < {nunk} unknowns")
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.max(np.abs(A @ x - b))) if b.size else 0.0
    num = {}
    for (mu, g, _), c in zip(cols, x):
        num.setdefault(mu, {})[g] = complex(c)
    return FitResult(ExponentialFraction(d, num, den), residual, False, support)


# decay and boundedness -------------------------------------------------------------------


@dataclass
class DecayVerdict:
    verdict: str  # decaying | bounded | unbounded
    witness: tuple | None = None
    detail: str = ""


def decay_and_boundedness_check(f: ExponentialFraction, tol: float = 1e-8) -> DecayVerdict:
    """Classify growth of the fraction on real ``y`` from its numerator data.

    Each nonzero numerator term ``S_mu e^{mu}`` is compared with the polytope
    ``sum_l [-1/2,1/2] lam_l``: interior terms decay; terms outside grow;
    boundary terms stay bounded only when ``S_mu`` is constant along the
    directions normal to the face containing ``mu``.
    """
    Z = f.polytope()
    c = Z.center()
    eqs, ineqs = Z.halfspaces()
    verdict = "decaying"
    witness = None
    for mu, terms in f._num_poly_items():
        terms = {k: v for k, v in terms.items() if abs(complex(v)) > tol}
        if not terms:
            continue
        y = [Q(a) - b for a, b in zip(mu, c)]
        for psi in eqs:
            if sum(a * b for a, b in zip(psi, y)):
                return DecayVerdict("unbounded", (tuple(mu), tuple(psi)), "exponent off the polytope's span")
        tight = []
        for phi, h in ineqs:
            v = sum(a * b for a, b in zip(phi, y))
            if abs(v) > h:
                direction = tuple(phi) if v > 0 else tuple(-x for x in phi)
                return DecayVerdict("unbounded", (tuple(mu), direction), "exponent outside the polytope")
            if abs(v) == h:
                tight.append(phi)
        if not tight:
            continue
        # S_mu must be constant along the tight face normals
        if _depends_on(terms, tight, f.rank):
            return DecayVerdict("unbounded", (tuple(mu), tuple(tight[0])), "boundary term depends on a face normal")
        verdict = "bounded"
        witness = witness or (tuple(mu),)
    return DecayVerdict(verdict, witness, "")


def _depends_on(terms: dict, normals: list, d: int) -> bool:
    """True if the polynomial has a nonzero derivative along some normal."""
    for phi in normals:
        deriv: dict = {}
        for k, v in terms.items():
            for j in range(d):
                if k[j] and phi[j]:
                    e = list(k)
                    e[j] -= 1
                    e = tuple(e)
                    p = complex(v) * k[j] * float(phi[j])
                    deriv[e] = deriv.get(e, 0) + p
        if any(abs(x) > 1e-12 for x in deriv.values()):
            return True
    return False


# reduction (rank one) ---------------------------------------------------------------------


@dataclass
class Reduction:
    """``f = sum_i e^{shift_i . y} Q_i(y) f_i(y)``."""

    terms: list  # [(shift, Q dict alpha->coef, ExponentialFraction)]
    verdict: str  # reduced | unreduced

    def evaluate(self, y) -> complex:
        y = np.asarray(y, dtype=complex)
        total = 0j
        for shift, Qd, frac in self.terms:
            q = sum(complex(c) * np.prod(y ** np.array(k)) for k, c in Qd.items())
            total += np.exp(np.dot([float(s) for s in shift], y)) * q * frac.evaluate(y)
        return total


def reduce_fraction(f: ExponentialFraction) -> Reduction:
    """Rewrite ``f`` as a sum of shifted integration weights.

    Rank one is complete: every numerator exponent is moved into the closed
    window of its denominator by the identities::

        e^mu / D = e^{mu - lam/2} / D' + s e^{mu - lam} / D
        e^mu / D = (-1/s) (e^{mu + lam/2} / D' - e^{mu + lam} / D)

    where ``D = (e^{lam/2} - s e^{-lam/2}) D'``.  Terms on the window boundary
    have their exponent pulled out as a shift.  In higher rank a fraction
    that already decays is returned as one term; anything else is reported
    as ``unreduced``.
    """
    if decay_and_boundedness_check(f).verdict == "decaying":
        return Reduction([((Q(0),) * f.rank, {(0,) * f.rank: GaussianRational(1)}, f)], "reduced")
    if f.rank != 1:
        return Reduction([((Q(0),) * f.rank, {(0,) * f.rank: GaussianRational(1)}, f)], "unreduced")
    # normalize every factor to lam > 0: e^{-l/2} - s e^{l/2} = -s (e^{l/2} - s^{-1} e^{-l/2})
    const = GaussianRational(1)
    facs = []
    for lam, s in f.denominator:
        l0 = lam[0]
        if l0 < 0:
            sc = s if hasattr(s, "inverse") else complex(s)
            const = _mul(const, _recip(_mul(sc, GaussianRational(-1))))
            s = _recip(sc)
            l0 = -l0
        facs.append((Q(l0), s))
    pending = []  # (mu, coefficient-poly dict, number of factors)
    for mu, terms in f._num_poly_items():
        pending.append((Q(mu[0]), {k: _mul(v, const) for k, v in terms.items()}, len(facs)))
    out: dict = {}
    while pending:
        mu, S, k = pending.pop()
        if not any(not _is_zero(v) for v in S.values()):
            continue
        if k == 0:
            _acc(out, (mu, 0, "point"), S)
            continue
        lam, s = facs[k - 1]
        width = sum(l for l, _ in facs[:k]) / 2
        if -width <= mu <= width:
            if -width < mu < width:
                _acc(out, (Q(0), k, mu), S)
            else:
                _acc(out, (mu, k, Q(0)), S)
            continue
        if mu > width:
            pending.append((mu - lam / 2, S, k - 1))
            pending.append((mu - lam, {a: _mul(v, s) for a, v in S.items()}, k))
        else:
            ms = _recip(_mul(s, GaussianRational(-1)))
            pending.append((mu + lam / 2, {a: _mul(v, ms) for a, v in S.items()}, k - 1))
            pending.append((mu + lam, {a: _mul(_mul(v, ms), GaussianRational(-1)) for a, v in S.items()}, k))
    terms = []
    grouped: dict = {}
    for (shift, k, mu), S in out.items():
        grouped.setdefault((shift, k), {})[mu] = S
    for (shift, k), nums in sorted(grouped.items(), key=lambda t: (t[0][1], t[0][0])):
        if k == 0:
            frac = ExponentialFraction(1, {(Q(0),): Poly.const(1, 1)}, [])
            for mu, S in nums.items():
                terms.append(((shift,), S, frac))
            continue
        den = [((int(l),), s) for l, s in facs[:k]]
        num = {(mu,): _as_poly(S) for mu, S in nums.items()}
        terms.append(((shift,), {(0,): GaussianRational(1)}, ExponentialFraction(1, num, den)))
    return Reduction(terms, "reduced")


def _as_poly(S: dict):
    if all(is_exact(v) for v in S.values()):
        return Poly(1, {k: _lift(v) for k, v in S.items()})
    return dict(S)


def _recip(x):
    if isinstance(x, complex):
        return 1 / x
    return _lift(x).inverse()


def _acc(out: dict, key, S: dict) -> None:
    cur = out.get(key, {})
    for a, v in S.items():
        cur[a] = _add(cur[a], v) if a in cur else v
    out[key] = cur


# twist shift ---------------------------------------------------------------------------------


def twist_shift(f: ExponentialFraction, eta) -> ExponentialFraction:
    """``f(y - 2 pi i eta)`` as an exponential fraction.

    If ``f`` is the generating function of a ``g``-twisted trace with twist
    ``zeta`` and the result is regular at zero, its Taylor series generates
    a trace for the twist ``zeta + eta``.  Exponents and ``eta`` must be
    rational; all phases stay exact.
    """
    eta = [Q(x) for x in eta]
    d = f.rank
    num = {}
    for mu, terms in f._num_poly_items():
        ph = root_of_unity(-sum((Q(m) * e for m, e in zip(mu, eta)), Q(0)))
        S = Poly(d, terms) if not isinstance(terms, Poly) else terms
        # S(y - 2 pi i eta) is not rational; only constant S stay exact
        if S.degree() > 0:
            raise ValueError("twist_shift supports constant numerator polynomials only")
        num[mu] = S.scale(ph)
    den = []
    for lam, s in f.denominator:
        t = sum((Q(a) * e for a, e in zip(lam, eta)), Q(0))
        # e^{lam(y - 2 pi i eta)/2} - s e^{-lam(...)/2}
        #   = e^{-pi i t} (e^{lam y/2} - s e^{2 pi i t} e^{-lam y/2})
        den.append((lam, _mul(s, root_of_unity(t))))
        pref = root_of_unity(t / 2)  # reciprocal of e^{-pi i t}
        num = {mu: S.scale(pref) for mu, S in num.items()}
    return ExponentialFraction(d, num, den)
