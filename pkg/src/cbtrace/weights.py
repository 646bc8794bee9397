"""Quasi-periodic integration weights and quadrature traces.

A weight is::

    w(x) = exp(2 pi zeta(x)) Q(e^{2 pi x_1}, ..., e^{2 pi x_d})
           / prod_j (exp(2 pi xi_j(x)) + exp(2 pi i b_j))

with ``Q`` a Laurent polynomial.  It satisfies
``w(x + i lam) = exp(2 pi i zeta(lam)) w(x)`` and, when every exponent
``m`` of ``Q`` has ``m + zeta`` inside the open zonotope ``sum_j [0,1] xi_j``,
decays exponentially.  ``T(R) = int R(i x) w(x) dx`` is then a twisted trace.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import CoulombData
from .lattice import Zonotope, interior_lattice_points
from .poly import monomials
from .scalars import GaussianRational, Q, format_rational, parse_rational
from .traces import TraceFunctional

log = logging.getLogger(__name__)

__all__ = [
    "WeightFunction",
    "admissible_numerator_exponents",
    "quadrature_trace",
    "quadrature_functional",
    "numerator_nonnegativity",
    "calibrate_rho_offset",
]


@dataclass(frozen=True)
class WeightFunction:
    """Closed-form weight attached to :class:`CoulombData`.

    Parameters
    ----------
    numerator : dict
        Laurent exponent tuple ``m`` -> exact coefficient.
    zeta : tuple of rational
    factors : tuple of (weight, flavor)
    """

    numerator: dict
    zeta: tuple
    factors: tuple

    @classmethod
    def for_data(cls, data: CoulombData, numerator=None, zeta=None) -> "WeightFunction":
        if numerator is None:
            numerator = {(0,) * data.d: 1}
        num = {tuple(int(x) for x in m): GaussianRational.coerce(c) for m, c in numerator.items()}
        num = {m: c for m, c in num.items() if c}
        z = tuple(Q(x) for x in (zeta if zeta is not None else data.zeta))
        return cls(num, z, tuple(zip(data.weights.weights, data.flavors)))

    @property
    def d(self) -> int:
        return len(self.zeta)

    def negated(self) -> "WeightFunction":
        return WeightFunction({m: -c for m, c in self.numerator.items()}, self.zeta, self.factors)

    def zonotope(self) -> Zonotope:
        return Zonotope.fundamental([w for w, _ in self.factors], self.d)

    def decay_margin(self) -> float:
        """Smallest distance from ``m + zeta`` to the zonotope boundary."""
        Z = self.zonotope()
        if not self.numerator:
            return math.inf
        return min(Z.margin([a + b for a, b in zip(m, self.zeta)]) for m in self.numerator)

    def check(self) -> None:
        """Raise if the weight is not an admissible integration weight."""
        for w, b in self.factors:
            if abs(b.re) >= Q(1) / 2:
                raise ValueError(f"flavor {b} has |Re b| >= 1/2: pole on the contour")
        Z = self.zonotope()
        for m in self.numerator:
            if not Z.contains([a + z for a, z in zip(m, self.zeta)], strict=True):
                raise ValueError(f"numerator exponent {list(m)} violates the decay condition")

    def __call__(self, x) -> np.ndarray:
        """Evaluate at points ``x`` of shape ``(..., d)`` (real or complex)."""
        x = np.asarray(x, dtype=complex)
        zeta = np.array([float(z) for z in self.zeta])
        logden = np.zeros(x.shape[:-1], dtype=complex)
        for w, b in self.factors:
            s = 2 * np.pi * (x @ np.array(w, dtype=float))
            th = 2j * np.pi * complex(b)
            big = s.real > 0
            logden += np.where(big, s + np.log1p(np.exp(th - s)), th + np.log1p(np.exp(s - th)))
        total = np.zeros(x.shape[:-1], dtype=complex)
        for m, c in self.numerator.items():
            e = 2 * np.pi * (x @ (np.array(m, dtype=float) + zeta))
            total += complex(c) * np.exp(e - logden)
        return total

    def to_json(self) -> dict:
        return {
            "numerator": [
                {"exp": list(m), "re": format_rational(c.re), "im": format_rational(c.im)}
                for m, c in sorted(self.numerator.items())
            ],
            "zeta": [format_rational(z) for z in self.zeta],
        }

    @classmethod
    def from_json(cls, obj, data: CoulombData) -> "WeightFunction":
        num = {}
        for t in obj.get("numerator", []):
            m = tuple(int(e) for e in t["exp"])
            num[m] = GaussianRational(parse_rational(t.get("re", "0")), parse_rational(t.get("im", "0")))
        zeta = [parse_rational(z) for z in obj["zeta"]] if "zeta" in obj else None
        return cls.for_data(data, num or None, zeta)


def admissible_numerator_exponents(data: CoulombData) -> list[tuple[int, ...]]:
    """Integer ``m`` with ``m + zeta`` in the open fundamental zonotope.

    Raises
    ------
    ValueError
        If the weights do not span.
    """
    if not data.weights.spans():
        raise ValueError("weights do not span")
    Z = Zonotope.fundamental(data.weights.weights, data.d)
    return interior_lattice_points(Z, data.zeta)


# quadrature ------------------------------------------------------------------------


def _box_half_width(delta: float, tol: float, degree: int) -> float:
    if not math.isfinite(delta):
        return 1.0
    rate = 2 * math.pi * delta
    L = math.log(1 / tol) / rate
    for _ in range(20):
        L = (math.log(1 / tol) + degree * math.log(max(L, 1.0))) / rate
    return 1.25 * L + 1.0


def _panel_nodes(L: float, n: int, width: float = 0.5):
    panels = max(1, int(math.ceil(2 * L / width)))
    L = panels * width / 2
    t, wt = np.polynomial.legendre.leggauss(n)
    edges = -L + width * np.arange(panels)
    x = (edges[:, None] + (t[None, :] + 1) * width / 2).ravel()
    w = np.tile(wt * width / 2, panels)
    return x, w


def _moments(wf: WeightFunction, degree: int, L: float, n: int) -> dict:
    d = wf.d
    x, wq = _panel_nodes(L, n)
    grids = np.meshgrid(*([x] * d), indexing="ij")
    pts = np.stack(grids, axis=-1)
    vals = wf(pts)
    W = vals
    # weight tensor times quadrature weights on every axis
    for k in range(d):
        shape = [1] * d
        shape[k] = len(wq)
        W = W * wq.reshape(shape)
    V = np.vander(x, degree + 1, increasing=True)  # (nodes, degree+1)
    # contract every axis with V: M[a_1..a_d] = sum W * prod x_k^{a_k}
    M = W
    for _ in range(d):
        M = np.tensordot(M, V, axes=([0], [0]))
    out = {}
    for alpha in monomials(d, degree):
        out[alpha] = complex(M[alpha]) * (1j ** sum(alpha))
    return out


def quadrature_functional(
    data: CoulombData, wf: WeightFunction | None = None, degree: int = 8, tol: float = 1e-10
) -> TraceFunctional:
    """All moments ``T(z^alpha) = i^|alpha| int x^alpha w(x) dx`` with ``|alpha| <= degree``.

    The box half-width follows from the decay margin; Gauss-Legendre
    panels of width 1/2 are refined (nodes doubled) until two successive
    rules agree to ``tol`` relative to the largest moment.

    Raises
    ------
    ValueError
        On a decay violation or a flavor with ``|Re b| >= 1/2``.
    """
    wf = wf or WeightFunction.for_data(data)
    wf.check()
    delta = wf.decay_margin()
    L = _box_half_width(delta, tol * 1e-2, degree)
    n = 8
    prev = _moments(wf, degree, L, n)
    converged = False
    while n < 128:
        n *= 2
        cur = _moments(wf, degree, L, n)
        scale = max(1.0, max(abs(v) for v in cur.values()))
        diff = max(abs(cur[k] - prev[k]) for k in cur)
        prev = cur
        if diff < tol * scale:
            converged = True
            break
    if not converged:
        log.warning("quadrature did not converge to tol=%g (nodes per panel %d)", tol, n)
    return TraceFunctional(
        data.d,
        degree,
        prev,
        "quadrature",
        {"box_half_width": L, "nodes_per_panel": n, "decay_margin": delta, "converged": converged},
    )


def quadrature_trace(data: CoulombData, wf: WeightFunction, R, tol: float = 1e-10) -> complex:
    """``int R(i x) w(x) dx`` for a single polynomial ``R``."""
    T = quadrature_functional(data, wf, max(R.degree(), 0), tol)
    return complex(T(R))


# positivity of the numerator ---------------------------------------------------------


@dataclass
class NonnegativityResult:
    verdict: str  # "certified" | "likely" | "refuted"
    witness: tuple | None = None
    detail: str = ""
    samples: int = 0
    extra: dict = field(default_factory=dict)


def numerator_nonnegativity(numerator: dict, seed: int = 0, samples: int = 4000) -> NonnegativityResult:
    """Decide whether the Laurent polynomial ``Q(y)`` is >= 0 on ``(R^*)^d``.

    Rank one is decided exactly.  In higher rank a positive-coefficient
    polynomial in even exponents is certified, a sampled negative value (or
    a non-real coefficient) refutes, and otherwise the verdict is "likely".
    """
    num = {tuple(m): GaussianRational.coerce(c) for m, c in numerator.items() if c}
    if not num:
        return NonnegativityResult("refuted", None, "zero numerator")
    if any(c.im for c in num.values()):
        m = next(m for m, c in num.items() if c.im)
        return NonnegativityResult("refuted", m, "non-real coefficient")
    d = len(next(iter(num)))
    if d == 1:
        return _nonneg_rank1({m[0]: c.re for m, c in num.items()})
    if all(c.re > 0 and all(e % 2 == 0 for e in m) for m, c in num.items()):
        return NonnegativityResult("certified", None, "even exponents, positive coefficients")
    rng = np.random.default_rng(seed)
    exps = np.array(list(num.keys()), dtype=float)
    coefs = np.array([float(c.re) for c in num.values()])
    y = rng.standard_normal((samples, d)) * np.exp(rng.uniform(-2, 2, (samples, 1)))
    y[y == 0] = 1e-3
    # vals[s] = sum_m c_m prod_k y[s,k]^m_k
    vals = np.prod(y[:, None, :] ** exps[None, :, :], axis=2) @ coefs
    k = int(np.argmin(vals))
    if vals[k] < 0:
        return NonnegativityResult("refuted", tuple(float(v) for v in y[k]), "negative sample", samples)
    return NonnegativityResult("likely", None, "no negative sample", samples)


def _nonneg_rank1(coeffs: dict) -> NonnegativityResult:
    import sympy as sp

    y = sp.Symbol("y")
    kmin = min(coeffs)
    # Q(y) = y^kmin p(y) with p(0) != 0, so every real root of p is nonzero
    p = sp.Poly(
        sum(sp.Rational(int(c.numerator), int(c.denominator)) * y ** (k - kmin) for k, c in coeffs.items()), y
    )
    for fac, mult in p.sqf_list()[1]:
        if mult % 2 and fac.degree() > 0:
            roots = sp.real_roots(fac)
            if roots:
                return NonnegativityResult("refuted", (float(roots[0]),), "sign change at an odd-multiplicity root")
    # constant sign on each half-line: test one non-root point on each
    for side in (1, -1):
        for q in (sp.Integer(1), sp.Rational(1, 3), sp.Rational(7, 5), sp.Rational(5, 2)):
            pt = side * q
            val = p.eval(pt) * pt**kmin
            if val != 0:
                break
        if val < 0:
            return NonnegativityResult("refuted", (float(pt),), "negative value")
    return NonnegativityResult("certified", None, "exact real-root analysis")


def calibrate_rho_offset(degree: int = 3, tol: float = 1e-10) -> int:
    """Parity of the integer offset for which the sech instance is positive.

    Builds ``d = 1``, ``xi = (1)``, ``b = 0``, ``zeta = 1/2`` with ``Q = 1``
    and returns the ``kappa`` in ``{0, 1}`` whose Gram blocks are positive
    definite.  Other instances use ``kappa = sum_i xi_i`` modulo 2.
    """
    from .traces import gram_matrix

    base = CoulombData.build([(1,)], [0], ["1/2"], normalize=False)
    T = quadrature_functional(base, degree=2 * degree + 2, tol=1e-12)
    good = []
    for kappa in (0, 1):
        rep = gram_matrix(base.with_offset((kappa,)), T, radius=2, degree=degree, tol=tol)
        if rep.verdict == "positive":
            good.append(kappa)
    if len(good) != 1:
        raise RuntimeError(f"rho-offset calibration is ambiguous: {good}")
    return good[0]
