"""Exact multivariate polynomials over the Gaussian rationals.

A :class:`Poly` in ``d`` variables ``z_1..z_d`` stores a dict from exponent
tuples to exact coefficients.  Coefficients are normally
:class:`~cbtrace.scalars.GaussianRational`; multiplying by an exact root of
unity produces :class:`~cbtrace.scalars.Cyclotomic` coefficients, which the
same code handles.
"""

from __future__ import annotations

import json
from itertools import product
from math import comb

import numpy as np

from .scalars import GaussianRational, Q, format_rational, parse_rational

__all__ = [
    "Poly",
    "monomials",
    "shift_argument",
    "conj_negate",
    "evaluate",
    "linear_form",
]


def _coef(x):
    if isinstance(x, GaussianRational) or hasattr(x, "conj"):
        return x
    return GaussianRational(Q(x))


class Poly:
    """Immutable polynomial in ``rank`` variables."""

    __slots__ = ("rank", "terms", "_hash")

    def __init__(self, rank: int, terms=None):
        self.rank = rank
        clean = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != rank:
                    raise ValueError(f"exponent {exp} does not have length {rank}")
                if any(e < 0 for e in exp):
                    raise ValueError(f"negative exponent {exp}")
                if c:
                    clean[exp] = _coef(c)
        self.terms = clean
        self._hash = None

    # constructors -----------------------------------------------------

    @classmethod
    def zero(cls, rank: int) -> "Poly":
        return cls(rank)

    @classmethod
    def const(cls, rank: int, c) -> "Poly":
        return cls(rank, {(0,) * rank: c})

    @classmethod
    def var(cls, rank: int, k: int) -> "Poly":
        exp = [0] * rank
        exp[k] = 1
        return cls(rank, {tuple(exp): 1})

    @classmethod
    def monomial(cls, exp, c=1) -> "Poly":
        exp = tuple(exp)
        return cls(len(exp), {exp: c})

    # basic queries ------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def coeff(self, exp):
        return self.terms.get(tuple(exp), GaussianRational(0))

    def constant_term(self):
        return self.coeff((0,) * self.rank)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            if self.rank != other.rank or self.terms.keys() != other.terms.keys():
                return False
            return all(self.terms[k] == other.terms[k] for k in self.terms)
        if not self.terms:
            return other == 0
        return self == Poly.const(self.rank, other)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rank, frozenset((k, hash(v)) for k, v in self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({self.rank}, {self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exp in sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e))):
            c = self.terms[exp]
            mono = "*".join(
                (f"z{k + 1}" if e == 1 else f"z{k + 1}^{e}") for k, e in enumerate(exp) if e
            )
            cs = str(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # arithmetic ---------------------------------------------------------

    def _check(self, other: "Poly") -> None:
        if self.rank != other.rank:
            raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.const(self.rank, other)

    def __add__(self, other) -> "Poly":
        other = self._lift(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            if k in out:
                out[k] = out[k] + v
            else:
                out[k] = v
        return Poly(self.rank, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.rank, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Poly":
        return self._lift(other) - self

    def scale(self, c) -> "Poly":
        if not c:
            return Poly(self.rank)
        return Poly(self.rank, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                p = c1 * c2
                if e in out:
                    out[e] = out[e] + p
                else:
                    out[e] = p
        return Poly(self.rank, out)

    def __rmul__(self, other) -> "Poly":
        return self.scale(other)

    def __pow__(self, k: int) -> "Poly":
        out = Poly.const(self.rank, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def map_coeffs(self, fn) -> "Poly":
        return Poly(self.rank, {k: fn(v) for k, v in self.terms.items()})

    def derivative(self, k: int) -> "Poly":
        out = {}
        for exp, c in self.terms.items():
            if exp[k]:
                e = list(exp)
                e[k] -= 1
                out[tuple(e)] = c * exp[k]
        return Poly(self.rank, out)

    # substitutions ------------------------------------------------------

    def substitute(self, images: list["Poly"]) -> "Poly":
        """Replace ``z_k`` by ``images[k]`` (all in a common target rank)."""
        if len(images) != self.rank:
            raise ValueError(f"need {self.rank} images, got {len(images)}")
        if not images:
            return self
        target = images[0].rank
        cache: list[dict[int, Poly]] = [{0: Poly.const(target, 1), 1: img} for img in images]

        def power(k: int, e: int) -> Poly:
            c = cache[k]
            if e not in c:
                c[e] = power(k, e - 1) * images[k]
            return c[e]

        out = Poly(target)
        for exp, coef in self.terms.items():
            term = Poly.const(target, coef)
            for k, e in enumerate(exp):
                if e:
                    term = term * power(k, e)
            out = out + term
        return out

    def shift(self, v) -> "Poly":
        """``f(z + v)`` for a rational vector ``v``."""
        v = [Q(x) for x in v]
        if len(v) != self.rank:
            raise ValueError(f"shift vector has length {len(v)}, expected {self.rank}")
        if not any(v):
            return self
        out: dict = {}
        for exp, c in self.terms.items():
            factors = []
            for k, e in enumerate(exp):
                # (z_k + v_k)^e = sum_j C(e, j) v_k^(e-j) z_k^j
                vk = v[k]
                if vk == 0:
                    factors.append([(e, 1)])
                else:
                    factors.append([(j, comb(e, j) * vk ** (e - j)) for j in range(e + 1)])
            for combo in product(*factors):
                e_new = tuple(j for j, _ in combo)
                w = Q(1)
                for _, a in combo:
                    w = w * a
                p = c * w
                if e_new in out:
                    out[e_new] = out[e_new] + p
                else:
                    out[e_new] = p
        return Poly(self.rank, out)

    def conj_negate(self) -> "Poly":
        """``conj(f)(-z)``: conjugate coefficients and negate every variable."""
        return Poly(
            self.rank,
            {exp: (c.conj() if sum(exp) % 2 == 0 else -c.conj()) for exp, c in self.terms.items()},
        )

    def evaluate(self, point) -> complex:
        point = [complex(x) for x in point]
        if len(point) != self.rank:
            raise ValueError(f"point has dimension {len(point)}, expected {self.rank}")
        total = 0j
        for exp, c in self.terms.items():
            t = complex(c)
            for x, e in zip(point, exp):
                if e:
                    t *= x**e
            total += t
        return total

    def evaluate_exact(self, point):
        """Exact value at a point with exact (rational/Gaussian) coordinates."""
        total = GaussianRational(0)
        for exp, c in self.terms.items():
            t = c
            for x, e in zip(point, exp):
                if e:
                    t = t * (x**e)
            total = total + t
        return total

    def to_numpy_coeffs(self, basis: list[tuple[int, ...]]) -> np.ndarray:
        """Complex coefficient vector on an explicit monomial basis."""
        index = {e: i for i, e in enumerate(basis)}
        out = np.zeros(len(basis), dtype=complex)
        for exp, c in self.terms.items():
            out[index[exp]] = complex(c)
        return out

    # serialization ------------------------------------------------------

    def to_json(self) -> dict:
        terms = []
        for exp in sorted(self.terms):
            c = GaussianRational.coerce(self.terms[exp]) if not hasattr(self.terms[exp], "re") else self.terms[exp]
            terms.append({"exp": list(exp), "re": format_rational(c.re), "im": format_rational(c.im)})
        return {"vars": self.rank, "terms": terms}

    @classmethod
    def from_json(cls, obj) -> "Poly":
        if isinstance(obj, str):
            obj = json.loads(obj)
        rank = int(obj["vars"])
        terms = {}
        for t in obj.get("terms", []):
            exp = tuple(int(e) for e in t["exp"])
            c = GaussianRational(parse_rational(t.get("re", "0")), parse_rational(t.get("im", "0")))
            terms[exp] = terms.get(exp, GaussianRational(0)) + c
        return cls(rank, terms)


def monomials(rank: int, max_degree: int) -> list[tuple[int, ...]]:
    """Exponent tuples of total degree <= max_degree in graded lex order."""
    out: list[tuple[int, ...]] = []
    for deg in range(max_degree + 1):
        out.extend(_monomials_of_degree(rank, deg))
    return out


def _monomials_of_degree(rank: int, deg: int) -> list[tuple[int, ...]]:
    if rank == 0:
        return [()] if deg == 0 else []
    if rank == 1:
        return [(deg,)]
    out = []
    for first in range(deg, -1, -1):
        for rest in _monomials_of_degree(rank - 1, deg - first):
            out.append((first,) + rest)
    return out


def linear_form(covector, const=0) -> Poly:
    """``sum_k covector[k] * z_k + const`` as a polynomial."""
    rank = len(covector)
    terms = {}
    for k, a in enumerate(covector):
        if a:
            e = [0] * rank
            e[k] = 1
            terms[tuple(e)] = a
    if const:
        terms[(0,) * rank] = const
    return Poly(rank, terms)


def shift_argument(f: Poly, v) -> Poly:
    return f.shift(v)


def conj_negate(f: Poly) -> Poly:
    return f.conj_negate()


def evaluate(f: Poly, point) -> complex:
    return f.evaluate(point)
