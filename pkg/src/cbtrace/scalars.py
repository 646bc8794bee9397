"""Exact scalars: rationals, Gaussian rationals and cyclotomic numbers.

Rationals are ``gmpy2.mpq``.  ``GaussianRational`` covers the flavor
parameters and polynomial coefficients; ``Cyclotomic`` holds exact roots of
unity ``exp(2 pi i q)`` for rational ``q`` and anything built from them.
Mixed arithmetic promotes to the larger type.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from gmpy2 import mpq

__all__ = [
    "mpq",
    "Q",
    "GaussianRational",
    "Cyclotomic",
    "root_of_unity",
    "as_exact",
    "is_exact",
    "to_complex",
    "is_zero",
    "parse_rational",
    "format_rational",
]

_MPQ = type(mpq(0))


def Q(value) -> mpq:
    """Coerce an int, Fraction, mpq or ``"p/q"`` string to ``mpq``."""
    if isinstance(value, _MPQ):
        return value
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, (int, Rational)):
        return mpq(value)
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def parse_rational(text: str) -> mpq:
    """Parse ``"p/q"`` or ``"p"``.  Decimal points are rejected."""
    s = str(text).strip()
    if not s or "." in s or "e" in s.lower():
        raise ValueError(f"rational must be written as 'p/q', got {text!r}")
    if "/" in s:
        num, den = s.split("/", 1)
        den_i = int(den)
        if den_i == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return mpq(int(num), den_i)
    return mpq(int(s))


def format_rational(q) -> str:
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class GaussianRational:
    """``re + i*im`` with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Q(re)
        self.im = Q(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        return cls(Q(x), 0)

    def __repr__(self) -> str:
        return f"GaussianRational({format_rational(self.re)}, {format_rational(self.im)})"

    def __str__(self) -> str:
        if self.im == 0:
            return format_rational(self.re)
        if self.re == 0:
            return f"{format_rational(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        return f"({format_rational(self.re)}{sign}{format_rational(abs(self.im))}i)"

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, Cyclotomic):
            return other == self
        if isinstance(other, (int, Rational, _MPQ)):
            return self.im == 0 and self.re == other
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(self.re + other.re, self.im + other.im)
        if isinstance(other, Cyclotomic):
            return other + self
        if isinstance(other, (float, complex)):
            return complex(self) + other
        return GaussianRational(self.re + Q(other), self.im)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, Cyclotomic):
            return other * self
        if isinstance(other, (float, complex)):
            return complex(self) * other
        q = Q(other)
        return GaussianRational(self.re * q, self.im * q)

    __rmul__ = __mul__

    def norm(self) -> mpq:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, GaussianRational):
            return self * other.inverse()
        if isinstance(other, Cyclotomic):
            return Cyclotomic.coerce(self) / other
        if isinstance(other, (float, complex)):
            return complex(self) / other
        q = Q(other)
        return GaussianRational(self.re / q, self.im / q)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out


# --------------------------------------------------------------------------
# cyclotomic fields


@lru_cache(maxsize=None)
def _cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients (low to high) of the n-th cyclotomic polynomial."""
    # x^n - 1 = prod_{d | n} Phi_d(x)
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _poly_exact_div(num, list(_cyclotomic_poly(d)))
    return tuple(num)


def _poly_exact_div(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1] // den[-1]
        out[k] = c
        for j, dj in enumerate(den):
            num[k + j] -= c * dj
    return out


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[mpq, ...], ...]:
    """Coefficient vectors of w^k mod Phi_n for k = 0..n-1."""
    phi = _cyclotomic_poly(n)
    deg = len(phi) - 1
    rows = []
    cur = [mpq(0)] * deg
    cur[0] = mpq(1)
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by w
        top = cur[-1]
        cur = [mpq(0)] + cur[:-1]
        if top:
            cur = [c - top * p for c, p in zip(cur, phi[:-1])]
    return tuple(rows)


class Cyclotomic:
    """An element of Q(w_n), ``w_n = exp(2 pi i / n)``, in the power basis."""

    __slots__ = ("n", "c")

    def __init__(self, n: int, coeffs):
        self.n = n
        self.c = tuple(coeffs)

    @classmethod
    def from_powers(cls, n: int, powers: dict[int, object]) -> "Cyclotomic":
        table = _power_table(n)
        deg = len(table[0])
        acc = [mpq(0)] * deg
        for k, a in powers.items():
            a = Q(a)
            if not a:
                continue
            row = table[k % n]
            for j in range(deg):
                if row[j]:
                    acc[j] += a * row[j]
        return cls(n, acc)

    @classmethod
    def coerce(cls, x, n: int = 4) -> "Cyclotomic":
        if isinstance(x, Cyclotomic):
            return x.lift(math.lcm(n, x.n))
        if isinstance(x, GaussianRational):
            m = n if n % 4 == 0 else math.lcm(n, 4)
            return cls.from_powers(m, {0: x.re, m // 4: x.im})
        return cls.from_powers(n, {0: Q(x)})

    def lift(self, m: int) -> "Cyclotomic":
        if m == self.n:
            return self
        if m % self.n:
            raise ValueError(f"Q(w_{self.n}) does not embed in Q(w_{m})")
        step = m // self.n
        return Cyclotomic.from_powers(m, {k * step: a for k, a in enumerate(self.c) if a})

    def _common(self, other):
        if isinstance(other, Cyclotomic):
            o = other
        elif isinstance(other, GaussianRational):
            o = Cyclotomic.coerce(other, math.lcm(self.n, 4))
        else:
            o = Cyclotomic.from_powers(self.n, {0: Q(other)})
        m = math.lcm(self.n, o.n)
        return self.lift(m), o.lift(m)

    def __repr__(self) -> str:
        return f"Cyclotomic({self.n}, {[format_rational(a) for a in self.c]})"

    def __str__(self) -> str:
        z = complex(self)
        return f"{z.real:.6g}{z.imag:+.6g}i"

    def __bool__(self) -> bool:
        return any(self.c)

    def __eq__(self, other) -> bool:
        if isinstance(other, (float, complex)):
            return complex(self) == other
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        return a.c == b.c

    def __hash__(self) -> int:
        g = self.to_gaussian()
        if g is not None:
            return hash(g)
        return hash(self.c)

    def to_gaussian(self) -> GaussianRational | None:
        """Exact Gaussian rational if the value lies in Q(i), else None."""
        if not any(self.c[1:]):
            return GaussianRational(self.c[0], 0)
        m = math.lcm(self.n, 4)
        x = self.lift(m)
        i_vec = _power_table(m)[m // 4]
        j = next(k for k in range(1, len(i_vec)) if i_vec[k])
        im = x.c[j] / i_vec[j]
        re = x.c[0] - im * i_vec[0]
        cand = Cyclotomic(m, [re * (k == 0) + im * v for k, v in enumerate(i_vec)])
        if cand.c == x.c:
            return GaussianRational(re, im)
        return None

    def __complex__(self) -> complex:
        w = cmath.exp(2j * math.pi / self.n)
        return sum((float(a) * w**k for k, a in enumerate(self.c) if a), 0j)

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic(self.n, [-a for a in self.c])

    def __add__(self, other):
        if isinstance(other, (float, complex)):
            return complex(self) + other
        a, b = self._common(other)
        return Cyclotomic(a.n, [x + y for x, y in zip(a.c, b.c)])

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (float, complex)):
            return complex(self) * other
        if isinstance(other, (int, Rational, _MPQ)):
            q = Q(other)
            return Cyclotomic(self.n, [a * q for a in self.c])
        a, b = self._common(other)
        table = _power_table(a.n)
        deg = len(a.c)
        acc = [mpq(0)] * deg
        for i, x in enumerate(a.c):
            if not x:
                continue
            for j, y in enumerate(b.c):
                if not y:
                    continue
                xy = x * y
                row = table[(i + j) % a.n]
                for k in range(deg):
                    if row[k]:
                        acc[k] += xy * row[k]
        return Cyclotomic(a.n, acc)

    __rmul__ = __mul__

    def conj(self) -> "Cyclotomic":
        return Cyclotomic.from_powers(self.n, {(-k) % self.n: a for k, a in enumerate(self.c) if a})

    def inverse(self) -> "Cyclotomic":
        if not self:
            raise ZeroDivisionError("inverse of zero")
        deg = len(self.c)
        # columns: self * w^j
        cols = []
        for j in range(deg):
            e = Cyclotomic.from_powers(self.n, {j: 1})
            cols.append((self * e).c)
        mat = [[cols[j][i] for j in range(deg)] + [mpq(1 if i == 0 else 0)] for i in range(deg)]
        sol = _solve_square(mat, deg)
        return Cyclotomic(self.n, sol)

    def __truediv__(self, other):
        if isinstance(other, (float, complex)):
            return complex(self) / other
        if isinstance(other, (int, Rational, _MPQ)):
            q = Q(other)
            return Cyclotomic(self.n, [a / q for a in self.c])
        a, b = self._common(other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        if isinstance(other, (float, complex)):
            return other / complex(self)
        a, b = self._common(other)
        return b * a.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = Cyclotomic.from_powers(self.n, {0: 1})
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out


def _solve_square(aug: list[list[mpq]], n: int) -> list[mpq]:
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


def root_of_unity(q) -> GaussianRational | Cyclotomic:
    """``exp(2 pi i q)`` exactly.  Returned as a Gaussian rational when q in Z/4."""
    q = Q(q)
    q = q - math.floor(q)
    den = int(q.denominator)
    num = int(q.numerator)
    if 4 % den == 0:
        k = num * (4 // den) % 4
        return [GaussianRational(1), GaussianRational(0, 1), GaussianRational(-1), GaussianRational(0, -1)][k]
    return Cyclotomic.from_powers(den, {num: 1})


def is_exact(x) -> bool:
    return isinstance(x, (GaussianRational, Cyclotomic, int, Rational, _MPQ))


def as_exact(x):
    """Normalize exact scalars: Cyclotomic values in Q(i) become GaussianRational."""
    if isinstance(x, Cyclotomic):
        g = x.to_gaussian()
        return g if g is not None else x
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Rational, _MPQ)):
        return GaussianRational(Q(x))
    raise TypeError(f"{x!r} is not exact")


def to_complex(x) -> complex:
    return complex(x)


def is_zero(x) -> bool:
    if isinstance(x, (float, complex)):
        return x == 0
    return not x
