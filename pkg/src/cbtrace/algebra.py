"""Quantized abelian Coulomb branch algebras.

Elements are finite sums ``sum_lambda r^lambda p_lambda(z)`` with the
polynomial written to the right of the basis element.  The defining
relations are

* ``r^lam f = S_lam(f) r^lam``, where ``S_v f(z) = f(z + v)``;
* ``r^lam r^mu = A(lam, mu) r^(lam+mu)`` with ``A = prod_i A_i`` and, writing
  ``a = xi_i(lam)``, ``c = xi_i(mu)``, ``n_i = (|a| + |c| - |a + c|) / 2``::

      A_i = prod_{j=1}^{n_i} (xi_i + b_i + a - j + 1/2)   if a >= 0
      A_i = prod_{j=1}^{n_i} (xi_i + b_i + a + j - 1/2)   if a < 0
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations, product

from .lattice import WeightList, normalize_weights, pair
from .linalg import (
    lattice_complement,
    nullspace,
    primitive,
    rank,
    to_rational_matrix,
)
from .poly import Poly, linear_form
from .scalars import GaussianRational, Q, root_of_unity

log = logging.getLogger(__name__)

__all__ = [
    "CoulombData",
    "AlgebraElement",
    "p_lambda",
    "multiply",
    "g_action",
    "rho",
    "structure_poly",
    "flavor_pairing",
    "is_quotient_subspace",
    "quotient_hom",
    "QuotientCertificate",
    "candidate_subspaces",
    "rho_coefficient",
]

HALF = Q(1) / 2


@dataclass(frozen=True)
class CoulombData:
    """One problem instance.

    Parameters
    ----------
    weights : WeightList
        Normalized weight covectors.
    flavors : tuple of GaussianRational
    zeta : tuple of rational
        Twist covector; ``g(r^lam) = exp(2 pi i zeta(lam)) r^lam``.
    rho_offset : tuple of int
        Integer covector ``kappa`` choosing among the antilinear
        automorphisms with the same square.  ``None`` picks the default
        ``kappa = sum_i xi_i mod 2``.
    """

    weights: WeightList
    flavors: tuple
    zeta: tuple
    rho_offset: tuple | None = None
    log: tuple = field(default=(), compare=False)

    def __post_init__(self):
        d = self.weights.rank
        object.__setattr__(self, "flavors", tuple(GaussianRational.coerce(b) for b in self.flavors))
        object.__setattr__(self, "zeta", tuple(Q(x) for x in self.zeta))
        if len(self.flavors) != len(self.weights):
            raise ValueError(f"{len(self.weights)} weights but {len(self.flavors)} flavors")
        if len(self.zeta) != d:
            raise ValueError(f"zeta has length {len(self.zeta)}, expected {d}")
        if self.rho_offset is None:
            kappa = tuple(sum(w[k] for w in self.weights) % 2 for k in range(d))
        else:
            kappa = tuple(int(x) for x in self.rho_offset)
            if len(kappa) != d:
                raise ValueError(f"rho_offset has length {len(kappa)}, expected {d}")
        object.__setattr__(self, "rho_offset", kappa)

    @property
    def d(self) -> int:
        return self.weights.rank

    @property
    def n(self) -> int:
        return len(self.weights)

    @classmethod
    def build(cls, weights, flavors, zeta, rho_offset=None, *, normalize: bool = True):
        """Construct from raw lists, normalizing the weights by default."""
        weights = [tuple(int(x) for x in w) for w in weights]
        d = len(weights[0]) if weights else len(zeta)
        wl = WeightList(d, tuple(weights))
        zeta = [Q(x) for x in zeta]
        msgs: tuple = ()
        if normalize:
            wl2, bs, msgs_l, signs = normalize_weights(wl, flavors)
            # a flip xi -> -xi changes the weight function by exp(2 pi xi),
            # i.e. the twist by -xi (an integer covector: g is unchanged)
            for w, s in zip(wl2.weights, signs):
                if s < 0:
                    zeta = [z + x for z, x in zip(zeta, w)]
            wl, flavors, msgs = wl2, bs, tuple(msgs_l)
            for m in msgs:
                log.info(m)
        return cls(wl, tuple(flavors), tuple(zeta), rho_offset, msgs)

    def with_offset(self, kappa) -> "CoulombData":
        return CoulombData(self.weights, self.flavors, self.zeta, tuple(kappa), self.log)

    def with_zeta(self, zeta) -> "CoulombData":
        return CoulombData(self.weights, self.flavors, tuple(zeta), self.rho_offset, self.log)

    def xi_poly(self, i: int) -> Poly:
        return linear_form(self.weights.weights[i])

    def phase(self, lam):
        """Exact ``exp(2 pi i zeta(lam))``."""
        return root_of_unity(sum((z * x for z, x in zip(self.zeta, lam)), Q(0)))


# structure polynomials --------------------------------------------------------


def _factor(data: CoulombData, i: int, c) -> Poly:
    """``xi_i + b_i + c`` as a polynomial."""
    return linear_form(data.weights.weights[i], data.flavors[i] + GaussianRational(Q(c)))


def p_lambda(data: CoulombData, lam) -> Poly:
    """``P_lam = prod_i prod_{j=1}^{|a_i|} (xi_i + b_i + |a_i|/2 - j + 1/2)``."""
    out = Poly.const(data.d, 1)
    for i, w in enumerate(data.weights.weights):
        a = abs(pair(w, lam))
        for j in range(1, a + 1):
            out = out * _factor(data, i, Q(a) / 2 - j + HALF)
    return out


def structure_poly(data: CoulombData, lam, mu) -> Poly:
    """``A(lam, mu)`` with ``r^lam r^mu = A(lam, mu) r^(lam+mu)``."""
    out = Poly.const(data.d, 1)
    for i, w in enumerate(data.weights.weights):
        a, c = pair(w, lam), pair(w, mu)
        n = (abs(a) + abs(c) - abs(a + c)) // 2
        for j in range(1, n + 1):
            if a >= 0:
                out = out * _factor(data, i, Q(a) - j + HALF)
            else:
                out = out * _factor(data, i, Q(a) + j - HALF)
    return out


# elements ---------------------------------------------------------------------


class AlgebraElement:
    """``sum_lambda r^lambda p_lambda`` over a fixed :class:`CoulombData`."""

    __slots__ = ("data", "terms")

    def __init__(self, data: CoulombData, terms=None):
        self.data = data
        clean = {}
        for lam, p in (terms or {}).items():
            lam = tuple(int(x) for x in lam)
            if len(lam) != data.d:
                raise ValueError(f"coweight {lam} has wrong length")
            if not isinstance(p, Poly):
                p = Poly.const(data.d, p)
            if p:
                clean[lam] = p
        self.terms = clean

    @classmethod
    def r(cls, data: CoulombData, lam, p: Poly | None = None) -> "AlgebraElement":
        return cls(data, {tuple(lam): p if p is not None else Poly.const(data.d, 1)})

    @classmethod
    def poly(cls, data: CoulombData, p: Poly) -> "AlgebraElement":
        return cls(data, {(0,) * data.d: p})

    def _check(self, other: "AlgebraElement") -> None:
        if other.data is not self.data and other.data != self.data:
            raise ValueError("elements belong to different algebras")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        out = dict(self.terms)
        for lam, p in other.terms.items():
            out[lam] = out[lam] + p if lam in out else p
        return AlgebraElement(self.data, out)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.data, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, c) -> "AlgebraElement":
        return AlgebraElement(self.data, {k: v.scale(c) for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self.data, self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.terms.keys() == other.terms.keys() and all(
            self.terms[k] == other.terms[k] for k in self.terms
        )

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        parts = [f"r^{list(k)}*({v})" for k, v in sorted(self.terms.items())]
        return " + ".join(parts) if parts else "0"

    def part(self, lam) -> Poly:
        return self.terms.get(tuple(lam), Poly(self.data.d))


def multiply(data: CoulombData, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Product in the algebra.

    ``r^lam f * r^mu h = r^(lam+mu) S_{-lam-mu}(A(lam,mu)) S_{-mu}(f) h``.
    """
    if a.data != data or b.data != data:
        raise ValueError("elements belong to different algebras")
    out: dict = {}
    cache: dict = {}
    for lam, f in a.terms.items():
        for mu, h in b.terms.items():
            nu = tuple(x + y for x, y in zip(lam, mu))
            key = (lam, mu)
            if key not in cache:
                cache[key] = structure_poly(data, lam, mu).shift([-x for x in nu])
            term = cache[key] * f.shift([-x for x in mu]) * h
            out[nu] = out[nu] + term if nu in out else term
    return AlgebraElement(data, out)


def g_action(data: CoulombData, a: AlgebraElement) -> AlgebraElement:
    """``g(r^lam p) = exp(2 pi i zeta(lam)) r^lam p``."""
    return AlgebraElement(data, {lam: p.scale(data.phase(lam)) for lam, p in a.terms.items()})


def rho_coefficient(data: CoulombData, lam):
    """Scalar ``c`` with ``rho(r^lam) = c r^(-lam)``."""
    s = sum(abs(pair(w, lam)) for w in data.weights.weights)
    tw = sum(((z + k) * x for z, k, x in zip(data.zeta, data.rho_offset, lam)), Q(0))
    # (-i)^s exp(-pi i tw) = exp(2 pi i (-s/4 - tw/2))
    return root_of_unity(-Q(s) / 4 - tw / 2)


def rho(data: CoulombData, a: AlgebraElement) -> AlgebraElement:
    """Antilinear automorphism ``rho(r^lam R) = c_lam r^(-lam) conj(R)(-z)``.

    Raises
    ------
    ValueError
        If the flavors admit no pairing (``rho`` is then not an automorphism).
    """
    ok, why = flavor_pairing(data)
    if not ok:
        raise ValueError(f"rho undefined: {why}")
    out = {}
    for lam, p in a.terms.items():
        neg = tuple(-x for x in lam)
        out[neg] = p.conj_negate().scale(rho_coefficient(data, lam))
    return AlgebraElement(data, out)


def flavor_pairing(data: CoulombData) -> tuple[bool, str]:
    """Check that flavors of equal weights pair as ``b_s = -conj(b_t)``."""
    classes: dict = {}
    for w, b in zip(data.weights.weights, data.flavors):
        classes.setdefault(w, []).append(b)
    for w, bs in classes.items():
        pool = list(bs)
        while pool:
            b = pool.pop(0)
            if b == -b.conj():
                continue
            target = -b.conj()
            idx = next((j for j, c in enumerate(pool) if c == target), None)
            if idx is None:
                return False, f"flavor {b} of weight {list(w)} has no partner {target}"
            pool.pop(idx)
    return True, ""


# quotients --------------------------------------------------------------------


@dataclass
class QuotientCertificate:
    """Evidence for :func:`is_quotient_subspace`.

    ``covering`` lists ``(i, sign, k)``: weight ``i`` covers every ``lam``
    with ``sign * xi_i(lam) >= k``.  ``violation`` is a coweight outside U
    that no index covers, when one was found.
    """

    covering: list = field(default_factory=list)
    violation: tuple | None = None
    reason: str = ""


def _is_half_odd(q) -> bool:
    return (2 * q).denominator == 1 and (2 * q).numerator % 2 != 0


def is_quotient_subspace(data: CoulombData, U) -> tuple[bool, QuotientCertificate]:
    """Decide whether the span of ``U`` admits a quotient map ``A -> A_U``.

    ``U`` is a list of integer coweights forming a basis of a saturated
    sublattice.  The condition is: every coweight ``lam`` outside ``U`` has an
    index ``i`` with ``xi_i`` vanishing on ``U``, ``b_i`` a real half-odd
    integer, and ``1/2 - s b_i`` in ``{1, ..., |xi_i(lam)|}`` where
    ``s = sign xi_i(lam)``.  Then ``r^-lam r^lam`` restricts to zero.

    The decision works on the quotient lattice ``Y/U``: qualifying indices
    give half-spaces ``s_i xi_i(v) >= k_i`` with ``s_i = -sign(b_i)`` and
    ``k_i = 1/2 + |b_i|``.  The complement of their union must be ``{0}``.
    That fails if the recession cone ``{s_i xi_i <= 0}`` is nontrivial and
    otherwise is decided by enumerating the bounded polytope
    ``{s_i xi_i(v) <= k_i - 1}``.

    Raises
    ------
    ValueError
        If ``U`` is not a saturated sublattice.
    """
    d = data.d
    U = [list(map(int, u)) for u in U if any(u)]
    u_basis, w_basis = lattice_complement(U, d)
    r = len(w_basis)
    cert = QuotientCertificate()
    if r == 0:
        cert.reason = "U is the whole lattice"
        return True, cert
    rows, ks = [], []
    for i, (w, b) in enumerate(zip(data.weights.weights, data.flavors)):
        if any(pair(w, u) for u in u_basis):
            continue
        if b.im != 0 or not _is_half_odd(b.re):
            continue
        s = -1 if b.re > 0 else 1
        k = HALF + abs(b.re)
        rows.append([s * pair(w, v) for v in w_basis])
        ks.append(k)
        cert.covering.append((i, s, int(k)))
    if not rows:
        cert.violation = tuple(w_basis[0])
        cert.reason = "no qualifying weight"
        return False, cert
    ray = _recession_ray(rows, r)
    if ray is not None:
        lam = [sum(c * v[t] for c, v in zip(ray, w_basis)) for t in range(d)]
        cert.violation = tuple(lam)
        cert.reason = "uncovered unbounded direction"
        return False, cert
    bad = _bounded_uncovered(rows, [k - 1 for k in ks], r)
    if bad is not None:
        lam = [sum(c * v[t] for c, v in zip(bad, w_basis)) for t in range(d)]
        cert.violation = tuple(lam)
        cert.reason = "uncovered coweight"
        return False, cert
    cert.reason = "all coweights outside U covered"
    return True, cert


def _recession_ray(rows, r):
    """Nonzero integer v with rows @ v <= 0, or None."""
    if rank(rows) < r:
        v = nullspace(to_rational_matrix(rows), r)[0]
        return list(primitive(v))
    for sub in combinations(range(len(rows)), r - 1):
        sel = [rows[i] for i in sub]
        if sel and rank(sel) != r - 1:
            continue
        if sel:
            ker = nullspace(to_rational_matrix(sel), r)
            if len(ker) != 1:
                continue
            v = list(primitive(ker[0]))
        else:
            v = [1]
        for s in (1, -1):
            cand = [s * x for x in v]
            if all(sum(a * b for a, b in zip(row, cand)) <= 0 for row in rows):
                return cand
    return None


def _bounded_uncovered(rows, bounds, r):
    """A nonzero integer point of ``{rows @ v <= bounds}`` or None (bounded case)."""
    import math

    from .linalg import solve

    verts = []
    for sub in combinations(range(len(rows)), r):
        sel = [rows[i] for i in sub]
        if rank(sel) != r:
            continue
        x = solve(sel, [bounds[i] for i in sub])
        if all(sum(a * b for a, b in zip(row, x)) <= h for row, h in zip(rows, bounds)):
            verts.append(x)
    lo = [math.floor(min(v[t] for v in verts)) for t in range(r)]
    hi = [math.ceil(max(v[t] for v in verts)) for t in range(r)]
    for v in product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        if not any(v):
            continue
        if all(sum(a * b for a, b in zip(row, v)) <= h for row, h in zip(rows, bounds)):
            return list(v)
    return None


def quotient_hom(data: CoulombData, U):
    """The quotient algebra ``A_U`` and the map ``A -> A_U``.

    ``A_U`` has coordinates ``w_j`` dual to the chosen basis ``u_j`` of U,
    weights ``xi_i^U = (xi_i(u_j))_j`` for the weights not vanishing on U
    (with their flavors) and twist ``zeta(u_j)``.  The map sends
    ``r^lam R`` to zero for ``lam`` outside U and otherwise to
    ``r^(coords of lam) R|_U``.

    Returns
    -------
    (CoulombData, callable, list)
        The target data, the map and the basis of U used for coordinates.

    Raises
    ------
    ValueError
        If U is not a quotient subspace.
    """
    ok, cert = is_quotient_subspace(data, U)
    if not ok:
        raise ValueError(f"not a quotient subspace: {cert.reason}, violation {cert.violation}")
    d = data.d
    u_basis, w_basis = lattice_complement([u for u in U if any(u)], d)
    k = len(u_basis)
    ws, bs = [], []
    for w, b in zip(data.weights.weights, data.flavors):
        img = tuple(pair(w, u) for u in u_basis)
        if any(img):
            ws.append(img)
            bs.append(b)
    zeta_u = tuple(sum((z * x for z, x in zip(data.zeta, u)), Q(0)) for u in u_basis)
    kappa_u = tuple(pair(data.rho_offset, u) for u in u_basis)
    target = CoulombData(WeightList(k, tuple(ws)), tuple(bs), zeta_u, kappa_u)
    # z = sum_j w_j u_j restricts a polynomial in z to one in w
    images = [linear_form([u[t] for u in u_basis]) if k else Poly.zero(0) for t in range(d)]
    full = u_basis + w_basis
    inv = _rational_inverse(full) if d else []

    def coords(lam):
        c = [sum(Q(lam[s]) * inv[s][j] for s in range(d)) for j in range(d)]
        if any(x for x in c[k:]):
            return None
        return tuple(int(x) for x in c[:k])

    def restrict(p: Poly) -> Poly:
        if k == 0:
            return Poly.const(0, p.evaluate_exact([GaussianRational(0)] * d)) if d else p
        return p.substitute(images)

    def phi(a: AlgebraElement) -> AlgebraElement:
        out = {}
        for lam, p in a.terms.items():
            c = coords(lam)
            if c is None:
                continue
            q = restrict(p)
            out[c] = out[c] + q if c in out else q
        return AlgebraElement(target, out)

    return target, phi, u_basis


def _rational_inverse(rows):
    """Inverse of the matrix whose rows are ``rows``, as ``inv[s][j]``.

    ``lam = sum_j c_j rows[j]`` gives ``c_j = sum_s lam_s inv[s][j]``.
    """
    from .linalg import rref

    n = len(rows)
    # solve c @ M = lam, i.e. M^T c = lam; inverse of M
    aug = [[Q(rows[i][j]) for i in range(n)] + [Q(1 if s == j else 0) for s in range(n)] for j in range(n)]
    m, _ = rref(aug)
    # m gives (M^T)^{-1}; entry [j][s] maps lam_s to c_j
    return [[m[j][n + s] for j in range(n)] for s in range(n)]


def candidate_subspaces(data: CoulombData) -> list[list[list[int]]]:
    """Saturated sublattices cut out by weight hyperplanes, plus the whole space.

    Each is returned as a Z-basis (list of coweights); the zero subspace is
    the empty list.
    """
    from .linalg import saturation_basis

    d = data.d
    seen = {}
    ws = sorted(set(data.weights.weights))
    for k in range(0, len(ws) + 1):
        for sub in combinations(ws, k):
            if k and rank(sub) == 0:
                continue
            if k == 0:
                basis = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
            else:
                ker = nullspace(to_rational_matrix(sub), d)
                basis = saturation_basis([list(primitive(v)) for v in ker], d) if ker else []
            key = _subspace_key(basis, d)
            if key not in seen:
                seen[key] = basis
    return [seen[k] for k in sorted(seen, key=lambda t: (-len(t), t))]


def _subspace_key(basis, d):
    from .linalg import rref

    if not basis:
        return ()
    m, piv = rref(to_rational_matrix(basis))
    return tuple(tuple(r) for r in m[: len(piv)])
