"""Lattice and zonotope combinatorics for torus weight data.

Weights are integer covectors on the coweight lattice ``Z^d``; coweights are
integer vectors and the pairing is the dot product.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from math import gcd

from .linalg import (
    canonical_sign,
    det,
    integer_kernel_line,
    nullspace,
    primitive,
    rank,
    to_rational_matrix,
)
from .scalars import GaussianRational, Q, mpq

log = logging.getLogger(__name__)

__all__ = [
    "WeightList",
    "Zonotope",
    "Line",
    "normalize_weights",
    "unimodularity_check",
    "matroid_basis_count",
    "b_set",
    "facet_coweights",
    "lines_with_coweights",
    "interior_lattice_points",
    "even_hull_count",
    "determinant_volume",
    "pair",
]


def pair(xi, lam) -> int:
    return sum(a * b for a, b in zip(xi, lam))


@dataclass(frozen=True)
class WeightList:
    """Integer weight covectors in ``rank`` dimensions."""

    rank: int
    weights: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        ws = tuple(tuple(int(x) for x in w) for w in self.weights)
        for w in ws:
            if len(w) != self.rank:
                raise ValueError(f"weight {w} does not have length {self.rank}")
        object.__setattr__(self, "weights", ws)

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def spans(self) -> bool:
        if self.rank == 0:
            return True
        return bool(self.weights) and rank(self.weights) == self.rank


@dataclass(frozen=True)
class Line:
    """A line of the coweight space with its shortest lattice coweight."""

    direction: tuple[int, ...]
    coweight: tuple[int, ...]


@dataclass(frozen=True)
class Zonotope:
    """The Minkowski sum ``offset + sum_i [0,1] g_i``.

    ``Zonotope.symmetrized(gens)`` gives ``sum_i [-1/2, 1/2] g_i``.
    """

    generators: tuple[tuple, ...]
    offset: tuple = field(default=())
    dim: int = 0

    def __post_init__(self):
        gens = tuple(tuple(Q(x) for x in g) for g in self.generators)
        dim = self.dim or (len(gens[0]) if gens else len(self.offset))
        off = tuple(Q(x) for x in self.offset) if self.offset else (Q(0),) * dim
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "offset", off)
        object.__setattr__(self, "dim", dim)

    @classmethod
    def fundamental(cls, weights, dim: int | None = None) -> "Zonotope":
        weights = list(weights)
        return cls(tuple(tuple(w) for w in weights), (), dim or len(weights[0]))

    @classmethod
    def symmetrized(cls, weights, dim: int | None = None) -> "Zonotope":
        weights = [tuple(w) for w in weights]
        d = dim if dim is not None else len(weights[0])
        off = tuple(-sum((Q(w[k]) for w in weights), Q(0)) / 2 for k in range(d))
        return cls(tuple(weights), off, d)

    def center(self) -> tuple[mpq, ...]:
        return tuple(
            self.offset[k] + sum((g[k] for g in self.generators), Q(0)) / 2 for k in range(self.dim)
        )

    def span_basis(self) -> list[list[mpq]]:
        rows, _ = _rref_rows([list(g) for g in self.generators])
        return rows

    def halfspaces(self):
        """Exact H-representation within the affine hull.

        Returns ``(equalities, inequalities)``: ``equalities`` is a list of
        covectors ``psi`` with ``psi(x - c) = 0``; ``inequalities`` a list of
        ``(phi, h)`` with ``|phi(x - c)| <= h``, where ``c`` is the center.
        """
        gens = [list(g) for g in self.generators if any(g)]
        d = self.dim
        if not gens:
            eqs = [[Q(1) if i == j else Q(0) for j in range(d)] for i in range(d)]
            return eqs, []
        basis = self.span_basis()
        k = len(basis)
        eqs = [list(v) for v in nullspace(to_rational_matrix(basis), d)] if k < d else []
        ineqs = {}
        for sub in combinations(range(len(gens)), k - 1):
            rows = [gens[i] for i in sub]
            if k > 1 and rank(rows) != k - 1:
                continue
            # normal inside span(basis), orthogonal to rows
            if k == 1:
                normals = [list(basis[0])]
            else:
                M = [[sum(Q(r[t]) * b[t] for t in range(d)) for b in basis] for r in rows]
                ker = nullspace(M, k)
                if len(ker) != 1:
                    continue
                a = ker[0]
                normals = [[sum(a[j] * basis[j][t] for j in range(k)) for t in range(d)]]
            for phi in normals:
                phi = canonical_sign(primitive(phi))
                if phi in ineqs:
                    continue
                h = sum(abs(sum(phi[t] * g[t] for t in range(d))) for g in gens) / 2
                ineqs[phi] = h
        return eqs, sorted(ineqs.items())

    def contains(self, x, *, strict: bool) -> bool:
        """Membership of ``x`` in the zonotope (relative interior if strict)."""
        x = [Q(v) for v in x]
        c = self.center()
        y = [a - b for a, b in zip(x, c)]
        eqs, ineqs = self.halfspaces()
        for psi in eqs:
            if sum(a * b for a, b in zip(psi, y)):
                return False
        for phi, h in ineqs:
            v = abs(sum(a * b for a, b in zip(phi, y)))
            if v > h or (strict and v == h):
                return False
        return True

    def bounding_box(self) -> list[tuple[mpq, mpq]]:
        c = self.center()
        out = []
        for k in range(self.dim):
            r = sum((abs(g[k]) for g in self.generators), Q(0)) / 2
            out.append((c[k] - r, c[k] + r))
        return out

    def margin(self, x) -> mpq | float:
        """Euclidean-normalized distance from ``x`` to the relative boundary.

        Negative outside.  Returns a float because of the normalization.
        """
        c = self.center()
        y = [Q(a) - b for a, b in zip(x, c)]
        _, ineqs = self.halfspaces()
        best = float("inf")
        for phi, h in ineqs:
            v = abs(sum(a * b for a, b in zip(phi, y)))
            norm = sum(float(a) ** 2 for a in phi) ** 0.5
            best = min(best, float(h - v) / norm)
        return best


def _rref_rows(rows):
    from .linalg import rref

    m, piv = rref(to_rational_matrix(rows))
    return [r for r in m[: len(piv)]], piv


# normalization ------------------------------------------------------------


def normalize_weights(raw: WeightList, flavors):
    """Split imprimitive weights and flip signs into the normal form.

    Parameters
    ----------
    raw : WeightList
        Input weights; must span.
    flavors : sequence of GaussianRational
        One flavor per weight.

    Returns
    -------
    (WeightList, list[GaussianRational], list[str], list[int])
        Normalized weights, flavors, a human-readable log and, for each
        normalized weight, the sign ``+1``/``-1`` relative to its source
        (``-1`` marks a flip).  Flipping ``xi -> -xi`` changes the twist by
        ``-xi``; callers adjust it via :func:`flip_twist_shift`.

    Notes
    -----
    A weight ``k xi`` with flavor ``b`` becomes ``k`` copies of ``xi`` with
    flavors ``(b + j - (k-1)/2) / k`` for ``j = 0..k-1``.  These keep every
    ``P_lambda`` unchanged up to a positive constant.
    """
    flavors = [GaussianRational.coerce(b) for b in flavors]
    if len(flavors) != len(raw):
        raise ValueError(f"{len(raw)} weights but {len(flavors)} flavors")
    if any(not any(w) for w in raw):
        raise ValueError("zero weight is not allowed")
    if not raw.spans():
        r = rank(raw.weights) if raw.weights else 0
        raise ValueError(f"weights span a rank-{r} sublattice, expected rank {raw.rank}")
    msgs: list[str] = []
    ws: list[tuple[int, ...]] = []
    bs: list[GaussianRational] = []
    src: list[int] = []
    for idx, (w, b) in enumerate(zip(raw.weights, flavors)):
        k = 0
        for x in w:
            k = gcd(k, x)
        if k == 1:
            ws.append(w)
            bs.append(b)
            src.append(idx)
            continue
        base = tuple(x // k for x in w)
        new = [(b + Q(j) - Q(k - 1) / 2) * GaussianRational(Q(1) / k) for j in range(k)]
        msgs.append(
            f"split weight {idx} {list(w)} into {k} copies of {list(base)} "
            f"with flavors {[str(x) for x in new]}"
        )
        ws.extend([base] * k)
        bs.extend(new)
        src.extend([idx] * k)
    signs = _choose_signs(ws, raw.rank)
    for i, s in enumerate(signs):
        if s < 0:
            msgs.append(f"flipped weight {i} {list(ws[i])} and its flavor")
            ws[i] = tuple(-x for x in ws[i])
            bs[i] = -bs[i]
    return WeightList(raw.rank, tuple(ws)), bs, msgs, signs


def _choose_signs(ws, d) -> list[int]:
    """Signs making some tau have xi_i(tau) < 0 for all i; +1 when possible."""
    if not ws:
        return []
    # candidate tau: sum over a chamber; search small integer vectors
    best, best_tau = -1, None
    for radius in range(1, 7):
        for tau in product(range(-radius, radius + 1), repeat=d):
            vals = [pair(w, tau) for w in ws]
            if any(v == 0 for v in vals):
                continue
            neg = sum(1 for v in vals if v < 0)
            if neg > best:
                best, best_tau = neg, tau
        if best == len(ws):
            break
    if best_tau is None:
        raise ValueError("no coweight avoids every weight hyperplane")
    return [1 if pair(w, best_tau) < 0 else -1 for w in ws]


# counting -------------------------------------------------------------------


def unimodularity_check(w: WeightList) -> bool:
    """True iff every independent ``d``-subset has determinant ``+-1``."""
    d = w.rank
    for sub in combinations(w.weights, d):
        D = det(sub)
        if D and abs(D) != 1:
            return False
    return True


def matroid_basis_count(w: WeightList) -> int:
    """Number of linearly independent ``d``-subsets."""
    return sum(1 for sub in combinations(w.weights, w.rank) if det(sub))


def determinant_volume(w: WeightList) -> int:
    """Sum of ``|det|`` over ``d``-subsets, the normalized zonotope volume."""
    return int(sum(abs(det(sub)) for sub in combinations(w.weights, w.rank)))


def b_set(w: WeightList) -> set[tuple[int, ...]]:
    """Deletion-contraction basis set, as sorted tuples of 0-based indices.

    The result depends on the input order; only its size is order
    invariant.  If the first ``d`` weights do not span, a spanning subset is
    moved to the front (stable otherwise).
    """
    vecs = [tuple(Q(x) for x in v) for v in w.weights]
    return set(_b_set(vecs, list(range(len(vecs))), w.rank))


def _b_set(vecs, labels, d):
    if d == 0:
        return [()]
    vecs, labels = _reorder_spanning(vecs, labels, d)
    n = len(vecs)
    if n == d:
        return [()]
    last, last_label = vecs[-1], labels[-1]
    # project to the annihilator of `last` inside coweight space
    ker = nullspace([list(last)], d)
    images, img_labels = [], []
    for v, lab in zip(vecs[:-1], labels[:-1]):
        img = tuple(sum(v[t] * k[t] for t in range(d)) for k in ker)
        if any(img):
            images.append(img)
            img_labels.append(lab)
    out = list(_b_set(images, img_labels, d - 1))
    for S in _b_set(vecs[:-1], labels[:-1], d):
        out.append(tuple(sorted(S + (last_label,))))
    return out


def _reorder_spanning(vecs, labels, d):
    chosen: list[int] = []
    for i, v in enumerate(vecs):
        if rank([vecs[j] for j in chosen] + [v]) > len(chosen):
            chosen.append(i)
        if len(chosen) == d:
            break
    if len(chosen) < d:
        raise ValueError("weights do not span")
    rest = [i for i in range(len(vecs)) if i not in chosen]
    order = chosen + rest
    return [vecs[i] for i in order], [labels[i] for i in order]


# facets and lines -----------------------------------------------------------


def facet_coweights(w: WeightList) -> list[tuple[int, ...]]:
    """Primitive normals ``+-lambda`` of hyperplanes spanned by weights."""
    d = w.rank
    if d == 1:
        return [(-1,), (1,)]
    out = set()
    for sub in combinations(w.weights, d - 1):
        if rank(sub) != d - 1:
            continue
        lam = integer_kernel_line([list(s) for s in sub], d)
        if lam is None:
            continue
        out.add(lam)
        out.add(tuple(-x for x in lam))
    return sorted(out)


def lines_with_coweights(w: WeightList) -> list[Line]:
    """One-dimensional intersections of the hyperplanes ``xi_j = 0``."""
    d = w.rank
    if d == 1:
        return [Line((1,), (1,))]
    out = {}
    for sub in combinations(w.weights, d - 1):
        if rank(sub) != d - 1:
            continue
        lam = canonical_sign(integer_kernel_line([list(s) for s in sub], d))
        out[lam] = Line(lam, lam)
    return [out[k] for k in sorted(out)]


# lattice points ---------------------------------------------------------------


def _box_points(box):
    import math

    ranges = [range(math.floor(lo), math.ceil(hi) + 1) for lo, hi in box]
    return product(*ranges)


def interior_lattice_points(z: Zonotope, shift) -> list[tuple[int, ...]]:
    """Integer ``m`` with ``m + shift`` in the relative interior of ``z``."""
    shift = [Q(s) for s in shift]
    box = [(lo - s, hi - s) for (lo, hi), s in zip(z.bounding_box(), shift)]
    out = []
    for m in _box_points(box):
        if z.contains([a + s for a, s in zip(m, shift)], strict=True):
            out.append(tuple(m))
    return sorted(out)


def even_points(z: Zonotope, shift) -> list[tuple[int, ...]]:
    """Even integer ``m`` with ``m - shift`` in the relative interior of ``z``."""
    shift = [Q(s) for s in shift]
    box = [(lo + s, hi + s) for (lo, hi), s in zip(z.bounding_box(), shift)]
    out = []
    for m in _box_points(box):
        if any(x % 2 for x in m):
            continue
        if z.contains([a - s for a, s in zip(m, shift)], strict=True):
            out.append(tuple(m))
    return sorted(out)


def even_hull_count(z: Zonotope, shift) -> int:
    """Integer points in the hull of the even points of ``int(z) + shift``."""
    pts = even_points(z, shift)
    if not pts:
        return 0
    return len(hull_integer_points(pts))


def hull_integer_points(pts) -> list[tuple[int, ...]]:
    """All integer points of the convex hull of a finite integer point set."""
    pts = [tuple(Q(x) for x in p) for p in pts]
    d = len(pts[0])
    p0 = pts[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in pts[1:]]
    diffs = [v for v in diffs if any(v)]
    if not diffs:
        return [tuple(int(x) for x in p0)]
    basis, _ = _rref_rows(diffs)
    k = len(basis)
    eqs = [list(v) for v in nullspace(to_rational_matrix(basis), d)] if k < d else []
    facets = []
    for sub in combinations(range(len(pts)), k):
        base = pts[sub[0]]
        rows = [[a - b for a, b in zip(pts[i], base)] for i in sub[1:]]
        if k > 1:
            M = [[sum(r[t] * b[t] for t in range(d)) for b in basis] for r in rows]
            ker = nullspace(M, k)
            if len(ker) != 1:
                continue
            a = ker[0]
        else:
            a = [Q(1)]
        phi = [sum(a[j] * basis[j][t] for j in range(k)) for t in range(d)]
        vals = [sum(phi[t] * (p[t] - base[t]) for t in range(d)) for p in pts]
        if all(v <= 0 for v in vals):
            facets.append((phi, sum(phi[t] * base[t] for t in range(d))))
        if all(v >= 0 for v in vals):
            facets.append(([-x for x in phi], -sum(phi[t] * base[t] for t in range(d))))
    lo = [min(p[t] for p in pts) for t in range(d)]
    hi = [max(p[t] for p in pts) for t in range(d)]
    out = []
    for m in _box_points(list(zip(lo, hi))):
        y = [Q(a) - b for a, b in zip(m, p0)]
        if any(sum(a * b for a, b in zip(psi, y)) for psi in eqs):
            continue
        if all(sum(phi[t] * m[t] for t in range(d)) <= h for phi, h in facets):
            out.append(tuple(m))
    return sorted(out)
