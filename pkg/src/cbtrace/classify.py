"""Dimension of the cone of positive traces.

The cone splits over quotient subspaces ``U``.  Each summand is counted by
the integer points of the convex hull of the even lattice points in the
open symmetrized good-weight polytope of the quotient, shifted by its twist.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import CoulombData, candidate_subspaces, is_quotient_subspace, quotient_hom, rho
from .lattice import Zonotope, even_hull_count, even_points
from .scalars import Q
from .traces import gram_matrix, is_generic

__all__ = [
    "SubspaceCount",
    "ClassificationReport",
    "classify_positive_cone",
    "subspace_count",
    "bridge_candidates",
    "positivity_bridge",
]


@dataclass
class SubspaceCount:
    U: list
    count: int
    good_weights: list
    even_points: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "U": [list(u) for u in self.U],
            "count": self.count,
            "good_weights": list(self.good_weights),
            "even_points": [list(p) for p in self.even_points],
        }


@dataclass
class ClassificationReport:
    subspaces: list
    total_dimension: int
    no_positive_traces: bool
    generic: bool
    shift_sign: int = 1

    def to_json(self) -> dict:
        return {
            "subspaces": [s.to_json() for s in self.subspaces],
            "total_dimension": self.total_dimension,
            "no_positive_traces": self.no_positive_traces,
            "generic": self.generic,
            "shift_sign": self.shift_sign,
        }


def _is_good(b) -> bool:
    return abs(b.re) < Q(1) / 2


def subspace_count(data: CoulombData, U, shift_sign: int = 1) -> SubspaceCount:
    """Count for one quotient subspace ``U`` (a Z-basis, possibly empty).

    The count is the number of integer points in the hull of the even ``m``
    with ``m - shift`` in the open polytope ``sum_good [-1/2,1/2] xi_i^U``,
    where ``shift = sign * zeta^U - (1/2) sum_good xi_i^U``.
    """
    target, _, u_basis = quotient_hom(data, U)
    k = len(u_basis)
    # indices of data weights that survive on U and are good
    good_idx = []
    j = 0
    for i, w in enumerate(data.weights.weights):
        if any(sum(a * b for a, b in zip(w, u)) for u in u_basis):
            if _is_good(target.flavors[j]):
                good_idx.append(i)
            j += 1
    if k == 0:
        return SubspaceCount([], 1, [], [()])
    good = [w for w, b in zip(target.weights.weights, target.flavors) if _is_good(b)]
    Z = Zonotope.symmetrized(good, k) if good else Zonotope((), (Q(0),) * k, k)
    half = [sum((Q(w[t]) for w in good), Q(0)) / 2 for t in range(k)]
    shift = [shift_sign * z - h for z, h in zip(target.zeta, half)]
    pts = even_points(Z, shift)
    return SubspaceCount([list(u) for u in u_basis], even_hull_count(Z, shift), good_idx, pts)


def classify_positive_cone(data: CoulombData, shift_sign: int = 1) -> ClassificationReport:
    """Sum the per-subspace counts over the quotient family.

    ``shift_sign`` flips the sign convention of the twist shift; ``+1`` is
    the calibrated choice.

    Raises
    ------
    ValueError
        If the antilinear automorphism is undefined for the flavors.
    """
    from .algebra import AlgebraElement

    rho(data, AlgebraElement.r(data, (0,) * data.d))  # raises if undefined
    out = []
    full = None
    for U in candidate_subspaces(data):
        ok, _ = is_quotient_subspace(data, U)
        if not ok:
            continue
        sc = subspace_count(data, U, shift_sign)
        if len(sc.U) == data.d:
            full = sc
        if sc.count:
            out.append(sc)
        elif len(sc.U) == data.d:
            out.append(sc)
    total = sum(s.count for s in out)
    return ClassificationReport(out, total, full is None or full.count == 0, is_generic(data), shift_sign)


# positivity bridge ------------------------------------------------------------------------


def bridge_candidates(data: CoulombData) -> list[dict]:
    """Numerators for the full-space weights that are nonnegative on the real line.

    Rank one only: ``y^j`` for even ``j`` and ``y^(j-1) (1+y)^2`` for odd
    ``j``, restricted to exponents admissible for the decay condition.
    """
    from .weights import admissible_numerator_exponents

    if data.d != 1:
        raise ValueError("the positivity bridge is implemented in rank one only")
    adm = {m[0] for m in admissible_numerator_exponents(data)}
    out = []
    for j in sorted(adm):
        if j % 2 == 0:
            out.append({(j,): 1})
        elif {j - 1, j, j + 1} <= adm:
            out.append({(j - 1,): 1, (j,): 2, (j + 1,): 1})
    return out


def positivity_bridge(
    data: CoulombData, radius: int = 1, degree: int = 2, tol: float = 1e-10, seed: int = 0
) -> dict:
    """Rank of the admissible weights whose Gram verdict is positive.

    Each candidate numerator is checked for nonnegativity, turned into a
    quadrature trace and tested on Gram blocks; the returned ``rank`` is the
    dimension of the span of the positive ones.
    """
    from .weights import WeightFunction, numerator_nonnegativity, quadrature_functional

    cands = bridge_candidates(data)
    need = 2 * degree + sum(abs(x) for w in data.weights.weights for x in w) * radius + 2
    exps = sorted({m for c in cands for m in c})
    positive = []
    verdicts = []
    for c in cands:
        nn = numerator_nonnegativity(c, seed=seed)
        wf = WeightFunction.for_data(data, c)
        T = quadrature_functional(data, wf, degree=need, tol=tol)
        # positivity is invariant under positive rescaling
        t0 = abs(complex(T.moment((0,) * data.d)))
        if t0:
            T = T.scaled(1.0 / t0)
        rep = gram_matrix(data, T, radius=radius, degree=degree, tol=tol)
        verdicts.append({"numerator": sorted((list(m), int(v)) for m, v in c.items()),
                         "nonnegativity": nn.verdict, "gram": rep.verdict})
        if rep.verdict == "positive":
            positive.append([float(c.get(m, 0)) for m in exps])
    rank = int(np.linalg.matrix_rank(np.array(positive))) if positive else 0
    return {"rank": rank, "candidates": verdicts, "exponents": [list(m) for m in exps]}


