"""Twisted traces as linear functionals on the polynomial subalgebra.

A trace ``T`` is determined by its moments ``T(z^alpha)``.  It is a
``g``-twisted trace iff for every coweight ``lam`` and polynomial ``R``::

    T(S_{lam/2}(R P_lam)) = exp(2 pi i zeta(lam)) T(S_{-lam/2}(R P_lam)).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .algebra import AlgebraElement, CoulombData, p_lambda, rho
from .lattice import facet_coweights
from .poly import Poly, monomials
from .scalars import GaussianRational, Q, is_exact, to_complex

log = logging.getLogger(__name__)

__all__ = [
    "TraceFunctional",
    "TraceSpace",
    "GramBlock",
    "GramReport",
    "trace_residual",
    "residual_row",
    "solve_trace_space",
    "gram_matrix",
    "positivity_verdict",
    "coweight_box",
    "is_generic",
]


@dataclass
class TraceFunctional:
    """Linear functional on polynomials of degree at most ``degree``.

    Parameters
    ----------
    rank : int
    degree : int
    moments : dict
        ``alpha -> T(z^alpha)``; missing entries within the degree bound
        are zero.  Values are exact scalars or Python complex numbers.
    kind : str
        ``"solver"`` or ``"quadrature"``.
    """

    rank: int
    degree: int
    moments: dict
    kind: str = "solver"
    meta: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.moments.values())

    def moment(self, alpha):
        alpha = tuple(alpha)
        if sum(alpha) > self.degree:
            raise ValueError(f"degree {sum(alpha)} exceeds the trace's bound {self.degree}")
        return self.moments.get(alpha, GaussianRational(0) if self.exact else 0j)

    def __call__(self, f: Poly):
        if f.rank != self.rank:
            raise ValueError(f"polynomial rank {f.rank} != trace rank {self.rank}")
        if f.degree() > self.degree:
            raise ValueError(f"degree {f.degree()} exceeds the trace's bound {self.degree}")
        if self.exact:
            total = GaussianRational(0)
            for exp, c in f.terms.items():
                v = self.moments.get(exp)
                if v is not None:
                    total = total + c * v
            return total
        total = 0j
        for exp, c in f.terms.items():
            v = self.moments.get(exp)
            if v is not None:
                total += complex(c) * complex(v)
        return total

    def scaled(self, c) -> "TraceFunctional":
        return TraceFunctional(
            self.rank, self.degree, {k: v * c for k, v in self.moments.items()}, self.kind, dict(self.meta)
        )

    def numeric(self) -> "TraceFunctional":
        return TraceFunctional(
            self.rank, self.degree, {k: to_complex(v) for k, v in self.moments.items()}, self.kind, dict(self.meta)
        )

    def normalized(self) -> "TraceFunctional":
        """Scale so that ``T(1) = 1``."""
        t0 = self.moment((0,) * self.rank)
        if not t0:
            raise ValueError("T(1) = 0, cannot normalize")
        inv = t0.inverse() if hasattr(t0, "inverse") else 1 / t0
        return self.scaled(inv)

    @classmethod
    def zero(cls, rank: int, degree: int) -> "TraceFunctional":
        return cls(rank, degree, {}, "solver")


def _shift_pair(data: CoulombData, lam, R: Poly):
    P = p_lambda(data, lam)
    RP = R * P
    half = [Q(x) / 2 for x in lam]
    return RP.shift(half), RP.shift([-h for h in half])


def trace_residual(data: CoulombData, T: TraceFunctional, lam, R: Poly):
    """``T(S_{lam/2}(R P_lam)) - exp(2 pi i zeta(lam)) T(S_{-lam/2}(R P_lam))``.

    Raises
    ------
    ValueError
        If ``deg R + deg P_lam`` exceeds the trace's degree bound.
    """
    deg = R.degree() + p_lambda(data, lam).degree()
    if deg > T.degree:
        raise ValueError(f"deg R + deg P_lam = {deg} exceeds trace degree {T.degree}")
    plus, minus = _shift_pair(data, lam, R)
    phase = data.phase(lam)
    if T.exact:
        return T(plus) - phase * T(minus)
    return complex(T(plus)) - complex(phase) * complex(T(minus))


def residual_row(data: CoulombData, lam, R: Poly, index: dict):
    """Coefficient row of the residual functional on the monomial basis."""
    plus, minus = _shift_pair(data, lam, R)
    phase = data.phase(lam)
    row = {}
    for exp, c in plus.terms.items():
        row[index[exp]] = c
    for exp, c in minus.terms.items():
        j = index[exp]
        v = -(phase * c)
        row[j] = row[j] + v if j in row else v
    return row


def coweight_box(d: int, radius: int) -> list[tuple[int, ...]]:
    return [lam for lam in product(range(-radius, radius + 1), repeat=d) if any(lam)]


def is_generic(data: CoulombData) -> bool:
    """True when ``exp(2 pi i zeta(lam)) != 1`` on every facet coweight."""
    for lam in facet_coweights(data.weights):
        t = sum((z * x for z, x in zip(data.zeta, lam)), Q(0))
        if t.denominator == 1:
            return False
    return True


def _half_coweights(lams):
    """Drop ``-lam`` when ``lam`` is present; the two residual systems agree."""
    out, seen = [], set()
    for lam in lams:
        lam = tuple(lam)
        neg = tuple(-x for x in lam)
        if lam in seen or neg in seen or not any(lam):
            continue
        seen.add(lam)
        out.append(lam)
    return out


@dataclass
class TraceSpace:
    """Result of :func:`solve_trace_space`."""

    basis: list
    dimension: int
    degree: int
    coweights: list
    mode: str
    stable: bool | None
    generic: bool
    singular_values: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "degree": self.degree,
            "coweights": [list(c) for c in self.coweights],
            "mode": self.mode,
            "stable": self.stable,
            "generic": self.generic,
        }


def _assemble(data: CoulombData, N: int, lams):
    basis = monomials(data.d, N)
    index = {e: i for i, e in enumerate(basis)}
    rows = []
    for lam in _half_coweights(lams):
        P = p_lambda(data, lam)
        dp = P.degree()
        if dp > N:
            continue
        for alpha in monomials(data.d, N - dp):
            rows.append(residual_row(data, lam, Poly.monomial(alpha), index))
    return basis, rows


def _exact_nullspace(rows, ncols):
    """Incremental exact elimination on sparse rows."""
    pivots: dict[int, dict] = {}
    for row in rows:
        r = {j: v for j, v in row.items() if v}
        for p in sorted(pivots):
            if p in r and r[p]:
                f = r[p]
                for j, v in pivots[p].items():
                    nv = (r[j] - f * v) if j in r else -(f * v)
                    r[j] = nv
            r = {j: v for j, v in r.items() if v}
        if not r:
            continue
        p = min(r)
        inv = r[p].inverse()
        r = {j: v * inv for j, v in r.items()}
        # keep the pivot rows fully reduced
        for q, prow in pivots.items():
            if p in prow:
                f = prow[p]
                for j, v in r.items():
                    prow[j] = prow[j] - f * v if j in prow else -(f * v)
                pivots[q] = {j: v for j, v in prow.items() if v}
        pivots[p] = r
        if len(pivots) == ncols:
            break
    free = [c for c in range(ncols) if c not in pivots]
    one = GaussianRational(1)
    out = []
    for f in free:
        vec = {f: one}
        for p, prow in pivots.items():
            if f in prow:
                vec[p] = -prow[f]
        out.append(vec)
    return out


def _float_nullspace(rows, ncols, rtol):
    if not rows:
        return np.eye(ncols, dtype=complex), np.array([])
    A = np.zeros((len(rows), ncols), dtype=complex)
    for i, row in enumerate(rows):
        for j, v in row.items():
            A[i, j] = complex(v)
    norms = np.linalg.norm(A, axis=1)
    A = A[norms > 0] / norms[norms > 0, None]
    if A.shape[0] == 0:
        return np.eye(ncols, dtype=complex), np.array([])
    _, s, vh = np.linalg.svd(A)
    r = int(np.sum(s > rtol * s[0]))
    return vh[r:].conj().T, s


def solve_trace_space(
    data: CoulombData,
    degree: int = 8,
    coweights=None,
    *,
    radius: int = 2,
    mode: str = "auto",
    rtol: float = 1e-6,
    check_stability: bool = True,
) -> TraceSpace:
    """Null space of the truncated trace condition.

    Parameters
    ----------
    degree : int
        Functionals live on polynomials of degree ``<= degree``.
    coweights : list, optional
        Constraint coweights; default facet coweights plus the box
        ``|lam|_inf <= radius``.
    mode : {"auto", "exact", "float"}
        ``"auto"`` uses exact elimination when all phases lie in Q(i) and
        floating SVD otherwise.
    rtol : float
        Relative singular-value cutoff in float mode.
    check_stability : bool
        Also solve with the box radius enlarged by one and report whether the
        dimension changed.
    """
    if degree < 0:
        raise ValueError("empty monomial basis")
    if coweights is None:
        coweights = facet_coweights(data.weights) + coweight_box(data.d, radius)
    coweights = _half_coweights(coweights)
    if mode == "auto":
        gauss = all(
            (4 * sum((z * x for z, x in zip(data.zeta, lam)), Q(0))).denominator == 1 for lam in coweights
        )
        mode = "exact" if gauss else "float"
    basis, rows = _assemble(data, degree, coweights)
    n = len(basis)
    svals: list = []
    if mode == "exact":
        vecs = _exact_nullspace(rows, n)
        funcs = [
            TraceFunctional(data.d, degree, {basis[j]: v for j, v in vec.items()}, "solver") for vec in vecs
        ]
    elif mode == "float":
        ns, s = _float_nullspace(rows, n, rtol)
        svals = [float(x) for x in s]
        funcs = [
            TraceFunctional(data.d, degree, {basis[j]: complex(ns[j, k]) for j in range(n)}, "solver")
            for k in range(ns.shape[1])
        ]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    stable = None
    if check_stability:
        bigger = solve_trace_space(
            data,
            degree,
            coweights + coweight_box(data.d, radius + 1),
            mode=mode,
            rtol=rtol,
            check_stability=False,
        )
        stable = bigger.dimension == len(funcs)
    return TraceSpace(funcs, len(funcs), degree, coweights, mode, stable, is_generic(data), svals)


# Gram matrices -----------------------------------------------------------------


@dataclass
class GramBlock:
    lam: tuple
    matrix: np.ndarray
    min_eig: float
    hermitian_defect: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass
class GramReport:
    blocks: list
    radius: int
    degree: int
    tol: float
    verdict: str = ""

    def to_json(self) -> dict:
        return {
            "blocks": [
                {
                    "lambda": list(b.lam),
                    "dim": b.dim,
                    "min_eig": b.min_eig,
                    "hermitian_defect": b.hermitian_defect,
                }
                for b in self.blocks
            ],
            "cutoffs": {"lambda_radius": self.radius, "degree": self.degree},
            "verdict": self.verdict,
        }


def gram_entry(data: CoulombData, T: TraceFunctional, a: AlgebraElement, b: AlgebraElement):
    """``T`` applied to the weight-zero part of ``a rho(b)``."""
    prod = a * rho(data, b)
    return T(prod.part((0,) * data.d))


def gram_matrix(
    data: CoulombData, T: TraceFunctional, radius: int = 2, degree: int = 3, tol: float = 1e-10
) -> GramReport:
    """Blocks ``G_ab = T((r^lam z^a) rho(r^lam z^b))`` for ``|lam|_inf <= radius``.

    Raises
    ------
    ValueError
        If ``rho`` is undefined or ``T`` is not defined to the needed degree.
    """
    d = data.d
    mons = monomials(d, degree)
    blocks = []
    lams = [(0,) * d] + coweight_box(d, radius)
    for lam in lams:
        elems = [AlgebraElement.r(data, lam, Poly.monomial(m)) for m in mons]
        G = np.zeros((len(mons), len(mons)), dtype=complex)
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                G[i, j] = complex(gram_entry(data, T, a, b))
        defect = float(np.max(np.abs(G - G.conj().T))) if G.size else 0.0
        H = (G + G.conj().T) / 2
        eig = float(np.linalg.eigvalsh(H).min())
        blocks.append(GramBlock(tuple(lam), G, eig, defect))
    rep = GramReport(blocks, radius, degree, tol)
    rep.verdict = positivity_verdict(rep, tol)
    return rep


def positivity_verdict(report: GramReport, tol: float | None = None) -> str:
    """``positive`` / ``not-positive`` / ``inconclusive`` from block eigenvalues."""
    tol = report.tol if tol is None else tol
    eigs = [b.min_eig for b in report.blocks]
    if eigs and all(e > tol for e in eigs):
        return "positive"
    if any(e < -tol for e in eigs):
        return "not-positive"
    return "inconclusive"
