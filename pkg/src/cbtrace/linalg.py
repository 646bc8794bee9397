"""Exact linear algebra over Q, Z and generic exact fields.

Everything here works on small dense matrices given as lists of rows.
"""

from __future__ import annotations

from math import gcd

from .scalars import Q, mpq


def to_rational_matrix(rows) -> list[list[mpq]]:
    return [[Q(x) for x in row] for row in rows]


def rref(rows, *, zero=None):
    """Reduced row echelon form over an exact field.

    Returns ``(matrix, pivots)``.  Entries may be any exact field elements
    supporting ``+ - * /`` and truthiness.
    """
    m = [[Q(x) if isinstance(x, int) else x for x in r] for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c] if not hasattr(m[r][c], "inverse") else m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows) -> int:
    rows = to_rational_matrix(rows)
    if not rows or not rows[0]:
        return 0
    return len(rref(rows)[1])


def nullspace(rows, ncols: int | None = None, one=None):
    """Basis of the right kernel ``{x : A x = 0}`` over an exact field."""
    if ncols is None:
        ncols = len(rows[0])
    if one is None:
        one = Q(1)
    zero = one - one
    if not rows:
        return [[one if i == j else zero for i in range(ncols)] for j in range(ncols)]
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for i, p in enumerate(pivots):
            v[p] = -m[i][f]
        basis.append(v)
    return basis


def solve(rows, rhs):
    """Solve a consistent square or overdetermined rational system exactly."""
    aug = [list(r) + [b] for r, b in zip(to_rational_matrix(rows), [Q(x) for x in rhs])]
    m, pivots = rref(aug)
    n = len(rows[0])
    if n in pivots:
        raise ValueError("inconsistent linear system")
    x = [Q(0)] * n
    for i, p in enumerate(pivots):
        x[p] = m[i][n]
    return x


def det(rows) -> mpq:
    """Exact determinant of a square rational matrix."""
    m = to_rational_matrix(rows)
    n = len(m)
    out = Q(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return Q(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            out = -out
        out *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return out


def primitive(v) -> tuple[int, ...]:
    """Scale a rational vector to a primitive integer vector (same direction)."""
    v = [Q(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def canonical_sign(v) -> tuple[int, ...]:
    """Flip so that the first nonzero entry is positive."""
    for x in v:
        if x:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def integer_kernel_line(rows, d: int) -> tuple[int, ...] | None:
    """Primitive generator of a one-dimensional kernel, or None."""
    ker = nullspace(to_rational_matrix(rows), d) if rows else None
    if rows and len(ker) != 1:
        return None
    if not rows:
        return (1,) if d == 1 else None
    return primitive(ker[0])


def column_hermite(basis: list[list[int]], d: int):
    """Unimodular column reduction ``B V = [H | 0]``.

    Returns ``(H, V)`` where ``H`` is the ``k x k`` lower-triangular block and
    ``V`` is a unimodular ``d x d`` integer matrix.
    """
    k = len(basis)
    B = [list(map(int, r)) for r in basis]
    V = [[1 if i == j else 0 for j in range(d)] for i in range(d)]

    def colop(i: int, j: int, a: int, b: int, c: int, e: int) -> None:
        # (col_i, col_j) <- (a col_i + b col_j, c col_i + e col_j)
        for M in (B, V):
            for row in M:
                x, y = row[i], row[j]
                row[i], row[j] = a * x + b * y, c * x + e * y

    for r in range(k):
        for j in range(r + 1, d):
            x, y = B[r][r], B[r][j]
            if y == 0:
                continue
            g, s, t = _xgcd(x, y)
            # [x y] [s -y/g; t x/g] = [g 0]
            colop(r, j, s, t, -y // g, x // g)
        if B[r][r] < 0:
            for M in (B, V):
                for row in M:
                    row[r] = -row[r]
    H = [row[:k] for row in B]
    return H, V


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def integer_inverse(V: list[list[int]]) -> list[list[int]]:
    n = len(V)
    aug = [[Q(x) for x in row] + [Q(1 if i == j else 0) for j in range(n)] for i, row in enumerate(V)]
    m, _ = rref(aug)
    out = []
    for row in m:
        vals = row[n:]
        if any(x.denominator != 1 for x in vals):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in vals])
    return out


def lattice_complement(basis: list[list[int]], d: int):
    """Split Z^d as U + W for a saturated sublattice U.

    Returns ``(u_basis, w_basis)`` as integer row vectors whose union is a
    Z-basis of Z^d, with ``u_basis`` a Z-basis of U.

    Raises
    ------
    ValueError
        If the rows are dependent or do not span a saturated sublattice.
    """
    basis = [list(map(int, b)) for b in basis]
    k = len(basis)
    if k and rank(basis) != k:
        raise ValueError("sublattice generators are linearly dependent")
    if k == 0:
        return [], [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    H, V = column_hermite(basis, d)
    prod = 1
    for i in range(k):
        prod *= H[i][i]
    if abs(prod) != 1:
        raise ValueError(f"sublattice is not saturated (index {abs(prod)})")
    Vinv = integer_inverse(V)
    # B = [H | 0] V^{-1}; rows of V^{-1} beyond k complement U, and the first k
    # rows span U because H is unimodular.
    return [Vinv[i] for i in range(k)], [Vinv[i] for i in range(k, d)]


def saturation_basis(vectors: list[list[int]], d: int) -> list[list[int]]:
    """Z-basis of (span_Q vectors) ∩ Z^d."""
    vectors = [v for v in vectors if any(v)]
    if not vectors:
        return []
    r = rank(vectors)
    if r == d:
        return [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    # annihilator of the span, then its annihilator over Z
    ann = [list(primitive(v)) for v in nullspace(to_rational_matrix(vectors), d)]
    ker = [list(primitive(v)) for v in nullspace(to_rational_matrix(ann), d)]
    # ker is a Q-basis of the span; reduce to a Z-basis of the saturation
    _, V = column_hermite(ann, d)
    # columns k.. of V span the integer kernel of ann
    k = len(ann)
    cols = [[V[i][j] for i in range(d)] for j in range(k, d)]
    assert len(cols) == len(ker)
    return [list(canonical_sign(c)) for c in cols]
