from __future__ import annotations

import sympy
from hypothesis import given
from hypothesis import strategies as st

from cbtrace.linalg import column_hermite, det, lattice_complement, nullspace, rank, saturation_basis
from cbtrace.scalars import Q

mats = st.integers(1, 3).flatmap(
    lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=n, max_size=n)
)


@given(mats)
def test_det_and_rank_match_sympy(m):
    M = sympy.Matrix(m)
    assert det(m) == Q(int(M.det()))
    assert rank(m) == M.rank()


@given(mats)
def test_nullspace_is_kernel(m):
    n = len(m[0])
    for v in nullspace(m, n):
        assert all(sum(Q(a) * b for a, b in zip(row, v)) == 0 for row in m)
    assert len(nullspace(m, n)) == n - rank(m)


def test_lattice_complement_is_unimodular_completion():
    u, w = lattice_complement([[1, 1, 0]], 3)
    full = u + w
    assert abs(int(sympy.Matrix(full).det())) == 1


def test_saturation_recovers_primitive_basis():
    basis = saturation_basis([[2, 2]], 2)
    assert basis in ([[1, 1]], [[-1, -1]])


@given(
    st.integers(1, 3).flatmap(
        lambda d: st.tuples(
            st.just(d),
            st.lists(st.lists(st.integers(-4, 4), min_size=d, max_size=d), min_size=1, max_size=d),
        )
    )
)
def test_column_hermite_identity(args):
    d, B = args
    k = len(B)
    H, V = column_hermite(B, d)
    assert abs(int(sympy.Matrix(V).det())) == 1
    BV = sympy.Matrix(B) * sympy.Matrix(V)
    assert BV[:, :k].tolist() == H
    assert all(x == 0 for x in BV[:, k:])
    assert all(H[i][j] == 0 for i in range(k) for j in range(i + 1, k))
