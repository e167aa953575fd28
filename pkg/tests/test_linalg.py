import itertools
import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st
from sympy.matrices.normalforms import smith_normal_form

from exstats.linalg import (ResourceLimitError, SparseIntMatrix, determinant, hermite_normal_form,
                            kernel_basis, quotient_invariants, same_lattice, snf, solve_integer)


def M(rows, ncols=None):
    return SparseIntMatrix.from_dense(rows, ncols)


def check_snf(m: SparseIntMatrix):
    res = snf(m, track_u=True, track_uinv=True, track_v=True, track_vinv=True)
    assert res.verify(m)
    r, c = m.shape
    assert abs(determinant(res.U)) == 1 and abs(determinant(res.V)) == 1
    assert res.U @ res.U_inv == SparseIntMatrix.identity(r)
    assert res.V @ res.V_inv == SparseIntMatrix.identity(c)
    lam = res.invariant_factors
    assert all(x > 0 for x in lam)
    assert all(lam[i + 1] % lam[i] == 0 for i in range(len(lam) - 1))
    assert all(x == 0 for x in res.diagonal[res.rank:])
    return res


def sympy_diagonal(rows, r, c):
    if r == 0 or c == 0:
        return []
    d = smith_normal_form(sympy.Matrix(rows), domain=sympy.ZZ)
    return sorted(abs(int(d[i, i])) for i in range(min(r, c)) if d[i, i] != 0)


matrices = st.integers(0, 8).flatmap(lambda r: st.integers(0, 8).flatmap(
    lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r)
    .map(lambda rows: (rows, r, c))))


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_snf_properties_against_sympy(data):
    rows, r, c = data
    m = M(rows, c)
    res = check_snf(m)
    assert sorted(res.invariant_factors) == sympy_diagonal(rows, r, c)


def test_snf_examples():
    res = check_snf(M([[1, 0], [0, 1]]))
    assert res.diagonal == (1, 1)
    assert check_snf(M([[2, 0], [0, 3]])).diagonal == (1, 6)
    res = check_snf(M([[2, 4], [4, 8]]))
    assert res.diagonal == (2, 0) and res.rank == 1


def test_snf_empty_shapes():
    for r, c in [(0, 0), (0, 3), (3, 0)]:
        res = snf(SparseIntMatrix(r, c))
        assert res.rank == 0 and res.diagonal == (0,) * min(r, c)
        assert res.verify(SparseIntMatrix(r, c))


def test_snf_without_v_matches():
    rng = random.Random(5)
    for _ in range(50):
        rows = [[rng.randint(-5, 5) for _ in range(6)] for _ in range(5)]
        a = snf(M(rows), track_u=False, track_v=False)
        b = snf(M(rows))
        assert a.diagonal == b.diagonal


def test_resource_cap():
    with pytest.raises(ResourceLimitError):
        snf(SparseIntMatrix.identity(10), max_cols=5)


def test_solve_examples():
    assert solve_integer(M([[2]]), [4]) == [2]
    assert solve_integer(M([[2]]), [3]) is None
    x = solve_integer(M([[1, 2]]), [5])
    assert x[0] + 2 * x[1] == 5
    with pytest.raises(ValueError):
        solve_integer(M([[1, 2]]), [5, 1])


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 3).flatmap(lambda r: st.integers(1, 3).flatmap(lambda c: st.tuples(
    st.lists(st.lists(st.integers(-4, 4), min_size=c, max_size=c), min_size=r, max_size=r),
    st.lists(st.integers(-6, 6), min_size=r, max_size=r)))))
def test_solve_matches_brute_force(data):
    rows, b = data
    m = M(rows)
    x = solve_integer(m, b)
    if x is not None:
        assert [sum(a * y for a, y in zip(row, x)) for row in rows] == b
    else:
        box = range(-12, 13)
        for y in itertools.product(box, repeat=m.ncols):
            assert [sum(a * t for a, t in zip(row, y)) for row in rows] != b


def test_kernel_examples():
    assert kernel_basis(SparseIntMatrix.identity(3)).ncols == 0
    k = kernel_basis(M([[1, 1]]))
    assert k.ncols == 1 and abs(k[0, 0]) == 1 and k[0, 0] == -k[1, 0]
    k = kernel_basis(M([[2, 4], [4, 8]]))
    assert k.ncols == 1 and same_lattice(k, M([[2], [-1]]))


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_kernel_rank(data):
    rows, r, c = data
    m = M(rows, c)
    k = kernel_basis(m)
    assert all(not m.apply(col) for col in k.columns)
    assert k.ncols == c - snf(m, track_u=False, track_v=False).rank


def test_quotient_invariants_examples():
    assert quotient_invariants(SparseIntMatrix.identity(3), 3) == [1, 1, 1]
    assert quotient_invariants(M([[2, 0], [0, 3]]), 2) == [1, 6]
    assert quotient_invariants(M([[2], [4]]), 2) == [2, 0]


def test_hermite_form_is_canonical():
    rng = random.Random(3)
    for _ in range(200):
        n, k = rng.randint(1, 5), rng.randint(1, 5)
        a = M([[rng.randint(-4, 4) for _ in range(k)] for _ in range(n)], k)
        cols = [dict(c) for c in a.columns]
        for _ in range(8):
            i, j = rng.randrange(k), rng.randrange(k)
            if i != j:
                f = rng.randint(-3, 3)
                for row, v in cols[j].items():
                    cols[i][row] = cols[i].get(row, 0) + f * v
        rng.shuffle(cols)
        b = SparseIntMatrix.from_columns(n, cols)
        assert hermite_normal_form(a) == hermite_normal_form(b)
    assert not same_lattice(M([[2]]), M([[1]]))
