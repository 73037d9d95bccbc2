import random

import pytest
from hypothesis import given, settings, strategies as st

from pmdsarray.gf import field_new
from pmdsarray.matrix import (
    BlockMatrix,
    DenseMatrix,
    Diagonal,
    Inconsistent,
    NotSquare,
    PoleCollision,
    Singular,
    cv_det,
    cv_matrix,
    det,
    det_rows,
    expand,
    inverse,
    matmul_rows,
    rank,
    rank_rows,
    solve,
    solve_rows,
)

GF13 = field_new(13)
GF1331 = field_new(11, 3)


def rand_rows(F, r, c, rng):
    return [[rng.randrange(F.q) for _ in range(c)] for _ in range(r)]


def test_rank_examples():
    assert rank(DenseMatrix.identity(4, GF13)) == 4
    rows = [[1, 2, 3], [4, 5, 6], [1, 2, 3]]
    assert rank(DenseMatrix.from_rows(rows, GF13)) < 3
    vand = [[GF13.pow(x, k) for k in range(4)] for x in (1, 2, 3, 4)]
    assert rank(DenseMatrix.from_rows(vand, GF13)) == 4


def test_det_examples(rng):
    assert det(DenseMatrix.identity(5, GF13)) == 1
    for _ in range(20):
        a, b, c, d = (rng.randrange(13) for _ in range(4))
        assert det_rows([[a, b], [c, d]], GF13) == (a * d - b * c) % 13
    with pytest.raises(NotSquare):
        det(DenseMatrix.zeros(2, 3, GF13))


def test_det_block_diagonal_multiplicative(rng):
    for F in (GF13, GF1331):
        blocks = [rand_rows(F, 2, 2, rng) for _ in range(3)]
        big = [[0] * 6 for _ in range(6)]
        for k, b in enumerate(blocks):
            for i in range(2):
                for j in range(2):
                    big[2 * k + i][2 * k + j] = b[i][j]
        expect = 1
        for b in blocks:
            expect = F.mul(expect, det_rows(b, F))
        assert det_rows(big, F) == expect


def test_det_swap_sign(rng):
    m = rand_rows(GF13, 4, 4, rng)
    swapped = [m[1], m[0]] + m[2:]
    assert det_rows(swapped, GF13) == GF13.neg(det_rows(m, GF13))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.randoms(use_true_random=False))
def test_rank_transpose(r, c, rnd):
    for F in (GF13, GF1331):
        m = rand_rows(F, r, c, rnd)
        assert rank_rows(m, F) == rank_rows([list(x) for x in zip(*m)], F)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.randoms(use_true_random=False))
def test_det_multiplicative(n, rnd):
    a, b = rand_rows(GF13, n, n, rnd), rand_rows(GF13, n, n, rnd)
    assert det_rows(matmul_rows(a, b, GF13), GF13) == GF13.mul(det_rows(a, GF13), det_rows(b, GF13))


def test_solve_round_trip(rng):
    eye = DenseMatrix.identity(3, GF13)
    assert solve(eye, [1, 2, 3]) == [1, 2, 3]
    done = 0
    while done < 10:
        m = DenseMatrix.from_rows(rand_rows(GF13, 6, 6, rng), GF13)
        if det(m) == 0:
            continue
        b = [rng.randrange(13) for _ in range(6)]
        x = solve(m, b)
        assert [GF13.dot(row, x) for row in m.data] == b
        inv = inverse(m)
        assert (m @ inv).data == DenseMatrix.identity(6, GF13).data
        done += 1


def test_solve_singular_consistent(rng):
    base = rand_rows(GF13, 3, 5, rng)
    rows = base + [base[0]]  # duplicated row, rank deficient
    a = [row[:4] for row in rows]
    x_true = [rng.randrange(13) for _ in range(4)]
    b = [[GF13.dot(row, x_true)] for row in a]
    x = solve_rows(a, b, GF13)
    assert [[GF13.dot(row, [v[0] for v in x])] for row in a] == b
    with pytest.raises(Singular):
        solve_rows(a, b, GF13, unique=True)


def test_solve_inconsistent():
    with pytest.raises(Inconsistent):
        solve_rows([[1, 1], [1, 1]], [[1], [2]], GF13)


def test_cv_det_examples():
    F7 = field_new(7)
    assert cv_det([1, 2], [3], F7) == 4
    assert det(cv_matrix([1, 2], [3], F7)) == 4
    c = [1, 2, 5, 9]
    vand = 1
    for i in range(4):
        for j in range(i + 1, 4):
            vand = GF13.mul(vand, GF13.sub(c[j], c[i]))
    assert cv_det(c, [], GF13) == vand
    assert cv_det([4], [1], GF13) == GF13.inv(3)
    with pytest.raises(PoleCollision):
        cv_det([1, 2], [2], GF13)


def test_cv_det_matches_brute_force():
    rnd = random.Random(7)
    for F in (GF13, GF1331):
        for _ in range(100):
            n = rnd.randint(1, 6)
            l = rnd.randint(0, n)
            pts = rnd.sample(range(F.q), n + l)
            c, d = pts[:n], pts[n:]
            assert cv_det(c, d, F) == det(cv_matrix(c, d, F))


def test_expand_examples(rng):
    z = BlockMatrix.build([[None, None], [None, None]], 2, GF13)
    assert expand(z).tolist() == [[0] * 4 for _ in range(4)]
    assert expand(BlockMatrix.build([[Diagonal((3, 4))]], 2, GF13)).tolist() == [[3, 0], [0, 4]]
    blocks = [[DenseMatrix.from_rows(rand_rows(GF13, 3, 3, rng), GF13) for _ in range(2)] for _ in range(2)]
    dense = expand(BlockMatrix.build(blocks, 3, GF13)).tolist()
    for bi in range(2):
        for bj in range(2):
            for i in range(3):
                for j in range(3):
                    assert dense[3 * bi + i][3 * bj + j] == blocks[bi][bj][i, j]


def test_scalar_slices_decouple(rng):
    ell = 3
    grid = [[Diagonal(tuple(rng.randrange(13) for _ in range(ell))) for _ in range(3)] for _ in range(3)]
    B = BlockMatrix.build(grid, ell, GF13)
    full = det(expand(B))
    prod = 1
    for a in range(ell):
        prod = GF13.mul(prod, det_rows(B.scalar_slice(a), GF13))
    # the expansion is a symmetric row/column permutation of blkdiag(slices)
    assert full == prod
