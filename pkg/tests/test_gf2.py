from __future__ import annotations

import random

import pytest

from qdesigns.gf2 import (
    BitMatrix,
    dot,
    identity,
    kernel,
    left_kernel_raw,
    mat_mul,
    mat_pow,
    rank_raw,
    rref,
    rref_raw,
    transpose,
    vec_mat,
)


def random_matrix(rng: random.Random, nrows: int, ncols: int) -> BitMatrix:
    return BitMatrix(ncols, tuple(rng.randrange(1 << ncols) for _ in range(nrows)))


def test_identity_and_entry():
    m = identity(4)
    assert m.nrows == m.ncols == 4
    assert [[m.entry(i, j) for j in range(4)] for i in range(4)] == [
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
    ]


def test_dot_parity():
    assert dot(0b101, 0b100) == 1
    assert dot(0b101, 0b111) == 0
    assert dot(0, 0b1111) == 0


def test_vec_mat_selects_rows():
    rows = (0b001, 0b010, 0b100)
    assert vec_mat(0b101, rows) == 0b101
    assert vec_mat(0b011, (3, 5, 9)) == 3 ^ 5
    assert vec_mat(0, rows) == 0


def test_vec_mat_is_linear():
    rng = random.Random(7)
    rows = tuple(rng.randrange(1 << 6) for _ in range(5))
    for _ in range(50):
        a = rng.randrange(1 << 5)
        b = rng.randrange(1 << 5)
        assert vec_mat(a ^ b, rows) == vec_mat(a, rows) ^ vec_mat(b, rows)


def test_rref_known_case():
    # rows 110, 011, 101 over GF(2): rank 2, pivots at columns 0 and 1
    res = rref_raw([0b011, 0b110, 0b101])
    assert res.pivots == (0, 1)
    assert len(res.rows) == 2
    # pivot columns are cleared in the other row
    for i, r in enumerate(res.rows):
        for j, p in enumerate(res.pivots):
            expected = 1 if i == j else 0
            assert (r >> p) & 1 == expected


def test_rref_idempotent_and_rank():
    rng = random.Random(1)
    for _ in range(200):
        nrows = rng.randrange(1, 7)
        ncols = rng.randrange(1, 10)
        rows = [rng.randrange(1 << ncols) for _ in range(nrows)]
        res = rref_raw(rows)
        again = rref_raw(res.rows)
        assert again.rows == res.rows
        assert len(res.rows) == len(res.pivots) == rank_raw(rows)
        assert list(res.pivots) == sorted(res.pivots)
        # every original row reduces to zero against the rref rows
        for r in rows:
            x = r
            for br in res.rows:
                if x & (br & -br):
                    x ^= br
            assert x == 0


def test_matmul_identity_and_associativity():
    rng = random.Random(2)
    for _ in range(50):
        a = random_matrix(rng, 4, 5)
        b = random_matrix(rng, 5, 3)
        c = random_matrix(rng, 3, 6)
        assert mat_mul(identity(4), a) == a
        assert mat_mul(a, identity(5)) == a
        assert mat_mul(mat_mul(a, b), c) == mat_mul(a, mat_mul(b, c))


def test_matmul_shape_mismatch():
    with pytest.raises(ValueError):
        mat_mul(identity(3), identity(4))


def test_mat_pow():
    rng = random.Random(3)
    m = random_matrix(rng, 5, 5)
    assert mat_pow(m, 0) == identity(5)
    assert mat_pow(m, 1) == m
    assert mat_pow(m, 5) == mat_mul(m, mat_mul(m, mat_mul(m, mat_mul(m, m))))


def test_transpose_involution_and_product():
    rng = random.Random(4)
    for _ in range(50):
        a = random_matrix(rng, 4, 6)
        b = random_matrix(rng, 6, 3)
        assert transpose(transpose(a)) == a
        assert transpose(mat_mul(a, b)) == mat_mul(transpose(b), transpose(a))


def test_kernel_rank_nullity_and_annihilation():
    rng = random.Random(5)
    for _ in range(100):
        nrows = rng.randrange(1, 8)
        ncols = rng.randrange(1, 8)
        m = random_matrix(rng, nrows, ncols)
        ker = kernel(m)
        assert ker.nrows == nrows - rank_raw(m.rows)
        for c in ker.rows:
            assert vec_mat(c, m.rows) == 0
        # kernel rows are themselves in rref (canonical)
        assert rref_raw(ker.rows).rows == ker.rows


def test_left_kernel_exhaustive_small():
    rng = random.Random(6)
    for _ in range(30):
        nrows = rng.randrange(1, 6)
        ncols = rng.randrange(1, 6)
        rows = [rng.randrange(1 << ncols) for _ in range(nrows)]
        basis = left_kernel_raw(rows)
        members = {0}
        for b in basis:
            members |= {x ^ b for x in members}
        brute = {c for c in range(1 << nrows) if vec_mat(c, rows) == 0}
        assert members == brute


def test_rref_wrapper_matches_raw():
    m = BitMatrix(4, (0b1010, 0b0110, 0b1100))
    assert rref(m) == rref_raw(m.rows)
