"""Linear algebra over GF(2) with bit-packed rows.

A vector in GF(2)^n is a plain int whose bit i holds coordinate i; Python
ints are arbitrary precision, so any ambient dimension works.  A matrix is
a tuple of row ints plus an explicit column count.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

__all__ = [
    "BitMatrix",
    "RrefResult",
    "dot",
    "identity",
    "kernel",
    "left_kernel_raw",
    "mat_mul",
    "mat_pow",
    "rank_raw",
    "rref",
    "rref_raw",
    "transpose",
    "vec_mat",
]


class BitMatrix(NamedTuple):
    """Matrix over GF(2); rows[i] bit j is the (i, j) entry."""

    ncols: int
    rows: tuple[int, ...]

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1


class RrefResult(NamedTuple):
    rows: tuple[int, ...]  # nonzero rows, sorted by pivot column
    pivots: tuple[int, ...]  # strictly increasing pivot columns


def identity(n: int) -> BitMatrix:
    return BitMatrix(n, tuple(1 << i for i in range(n)))


def dot(a: int, b: int) -> int:
    """Standard bilinear form: parity of the shared support."""
    return (a & b).bit_count() & 1


def vec_mat(v: int, rows: Sequence[int]) -> int:
    """Row vector times matrix: XOR of the rows selected by bits of v."""
    acc = 0
    while v:
        low = v & -v
        acc ^= rows[low.bit_length() - 1]
        v ^= low
    return acc


def mat_mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.ncols != b.nrows:
        raise ValueError(f"shape mismatch: {a.ncols} cols vs {b.nrows} rows")
    brows = b.rows
    return BitMatrix(b.ncols, tuple(vec_mat(r, brows) for r in a.rows))


def mat_pow(m: BitMatrix, e: int) -> BitMatrix:
    if m.ncols != m.nrows:
        raise ValueError("power of a non-square matrix")
    if e < 0:
        raise ValueError("negative power")
    acc = identity(m.ncols)
    base = m
    while e:
        if e & 1:
            acc = mat_mul(acc, base)
        base = mat_mul(base, base)
        e >>= 1
    return acc


def transpose(m: BitMatrix) -> BitMatrix:
    out = [0] * m.ncols
    for i, r in enumerate(m.rows):
        bit = 1 << i
        while r:
            low = r & -r
            out[low.bit_length() - 1] |= bit
            r ^= low
    return BitMatrix(m.nrows, tuple(out))


def rref_raw(rows: Iterable[int]) -> RrefResult:
    """Reduced row echelon form of int-packed rows.

    Pivot of a row is its lowest set bit; each pivot column is zero in
    every other row, and rows come back sorted by pivot column.
    """
    by_pivot: dict[int, int] = {}  # pivot mask -> row
    for r in rows:
        for mask, basis_row in by_pivot.items():
            if r & mask:
                r ^= basis_row
        if r:
            mask = r & -r
            for other_mask, other_row in by_pivot.items():
                if other_row & mask:
                    by_pivot[other_mask] = other_row ^ r
            by_pivot[mask] = r
    masks = sorted(by_pivot)
    return RrefResult(
        tuple(by_pivot[m] for m in masks),
        tuple(m.bit_length() - 1 for m in masks),
    )


def rank_raw(rows: Iterable[int]) -> int:
    return len(rref_raw(rows).rows)


def rref(m: BitMatrix) -> RrefResult:
    return rref_raw(m.rows)


def left_kernel_raw(rows: Sequence[int]) -> tuple[int, ...]:
    """RREF basis of {c : XOR of rows[i] over bits i of c == 0}."""
    by_pivot: dict[int, tuple[int, int]] = {}  # pivot mask -> (row, combo)
    found: list[int] = []
    for i, r in enumerate(rows):
        combo = 1 << i
        for mask, (basis_row, basis_combo) in by_pivot.items():
            if r & mask:
                r ^= basis_row
                combo ^= basis_combo
        if r:
            mask = r & -r
            for other_mask, (other_row, other_combo) in by_pivot.items():
                if other_row & mask:
                    by_pivot[other_mask] = (other_row ^ r, other_combo ^ combo)
            by_pivot[mask] = (r, combo)
        else:
            found.append(combo)
    return rref_raw(found).rows


def kernel(m: BitMatrix) -> BitMatrix:
    """Basis of the left kernel {x : x m = 0}, as rows of a BitMatrix."""
    return BitMatrix(m.nrows, left_kernel_raw(m.rows))
