"""Shipped construction data: a large set of 2-(8, 4, 217) designs over GF(2).

Three designs are stored as orbit representatives under a group of order
204 given by two generator matrices.  Each representative is a quadruple
[W, X, Y, Z] of row values in 1..255; row value sum(c_i * 2^i) encodes the
basis row (c_0, ..., c_7).  Loading always recomputes SHA-256 digests of
the data files against the shipped checksum file.
"""

from __future__ import annotations

import hashlib
from functools import lru_cache
from importlib import resources
from typing import Iterable, NamedTuple, Sequence

from .designs import Design, LargeSet, VerificationError, verify_design, verify_large_set
from .gf2 import BitMatrix, rank_raw
from .grassmann import Subspace, gaussian_binomial, span
from .groups import Group, close_group, orbit_of, parse_generator_text

__all__ = [
    "QuadrupleRecord",
    "build_design_from_reps",
    "builtin_group",
    "builtin_large_set",
    "builtin_design",
    "builtin_orbit_representatives",
    "decode_quadruple",
    "AMBIENT_DIM",
    "BLOCK_DIM",
    "DESIGN_COUNT",
    "DESIGN_LAMBDA",
    "STRENGTH",
]

AMBIENT_DIM = 8
BLOCK_DIM = 4
STRENGTH = 2
DESIGN_COUNT = 3
DESIGN_LAMBDA = 217


class QuadrupleRecord(NamedTuple):
    w: int
    x: int
    y: int
    z: int


class DecodeError(ValueError):
    pass


def decode_quadruple(q: QuadrupleRecord | Sequence[int]) -> BitMatrix:
    """Quadruple of row values -> 4x8 basis matrix; rows must be independent."""
    rows = tuple(q)
    if len(rows) != 4:
        raise DecodeError(f"expected 4 row values, got {len(rows)}")
    for r in rows:
        if not 1 <= r <= 255:
            raise DecodeError(f"row value {r} outside 1..255")
    if rank_raw(rows) != 4:
        raise DecodeError(f"rows {list(rows)} span less than 4 dimensions")
    return BitMatrix(AMBIENT_DIM, rows)


def _data_bytes(name: str) -> bytes:
    return resources.files(__package__).joinpath("data").joinpath(name).read_bytes()


@lru_cache(maxsize=None)
def _verified_data_text(name: str) -> str:
    expected = {}
    for line in _data_bytes("checksums.sha256").decode("ascii").splitlines():
        digest, _, fname = line.strip().partition("  ")
        expected[fname] = digest
    raw = _data_bytes(name)
    actual = hashlib.sha256(raw).hexdigest()
    if name not in expected:
        raise ValueError(f"data file {name} has no recorded checksum")
    if actual != expected[name]:
        raise ValueError(
            f"data file {name} fails its checksum: {actual} != {expected[name]}"
        )
    return raw.decode("ascii")


@lru_cache(maxsize=None)
def builtin_group() -> Group:
    """The order-204 symmetry group of the shipped designs."""
    gens = parse_generator_text(_verified_data_text("group_generators.txt"))
    group = close_group(gens)
    if group.order != 204:
        raise VerificationError(f"builtin group closed to order {group.order}, not 204")
    return group


@lru_cache(maxsize=None)
def builtin_orbit_representatives(index: int) -> tuple[QuadrupleRecord, ...]:
    """Quadruple records of design 1, 2, or 3."""
    if index not in (1, 2, 3):
        raise ValueError("design index must be 1, 2, or 3")
    text = _verified_data_text(f"design{index}_orbit_reps.txt")
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        parts = [int(tok) for tok in line.split()]
        if len(parts) != 4:
            raise ValueError(f"bad quadruple line: {line!r}")
        out.append(QuadrupleRecord(*parts))
    return tuple(out)


def build_design_from_reps(
    reps: Iterable[BitMatrix | QuadrupleRecord | Sequence[int]],
    group: Group,
    expected_lambda: int,
    t: int = STRENGTH,
    verify: bool = True,
) -> Design:
    """Expand orbit representatives into a full design and check it.

    Distinct representatives must generate distinct orbits; any overlap is
    an error, as is a failed design verification.
    """
    blocks: set[Subspace] = set()
    k = None
    for rep in reps:
        mat = rep if isinstance(rep, BitMatrix) else decode_quadruple(rep)
        s = span(mat.ncols, mat.rows)
        if s.dim != mat.nrows:
            raise DecodeError(f"dependent representative rows: {list(mat.rows)}")
        if k is None:
            k = s.dim
        elif s.dim != k:
            raise DecodeError("representatives have mixed dimensions")
        orbit = orbit_of(s, group)
        before = len(blocks)
        blocks |= orbit
        if len(blocks) != before + len(orbit):
            raise VerificationError(
                f"orbit of {list(mat.rows)} overlaps previously added orbits"
            )
    if k is None:
        raise ValueError("no representatives given")
    design = Design(group.v, k, t, expected_lambda, frozenset(blocks))
    if verify:
        verify_design(design)
    return design


def builtin_design(index: int, verify: bool = True) -> Design:
    """One of the three shipped designs, fully expanded."""
    return build_design_from_reps(
        builtin_orbit_representatives(index),
        builtin_group(),
        DESIGN_LAMBDA,
        verify=verify,
    )


def builtin_large_set(verify: bool = True) -> LargeSet:
    """The shipped large set: three disjoint 2-(8, 4, 217) designs."""
    designs = tuple(builtin_design(i, verify=False) for i in (1, 2, 3))
    ls = LargeSet(AMBIENT_DIM, BLOCK_DIM, STRENGTH, DESIGN_COUNT, designs)
    if verify:
        verify_large_set(ls)
    return ls


def grassmannian_size() -> int:
    return gaussian_binomial(AMBIENT_DIM, BLOCK_DIM)
