"""Subspace designs, large sets, verification, and the classical transforms.

A t-(v, k, lambda) subspace design over GF(2) is a set of k-subspaces
(blocks) such that every t-subspace lies in exactly lambda blocks.  A
large set splits the full Grassmannian of k-subspaces into N disjoint
designs.  Verification is always by exhaustive counting; nothing here
trusts a construction.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .gf2 import rref_raw
from .grassmann import (
    Subspace,
    contains,
    full_space,
    gaussian_binomial,
    orthogonal_complement,
    quotient_frame,
    reduce_vector,
    span,
    standard_flag_subspace,
    zero_subspace,
)

__all__ = [
    "Design",
    "LargeSet",
    "LargeSetReport",
    "VerificationError",
    "derived_large_set",
    "dual_large_set",
    "large_set_lambda",
    "read_design",
    "read_large_set",
    "residual_large_set",
    "t_equivalent",
    "t_subspace_counts",
    "verify_design",
    "verify_large_set",
    "write_design",
    "write_large_set",
]


class VerificationError(Exception):
    """A claimed design property failed an exhaustive check."""

    def __init__(self, message: str, witness: Optional[Subspace] = None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class Design:
    v: int
    k: int
    t: int
    lam: int
    blocks: frozenset[Subspace]


@dataclass(frozen=True)
class LargeSet:
    v: int
    k: int
    t: int
    n: int
    designs: tuple[Design, ...]


@dataclass(frozen=True)
class LargeSetReport:
    v: int
    k: int
    t: int
    n: int
    lam: int
    blocks_per_design: tuple[int, ...]
    grassmannian_size: int


@lru_cache(maxsize=None)
def _local_t_subspaces(k: int, t: int) -> tuple[tuple[int, ...], ...]:
    """Each t-subspace of GF(2)^k as the tuple of its nonzero vectors."""
    from .grassmann import enumerate_grassmannian

    out = []
    for s in enumerate_grassmannian(k, t):
        vecs = [0]
        for r in s.rows:
            vecs += [x ^ r for x in vecs]
        out.append(tuple(vecs[1:]))
    return tuple(out)


def t_subspace_counts(blocks: Iterable[Subspace], v: int, t: int) -> dict[int, int]:
    """Multiset of t-subspaces covered by blocks, keyed canonically.

    The key of a t-subspace is its sorted nonzero vectors packed into one
    int, v bits per vector.
    """
    if t == 0:
        n = sum(1 for _ in blocks)
        return {0: n} if n else {}
    counts: dict[int, int] = {}
    local_cache: dict[int, tuple[tuple[int, ...], ...]] = {}
    for block in blocks:
        k = block.dim
        locs = local_cache.get(k)
        if locs is None:
            locs = _local_t_subspaces(k, t)
            local_cache[k] = locs
        spanv = [0] * (1 << k)
        rows = block.rows
        for x in range(1, 1 << k):
            low = x & -x
            spanv[x] = spanv[x ^ low] ^ rows[low.bit_length() - 1]
        for loc in locs:
            vs = [spanv[c] for c in loc]
            vs.sort()
            key = 0
            for g in vs:
                key = (key << v) | g
            counts[key] = counts.get(key, 0) + 1
    return counts


def _key_to_subspace(key: int, v: int, t: int) -> Subspace:
    mask = (1 << v) - 1
    vecs = []
    while key:
        vecs.append(key & mask)
        key >>= v
    return Subspace(v, rref_raw(vecs).rows)


def verify_design(d: Design) -> int:
    """Exhaustively check the design property; returns lambda.

    Every t-subspace of GF(2)^v must lie in exactly d.lam blocks.
    """
    if not 0 <= d.t <= d.k <= d.v:
        raise VerificationError(f"invalid parameters t={d.t} k={d.k} v={d.v}")
    for b in d.blocks:
        if b.v != d.v or b.dim != d.k:
            raise VerificationError(f"block has wrong shape: {b}", witness=b)
    expected_blocks = d.lam * gaussian_binomial(d.v, d.t)
    denom = gaussian_binomial(d.k, d.t)
    if expected_blocks % denom:
        raise VerificationError(
            f"lambda={d.lam} is not consistent with any {d.t}-({d.v},{d.k}) design"
        )
    if len(d.blocks) != expected_blocks // denom:
        raise VerificationError(
            f"block count {len(d.blocks)} differs from required {expected_blocks // denom}"
        )
    counts = t_subspace_counts(d.blocks, d.v, d.t)
    total = gaussian_binomial(d.v, d.t)
    if len(counts) != total and d.lam != 0:
        raise VerificationError(
            f"only {len(counts)} of {total} {d.t}-subspaces are covered"
        )
    for key, c in counts.items():
        if c != d.lam:
            raise VerificationError(
                f"a {d.t}-subspace lies in {c} blocks, expected {d.lam}",
                witness=_key_to_subspace(key, d.v, d.t),
            )
    return d.lam


def t_equivalent(b1: Iterable[Subspace], b2: Iterable[Subspace], t: int) -> bool:
    """Whether two block sets cover every t-subspace equally often."""
    if t < 0:
        return True
    b1 = list(b1)
    b2 = list(b2)
    if not b1 and not b2:
        return True
    v = (b1[0] if b1 else b2[0]).v
    return t_subspace_counts(b1, v, t) == t_subspace_counts(b2, v, t)


def large_set_lambda(v: int, k: int, t: int, n: int) -> int:
    """Per-design lambda of a large set with N members; errors if N does not divide."""
    lam_max = gaussian_binomial(v - t, k - t)
    if lam_max % n:
        raise VerificationError(
            f"N={n} does not divide the maximal lambda {lam_max} for t={t} k={k} v={v}"
        )
    return lam_max // n


def verify_large_set(ls: LargeSet) -> LargeSetReport:
    """Check all member designs, disjointness, and full coverage."""
    if len(ls.designs) != ls.n:
        raise VerificationError(f"{len(ls.designs)} designs listed, N={ls.n}")
    lam = large_set_lambda(ls.v, ls.k, ls.t, ls.n)
    for i, d in enumerate(ls.designs):
        if (d.v, d.k, d.t) != (ls.v, ls.k, ls.t):
            raise VerificationError(f"design {i} has parameters {(d.v, d.k, d.t)}")
        if d.lam != lam:
            raise VerificationError(f"design {i} declares lambda={d.lam}, expected {lam}")
        verify_design(d)
    union: set[Subspace] = set()
    total = 0
    for i, d in enumerate(ls.designs):
        total += len(d.blocks)
        union |= d.blocks
        if len(union) != total:
            raise VerificationError(f"designs up to index {i} overlap")
    size = gaussian_binomial(ls.v, ls.k)
    if total != size:
        raise VerificationError(
            f"union holds {total} blocks, Grassmannian has {size}"
        )
    return LargeSetReport(
        ls.v,
        ls.k,
        ls.t,
        ls.n,
        lam,
        tuple(len(d.blocks) for d in ls.designs),
        size,
    )


# ---------------------------------------------------------------------------
# transforms


def derived_large_set(
    ls: LargeSet, point: Optional[Subspace] = None, verify: bool = True
) -> LargeSet:
    """Blocks through a fixed point, reduced modulo it: (t-1, k-1, v-1)."""
    if ls.t < 1:
        raise ValueError("derived transform needs t >= 1")
    if point is None:
        point = span(ls.v, [1])
    if point.v != ls.v or point.dim != 1:
        raise ValueError("point must be a 1-subspace of the ambient space")
    frame = quotient_frame(full_space(ls.v), point)
    p = point.rows[0]
    lam = large_set_lambda(ls.v - 1, ls.k - 1, ls.t - 1, ls.n)
    designs = []
    for d in ls.designs:
        blocks = frozenset(
            frame.project(b) for b in d.blocks if reduce_vector(p, b.rows) == 0
        )
        designs.append(Design(ls.v - 1, ls.k - 1, ls.t - 1, lam, blocks))
    out = LargeSet(ls.v - 1, ls.k - 1, ls.t - 1, ls.n, tuple(designs))
    if verify:
        verify_large_set(out)
    return out


def residual_large_set(
    ls: LargeSet, hyperplane: Optional[Subspace] = None, verify: bool = True
) -> LargeSet:
    """Blocks inside a fixed hyperplane, re-coordinatized: (t-1, k, v-1)."""
    if ls.t < 1:
        raise ValueError("residual transform needs t >= 1")
    if hyperplane is None:
        hyperplane = standard_flag_subspace(ls.v, ls.v - 1)
    if hyperplane.v != ls.v or hyperplane.dim != ls.v - 1:
        raise ValueError("hyperplane must have codimension 1")
    frame = quotient_frame(hyperplane, zero_subspace(ls.v))
    lam = large_set_lambda(ls.v - 1, ls.k, ls.t - 1, ls.n)
    designs = []
    for d in ls.designs:
        blocks = frozenset(
            frame.project(b) for b in d.blocks if contains(hyperplane, b)
        )
        designs.append(Design(ls.v - 1, ls.k, ls.t - 1, lam, blocks))
    out = LargeSet(ls.v - 1, ls.k, ls.t - 1, ls.n, tuple(designs))
    if verify:
        verify_large_set(out)
    return out


def dual_large_set(ls: LargeSet, verify: bool = True) -> LargeSet:
    """Orthogonal complements of all blocks: (t, v-k, v)."""
    lam = large_set_lambda(ls.v, ls.v - ls.k, ls.t, ls.n)
    designs = []
    for d in ls.designs:
        blocks = frozenset(orthogonal_complement(b) for b in d.blocks)
        if len(blocks) != len(d.blocks):
            raise VerificationError("complement map collapsed two blocks")
        designs.append(Design(ls.v, ls.v - ls.k, ls.t, lam, blocks))
    out = LargeSet(ls.v, ls.v - ls.k, ls.t, ls.n, tuple(designs))
    if verify:
        verify_large_set(out)
    return out


# ---------------------------------------------------------------------------
# file formats


def _parse_header(line: str, path) -> dict[str, int]:
    fields = {}
    for part in line.split():
        if "=" not in part:
            raise ValueError(f"{path}: bad header token {part!r}")
        key, _, val = part.partition("=")
        fields[key] = int(val)
    return fields


def write_design(path, d: Design) -> None:
    """One header line, then one block per line as its RREF basis rows."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"q=2 v={d.v} k={d.k} t={d.t} lambda={d.lam}\n")
        for b in sorted(d.blocks, key=lambda s: s.rows):
            fh.write(" ".join(str(r) for r in b.rows) + "\n")


def read_design(path) -> Design:
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty design file")
    hdr = _parse_header(lines[0], path)
    for key in ("q", "v", "k", "t", "lambda"):
        if key not in hdr:
            raise ValueError(f"{path}: header is missing {key}=")
    if hdr["q"] != 2:
        raise ValueError(f"{path}: only q=2 is supported, got q={hdr['q']}")
    v, k = hdr["v"], hdr["k"]
    blocks = []
    for ln in lines[1:]:
        rows = [int(tok) for tok in ln.split()]
        if len(rows) != k:
            raise ValueError(f"{path}: block line has {len(rows)} rows, expected {k}")
        s = span(v, rows)
        if s.dim != k:
            raise ValueError(f"{path}: block rows are dependent: {rows}")
        blocks.append(s)
    return Design(v, k, hdr["t"], hdr["lambda"], frozenset(blocks))


def write_large_set(path, ls: LargeSet, design_paths: Optional[Sequence[str]] = None) -> None:
    """Manifest header plus one design-file path per line (relative allowed).

    Writes the member design files next to the manifest unless explicit
    paths are given.
    """
    path = os.fspath(path)
    base = os.path.dirname(path) or "."
    if design_paths is None:
        stem = os.path.splitext(os.path.basename(path))[0]
        design_paths = [f"{stem}_design{i + 1}.txt" for i in range(ls.n)]
        for rel, d in zip(design_paths, ls.designs):
            write_design(os.path.join(base, rel), d)
    lam = large_set_lambda(ls.v, ls.k, ls.t, ls.n)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"q=2 v={ls.v} k={ls.k} t={ls.t} N={ls.n} lambda={lam}\n")
        for rel in design_paths:
            fh.write(rel + "\n")


def read_large_set(path) -> LargeSet:
    path = os.fspath(path)
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: empty large-set manifest")
    hdr = _parse_header(lines[0], path)
    for key in ("q", "v", "k", "t", "N"):
        if key not in hdr:
            raise ValueError(f"{path}: header is missing {key}=")
    n = hdr["N"]
    rels = lines[1:]
    if len(rels) != n:
        raise ValueError(f"{path}: {len(rels)} design paths listed, N={n}")
    base = os.path.dirname(path) or "."
    designs = []
    for rel in rels:
        d = read_design(os.path.join(base, rel))
        if (d.v, d.k, d.t) != (hdr["v"], hdr["k"], hdr["t"]):
            raise ValueError(f"{path}: design {rel} disagrees with manifest header")
        designs.append(d)
    return LargeSet(hdr["v"], hdr["k"], hdr["t"], n, tuple(designs))
