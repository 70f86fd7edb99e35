"""Matrix groups over GF(2) acting on subspaces.

Vectors act on the right (v -> v*A), so subspace images are row-space
images.  Groups are closed by breadth-first products of the generators;
element order is the discovery order, identity first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .gf2 import BitMatrix, identity, mat_mul, rank_raw, rref_raw
from .grassmann import Subspace, enumerate_grassmannian, gaussian_binomial

__all__ = [
    "Group",
    "GroupElement",
    "OrbitPartition",
    "act",
    "close_group",
    "element_order",
    "orbit_of",
    "orbit_partition",
    "parse_generator_text",
    "read_generator_file",
    "trivial_group",
    "write_generator_file",
]

GroupElement = BitMatrix

_CLOSURE_CAP = 10_000_000
_TABLE_DIM_MAX = 16  # build full vector-image tables up to this dimension


@dataclass(frozen=True)
class Group:
    v: int
    generators: tuple[GroupElement, ...]
    elements: tuple[GroupElement, ...]

    @property
    def order(self) -> int:
        return len(self.elements)


def close_group(generators: Sequence[GroupElement], cap: int = _CLOSURE_CAP) -> Group:
    """BFS closure of invertible generators under multiplication."""
    if not generators:
        raise ValueError("need at least one generator")
    v = generators[0].ncols
    for g in generators:
        if g.ncols != v or g.nrows != v:
            raise ValueError("generators must be square matrices of equal size")
        if rank_raw(g.rows) != v:
            raise ValueError("generator is singular")
    ident = identity(v)
    seen = {ident.rows: ident}
    order = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for m in frontier:
            for g in generators:
                p = mat_mul(m, g)
                if p.rows not in seen:
                    if len(seen) >= cap:
                        raise RuntimeError(f"group closure exceeded cap {cap}")
                    seen[p.rows] = p
                    order.append(p)
                    nxt.append(p)
        frontier = nxt
    return Group(v, tuple(generators), tuple(order))


def trivial_group(v: int) -> Group:
    """The one-element group on GF(2)^v; every subspace is its own orbit."""
    if v < 0:
        raise ValueError("dimension must be non-negative")
    return Group(v, (), (identity(v),))


def element_order(g: GroupElement) -> int:
    ident = identity(g.ncols)
    p = g
    n = 1
    while p != ident:
        p = mat_mul(p, g)
        n += 1
    return n


def act(s: Subspace, g: GroupElement) -> Subspace:
    """Image of a subspace under the right action of g."""
    if s.v != g.nrows:
        raise ValueError("subspace and matrix dimensions differ")
    grows = g.rows
    out = []
    for r in s.rows:
        acc = 0
        while r:
            low = r & -r
            acc ^= grows[low.bit_length() - 1]
            r ^= low
        out.append(acc)
    return Subspace(s.v, rref_raw(out).rows)


def _vector_image_table(g: GroupElement) -> list[int]:
    """tab[x] = x*g for every vector x; only for small dimensions."""
    v = g.ncols
    rows = g.rows
    tab = [0] * (1 << v)
    for x in range(1, 1 << v):
        low = x & -x
        tab[x] = tab[x ^ low] ^ rows[low.bit_length() - 1]
    return tab


def orbit_of(s: Subspace, group: Group) -> set[Subspace]:
    """Orbit of s under the group, generated by BFS over the generators."""
    seen = {s}
    stack = [s]
    while stack:
        cur = stack.pop()
        for g in group.generators:
            img = act(cur, g)
            if img not in seen:
                seen.add(img)
                stack.append(img)
    return seen


@dataclass
class OrbitPartition:
    """Orbits of the group on all k-subspaces of GF(2)^v.

    Orbits are numbered in first-encounter order of the subspace
    enumeration; each representative is the orbit's lexicographically
    smallest basis-row tuple.
    """

    v: int
    k: int
    group: Group
    representatives: list[Subspace]
    sizes: list[int]
    _index: dict[tuple[int, ...], int] = field(repr=False)
    _members: list[list[tuple[int, ...]]] = field(repr=False)

    @property
    def n_orbits(self) -> int:
        return len(self.representatives)

    def orbit_index(self, s: Subspace) -> int:
        try:
            return self._index[s.rows]
        except KeyError:
            raise KeyError(f"subspace not in the partitioned Grassmannian: {s}")

    def orbit_index_of_rows(self, rows: tuple[int, ...]) -> int:
        return self._index[rows]

    def members(self, i: int) -> list[Subspace]:
        return [Subspace(self.v, rows) for rows in self._members[i]]


def orbit_partition(v: int, k: int, group: Group) -> OrbitPartition:
    if group.v != v:
        raise ValueError("group dimension differs from ambient dimension")
    use_tables = v <= _TABLE_DIM_MAX
    tables = [_vector_image_table(g) for g in group.generators] if use_tables else None
    gen_rows = [g.rows for g in group.generators]

    index: dict[tuple[int, ...], int] = {}
    representatives: list[Subspace] = []
    sizes: list[int] = []
    members: list[list[tuple[int, ...]]] = []

    for s in enumerate_grassmannian(v, k):
        key = s.rows
        if key in index:
            continue
        oid = len(representatives)
        index[key] = oid
        orbit_keys = [key]
        stack = [key]
        while stack:
            cur = stack.pop()
            for gi in range(len(gen_rows)):
                if use_tables:
                    tab = tables[gi]
                    img = rref_raw(tab[r] for r in cur).rows
                else:
                    rows = gen_rows[gi]
                    imgs = []
                    for r in cur:
                        acc = 0
                        while r:
                            low = r & -r
                            acc ^= rows[low.bit_length() - 1]
                            r ^= low
                        imgs.append(acc)
                    img = rref_raw(imgs).rows
                if img not in index:
                    index[img] = oid
                    orbit_keys.append(img)
                    stack.append(img)
        representatives.append(Subspace(v, min(orbit_keys)))
        sizes.append(len(orbit_keys))
        members.append(orbit_keys)

    assert sum(sizes) == gaussian_binomial(v, k)
    return OrbitPartition(v, k, group, representatives, sizes, index, members)


def parse_generator_text(text: str) -> list[GroupElement]:
    """Parse blank-line-separated blocks of '0'/'1' rows into matrices."""
    mats = []
    for block in text.strip().split("\n\n"):
        lines = [ln.strip() for ln in block.strip().splitlines() if ln.strip()]
        if not lines:
            continue
        v = len(lines[0])
        rows = []
        for ln in lines:
            if len(ln) != v or set(ln) - {"0", "1"}:
                raise ValueError(f"bad generator row: {ln!r}")
            rows.append(sum(1 << i for i, c in enumerate(ln) if c == "1"))
        if len(rows) != v:
            raise ValueError(f"generator block is {len(rows)}x{v}, expected square")
        mats.append(BitMatrix(v, tuple(rows)))
    if not mats:
        raise ValueError("no generator blocks found")
    return mats


def read_generator_file(path) -> list[GroupElement]:
    with open(path, "r", encoding="ascii") as fh:
        return parse_generator_text(fh.read())


def write_generator_file(path, generators: Iterable[GroupElement]) -> None:
    blocks = []
    for g in generators:
        blocks.append(
            "\n".join(
                "".join("1" if (r >> j) & 1 else "0" for j in range(g.ncols))
                for r in g.rows
            )
        )
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n\n".join(blocks) + "\n")
