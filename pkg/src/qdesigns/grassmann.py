"""Subspaces of GF(2)^v: canonical forms, enumeration, quotients.

A Subspace is identified by its reduced row echelon basis, so equal
subspaces compare equal and hash alike.  Enumeration order is fixed:
pivot-column sets in lexicographic order, then free entries counted in
binary with the (row-major) first free cell as the least significant bit.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple

from .gf2 import left_kernel_raw, rref_raw, vec_mat

__all__ = [
    "QuotientFrame",
    "Subspace",
    "contains",
    "enumerate_grassmannian",
    "full_space",
    "gaussian_binomial",
    "intersect",
    "orthogonal_complement",
    "quotient_frame",
    "reduce_vector",
    "span",
    "standard_flag_subspace",
    "subspace_sum",
    "zero_subspace",
]


@lru_cache(maxsize=None)
def gaussian_binomial(v: int, k: int, q: int = 2) -> int:
    """Number of k-dimensional subspaces of an v-dimensional space over GF(q)."""
    if k < 0 or k > v:
        return 0
    num = 1
    den = 1
    for i in range(k):
        num *= q ** (v - i) - 1
        den *= q ** (k - i) - 1
    assert num % den == 0
    return num // den


class Subspace(NamedTuple):
    """Subspace of GF(2)^v held as its canonical RREF basis rows."""

    v: int
    rows: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.rows)

    def vectors(self) -> list[int]:
        """All 2^dim vectors of the subspace."""
        vecs = [0]
        for r in self.rows:
            vecs += [x ^ r for x in vecs]
        return vecs

    def __contains__(self, vector: int) -> bool:
        return reduce_vector(vector, self.rows) == 0

    def __repr__(self) -> str:  # compact, unambiguous
        return f"Subspace({self.v}, {list(self.rows)})"


def reduce_vector(x: int, rref_rows: Iterable[int]) -> int:
    """Remainder of x after elimination by RREF rows (0 iff x in the span)."""
    for r in rref_rows:
        if x & (r & -r):
            x ^= r
    return x


def span(v: int, rows: Iterable[int]) -> Subspace:
    rows = tuple(rows)
    for r in rows:
        if r < 0 or r >> v:
            raise ValueError(f"row {r} does not fit in {v} coordinates")
    return Subspace(v, rref_raw(rows).rows)


def zero_subspace(v: int) -> Subspace:
    return Subspace(v, ())


def full_space(v: int) -> Subspace:
    return Subspace(v, tuple(1 << i for i in range(v)))


def standard_flag_subspace(v: int, d: int) -> Subspace:
    """The subspace spanned by the first d unit vectors."""
    if not 0 <= d <= v:
        raise ValueError(f"flag dimension {d} out of range for v={v}")
    return Subspace(v, tuple(1 << i for i in range(d)))


def contains(outer: Subspace, inner: Subspace) -> bool:
    """Whether inner is a subspace of outer."""
    if outer.v != inner.v:
        raise ValueError("ambient dimensions differ")
    rows = outer.rows
    return all(reduce_vector(r, rows) == 0 for r in inner.rows)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    if a.v != b.v:
        raise ValueError("ambient dimensions differ")
    return Subspace(a.v, rref_raw(a.rows + b.rows).rows)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection of row spaces via the left kernel of the stacked basis."""
    if a.v != b.v:
        raise ValueError("ambient dimensions differ")
    stacked = a.rows + b.rows
    na = len(a.rows)
    vecs = []
    for combo in left_kernel_raw(stacked):
        vecs.append(vec_mat(combo & ((1 << na) - 1), a.rows))
    return Subspace(a.v, rref_raw(vecs).rows)


def orthogonal_complement(s: Subspace) -> Subspace:
    """All vectors orthogonal to s under the standard bilinear form."""
    piv = [(r & -r).bit_length() - 1 for r in s.rows]
    pivot_mask = 0
    for p in piv:
        pivot_mask |= 1 << p
    out = []
    for f in range(s.v):
        if (pivot_mask >> f) & 1:
            continue
        x = 1 << f
        for i, r in enumerate(s.rows):
            if (r >> f) & 1:
                x |= 1 << piv[i]
        out.append(x)
    return Subspace(s.v, rref_raw(out).rows)


def enumerate_grassmannian(v: int, k: int) -> Iterator[Subspace]:
    """All k-subspaces of GF(2)^v in a fixed documented order."""
    if k < 0 or k > v:
        return
    if k == 0:
        yield Subspace(v, ())
        return
    for pivots in combinations(range(v), k):
        pivot_mask = 0
        for p in pivots:
            pivot_mask |= 1 << p
        base = tuple(1 << p for p in pivots)
        # free cells in row-major order: (row i, column j) with j > pivots[i],
        # j not itself a pivot column
        cells = []
        for i, p in enumerate(pivots):
            for j in range(p + 1, v):
                if not (pivot_mask >> j) & 1:
                    cells.append((i, 1 << j))
        nfree = len(cells)
        for assignment in range(1 << nfree):
            rows = list(base)
            bits = assignment
            while bits:
                low = bits & -bits
                i, mask = cells[low.bit_length() - 1]
                rows[i] |= mask
                bits ^= low
            yield Subspace(v, tuple(rows))


class QuotientFrame:
    """Linear coordinates for the quotient sup/sub inside GF(2)^v.

    The transversal rows extend sub's basis to a basis of sup; quotient
    coordinate j corresponds to transversal row j.
    """

    __slots__ = ("sub", "sup", "transversal", "dim", "_steps")

    def __init__(self, sup: Subspace, sub: Subspace):
        if sup.v != sub.v:
            raise ValueError("ambient dimensions differ")
        if not contains(sup, sub):
            raise ValueError("sub is not contained in sup")
        self.sub = sub
        self.sup = sup
        transversal = []
        cur = list(sub.rows)
        cur_rref = rref_raw(cur).rows
        for r in sup.rows:
            if reduce_vector(r, cur_rref):
                transversal.append(r)
                cur.append(r)
                cur_rref = rref_raw(cur).rows
        self.transversal = tuple(transversal)
        self.dim = len(transversal)
        # elimination steps for coefficient extraction: (pivot mask, row, combo);
        # combo bits 0..ns-1 select sub rows, ns.. select transversal rows
        ns = len(sub.rows)
        by_pivot: dict[int, tuple[int, int]] = {}
        for i, r in enumerate(sub.rows + self.transversal):
            combo = 1 << i
            for mask, (br, bc) in by_pivot.items():
                if r & mask:
                    r ^= br
                    combo ^= bc
            assert r, "sub rows plus transversal must be independent"
            mask = r & -r
            for om, (orow, ocombo) in by_pivot.items():
                if orow & mask:
                    by_pivot[om] = (orow ^ r, ocombo ^ combo)
            by_pivot[mask] = (r, combo)
        self._steps = tuple(
            (mask, row, combo >> ns) for mask, (row, combo) in sorted(by_pivot.items())
        )

    def project_vector(self, x: int) -> int:
        """Quotient coordinates of x + sub; x must lie in sup."""
        coeffs = 0
        for mask, row, combo in self._steps:
            if x & mask:
                x ^= row
                coeffs ^= combo
        if x:
            raise ValueError("vector lies outside the frame's superspace")
        return coeffs

    def project(self, s: Subspace) -> Subspace:
        """Image of s in the quotient; requires sub <= s <= sup."""
        if not contains(s, self.sub):
            raise ValueError("subspace does not contain the factored-out space")
        rows = [self.project_vector(r) for r in s.rows]
        out = Subspace(self.dim, rref_raw(rows).rows)
        if out.dim != s.dim - self.sub.dim:
            raise AssertionError("projection lost rank unexpectedly")
        return out

    def lift_vector(self, y: int) -> int:
        """A representative in sup of the class with quotient coordinates y."""
        if y < 0 or y >> self.dim:
            raise ValueError(f"coordinates {y} do not fit in dimension {self.dim}")
        return vec_mat(y, self.transversal)

    def lift_preimage(self, sbar: Subspace) -> Subspace:
        """Full preimage in GF(2)^v of a subspace of the quotient."""
        if sbar.v != self.dim:
            raise ValueError("quotient subspace has the wrong ambient dimension")
        rows = [self.lift_vector(r) for r in sbar.rows] + list(self.sub.rows)
        return Subspace(self.sup.v, rref_raw(rows).rows)


def quotient_frame(sup: Subspace, sub: Subspace) -> QuotientFrame:
    return QuotientFrame(sup, sub)
