"""Orbit incidence systems and exact 0/1 design search.

For a group G acting on GF(2)^v, the incidence system has one row per
G-orbit of t-subspaces and one column per G-orbit of k-subspaces; entry
a[i][j] counts the blocks of orbit j through a fixed member of orbit i.
A column selection J solves A*x = lam*1 exactly when the union of the
selected orbits is a t-(v,k,lam) design, and repeating the search with
previously used columns forbidden partitions the Grassmannian into a
large set.

The solver is a deterministic depth-first search with unit propagation
on the row counts.  Search effort is metered by an explicit node
budget; running out of budget is reported as "unknown", which is never
conflated with a proven "infeasible".
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

from .designs import Design, LargeSet, verify_design, verify_large_set
from .grassmann import Subspace, enumerate_grassmannian, gaussian_binomial, span
from .groups import Group, OrbitPartition, orbit_partition

__all__ = [
    "BudgetExceeded",
    "KMDump",
    "KMSystem",
    "LargeSetSearchResult",
    "Selection",
    "SolveResult",
    "build_km",
    "design_from_selection",
    "iterated_large_set_search",
    "read_km_dump",
    "selection_blocks",
    "solve_exact",
    "write_km_system",
]

DEFAULT_NODE_BUDGET = 2_000_000
DEFAULT_RETRY_BUDGET = 64


class BudgetExceeded(Exception):
    """Raised when a search runs out of its node budget."""

    def __init__(self, nodes: int):
        super().__init__(f"node budget exhausted after {nodes} nodes")
        self.nodes = nodes


@dataclass(frozen=True)
class KMSystem:
    """Incidence system A for (group, t, k): rows t-orbits, columns k-orbits."""

    v: int
    t: int
    k: int
    group: Group
    t_orbits: OrbitPartition
    k_orbits: OrbitPartition
    matrix: tuple[tuple[int, ...], ...]
    lambda_max: int

    @property
    def n_rows(self) -> int:
        return len(self.matrix)

    @property
    def n_cols(self) -> int:
        return self.k_orbits.n_orbits


class Selection(NamedTuple):
    chosen: frozenset[int]


class SolveResult(NamedTuple):
    status: str  # "solved" | "infeasible" | "unknown"
    selection: Optional[Selection]
    nodes: int


class LargeSetSearchResult(NamedTuple):
    status: str  # "solved" | "exhausted" | "budget" | "retry_limit"
    large_set: Optional[LargeSet]
    selections: tuple[Selection, ...]
    trace: tuple[str, ...]
    nodes: int
    retries: int


def build_km(v: int, t: int, k: int, group: Group) -> KMSystem:
    """Build the orbit incidence matrix by counting on the k-side.

    For each k-orbit representative K the t-subspaces of K are sorted
    into t-orbits; the count c of orbit i among them satisfies
    |T_i| * a[i][j] = |K_j| * c, and the division must be exact.
    """
    if not 0 <= t <= k <= v:
        raise ValueError(f"need 0 <= t <= k <= v, got t={t} k={k} v={v}")
    t_orbits = orbit_partition(v, t, group)
    k_orbits = orbit_partition(v, k, group)
    tau = t_orbits.n_orbits
    local = [s.rows for s in enumerate_grassmannian(k, t)]

    matrix = [[0] * k_orbits.n_orbits for _ in range(tau)]
    for j, krep in enumerate(k_orbits.representatives):
        counts: dict[int, int] = {}
        for loc_rows in local:
            glob = []
            for mask in loc_rows:
                acc = 0
                m = mask
                while m:
                    low = m & -m
                    acc ^= krep.rows[low.bit_length() - 1]
                    m ^= low
                glob.append(acc)
            i = t_orbits.orbit_index(span(v, glob))
            counts[i] = counts.get(i, 0) + 1
        ksize = k_orbits.sizes[j]
        for i, c in counts.items():
            a, r = divmod(ksize * c, t_orbits.sizes[i])
            if r:
                raise ArithmeticError(
                    f"orbit count reconciliation not integral at row {i}, column {j}"
                )
            matrix[i][j] = a

    lam_max = gaussian_binomial(v - t, k - t)
    for i, row in enumerate(matrix):
        if sum(row) != lam_max:
            raise ArithmeticError(f"row {i} sums to {sum(row)}, expected {lam_max}")
    return KMSystem(
        v, t, k, group, t_orbits, k_orbits,
        tuple(tuple(row) for row in matrix), lam_max,
    )


_UNDECIDED, _IN, _OUT = 0, 1, 2


class _Search:
    """DFS over columns with row-count propagation.

    Columns are ordered largest orbit first, ties by index.  Each node
    branches on the tightest unsatisfied row (least slack between its
    reachable mass and lam, ties by row index) and decides that row's
    first undecided column in the column order, include before exclude.
    A row whose count hits lam excludes every undecided column through
    it; a row whose count plus undecided mass exactly meets lam includes
    them all; a row that can no longer reach lam fails the branch.
    """

    def __init__(
        self,
        system: KMSystem,
        lam: int,
        forbidden: frozenset[int],
        node_budget: int,
    ):
        if lam < 0 or lam > system.lambda_max:
            raise ValueError(f"lambda {lam} outside [0, {system.lambda_max}]")
        self.lam = lam
        self.budget = node_budget
        self.nodes = 0
        sizes = system.k_orbits.sizes
        self.order = sorted(
            (j for j in range(system.n_cols) if j not in forbidden),
            key=lambda j: (-sizes[j], j),
        )
        tau = system.n_rows
        self.col_rows: dict[int, tuple[tuple[int, int], ...]] = {}
        row_cols: list[list[tuple[int, int]]] = [[] for _ in range(tau)]
        for j in self.order:
            entries = []
            for i in range(tau):
                a = system.matrix[i][j]
                if a:
                    entries.append((i, a))
                    row_cols[i].append((j, a))
            self.col_rows[j] = tuple(entries)
        self.row_cols = [tuple(e) for e in row_cols]
        self.cnt = [0] * tau
        self.avail = [sum(a for _, a in cols) for cols in self.row_cols]
        self.state = {j: _UNDECIDED for j in self.order}
        self.n_undecided = len(self.order)
        self.trail: list[tuple[int, int]] = []

    def _apply(self, j: int, kind: int, touched: list[int]) -> None:
        self.state[j] = kind
        self.n_undecided -= 1
        self.trail.append((j, kind))
        if kind == _IN:
            for i, a in self.col_rows[j]:
                self.cnt[i] += a
                self.avail[i] -= a
                touched.append(i)
        else:
            for i, a in self.col_rows[j]:
                self.avail[i] -= a
                touched.append(i)

    def _undo_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            j, kind = self.trail.pop()
            self.state[j] = _UNDECIDED
            self.n_undecided += 1
            if kind == _IN:
                for i, a in self.col_rows[j]:
                    self.cnt[i] -= a
                    self.avail[i] += a
            else:
                for i, a in self.col_rows[j]:
                    self.avail[i] += a

    def _propagate(self, touched: list[int]) -> bool:
        lam = self.lam
        while touched:
            i = touched.pop()
            c = self.cnt[i]
            if c > lam or c + self.avail[i] < lam:
                return False
            if c == lam:
                for j, _ in self.row_cols[i]:
                    if self.state[j] == _UNDECIDED:
                        self._apply(j, _OUT, touched)
            elif c + self.avail[i] == lam:
                for j, _ in self.row_cols[i]:
                    if self.state[j] == _UNDECIDED:
                        self._apply(j, _IN, touched)
        return True

    def solutions(self) -> Iterator[frozenset[int]]:
        """Yield solutions in deterministic DFS order; raises BudgetExceeded."""
        if not self._propagate(list(range(len(self.cnt)))):
            return
        # frames: (column branched on, phase, trail mark before the decision)
        frames: list[tuple[int, int, int]] = []

        def backtrack() -> bool:
            while frames:
                j, phase, mark = frames.pop()
                self._undo_to(mark)
                if phase == 0:
                    frames.append((j, 1, mark))
                    touched: list[int] = []
                    self._apply(j, _OUT, touched)
                    if self._propagate(touched):
                        return True
            return False

        while True:
            if self.n_undecided == 0:
                yield frozenset(
                    c for c, st in self.state.items() if st == _IN
                )
                if not backtrack():
                    return
                continue
            j = self._branch_column()
            self.nodes += 1
            if self.nodes > self.budget:
                raise BudgetExceeded(self.nodes)
            mark = len(self.trail)
            frames.append((j, 0, mark))
            touched: list[int] = []
            self._apply(j, _IN, touched)
            if not self._propagate(touched):
                if not backtrack():
                    return

    def _branch_column(self) -> int:
        """First undecided column of the unsatisfied row with least slack."""
        lam = self.lam
        best_i = -1
        best_slack = None
        for i in range(len(self.cnt)):
            if self.cnt[i] < lam:
                slack = self.cnt[i] + self.avail[i] - lam
                if best_slack is None or slack < best_slack:
                    best_i, best_slack = i, slack
        if best_i < 0:
            raise AssertionError("undecided column with all-zero entries")
        state = self.state
        for j, _ in self.row_cols[best_i]:
            if state[j] == _UNDECIDED:
                return j
        raise AssertionError("unsatisfied row with no undecided column")


def solve_exact(
    system: KMSystem,
    lam: int,
    forbidden: Iterable[int] = (),
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> SolveResult:
    """First exact 0/1 solution of A*x = lam*1 over the allowed columns.

    "infeasible" means the search space was exhausted; "unknown" means
    the node budget ran out first.
    """
    forb = frozenset(forbidden)
    bad = [j for j in forb if not 0 <= j < system.n_cols]
    if bad:
        raise ValueError(f"forbidden column out of range: {sorted(bad)}")
    search = _Search(system, lam, forb, node_budget)
    try:
        sel = next(search.solutions(), None)
    except BudgetExceeded as e:
        return SolveResult("unknown", None, e.nodes)
    if sel is None:
        return SolveResult("infeasible", None, search.nodes)
    return SolveResult("solved", Selection(sel), search.nodes)


def selection_blocks(system: KMSystem, selection: Selection) -> frozenset[Subspace]:
    out: list[Subspace] = []
    for j in selection.chosen:
        out.extend(system.k_orbits.members(j))
    return frozenset(out)


def design_from_selection(
    system: KMSystem, selection: Selection, lam: int, verify: bool = True
) -> Design:
    d = Design(system.v, system.k, system.t, lam, selection_blocks(system, selection))
    if verify:
        verify_design(d)
    return d


def _check_seed(system: KMSystem, lam: int, chosen: frozenset[int]) -> None:
    for i in range(system.n_rows):
        got = sum(system.matrix[i][j] for j in chosen)
        if got != lam:
            raise ValueError(
                f"seed selection gives row {i} count {got}, expected {lam}"
            )


def iterated_large_set_search(
    system: KMSystem,
    n: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
    retry_budget: int = DEFAULT_RETRY_BUDGET,
    seed_selections: Optional[Sequence[Iterable[int]]] = None,
    verify: bool = True,
) -> LargeSetSearchResult:
    """Search for a large set by solving N rounds with column removal.

    Each round solves with lam = lambda_max/N against the columns used so
    far.  When a round comes up empty the previous searched round is
    advanced to its next solution; every such advance costs one retry.
    Seed rounds are fixed: they are validated, never revisited.
    """
    lam, rem = divmod(system.lambda_max, n)
    if rem:
        raise ValueError(f"{n} does not divide lambda_max = {system.lambda_max}")

    seeds: list[frozenset[int]] = []
    used: set[int] = set()
    for raw in seed_selections or ():
        chosen = frozenset(raw)
        if chosen & used:
            raise ValueError("seed selections overlap")
        _check_seed(system, lam, chosen)
        seeds.append(chosen)
        used |= chosen
    if len(seeds) > n:
        raise ValueError(f"{len(seeds)} seed rounds for an N={n} search")

    trace: list[str] = []
    searched: list[frozenset[int]] = []
    searchers: list[_Search] = []
    gens: list[Iterator[frozenset[int]]] = []
    retries = 0

    def total_nodes() -> int:
        return sum(s.nodes for s in searchers)

    def failure(status: str) -> LargeSetSearchResult:
        sels = tuple(Selection(c) for c in seeds + searched)
        return LargeSetSearchResult(
            status, None, sels, tuple(trace), total_nodes(), retries
        )

    while len(seeds) + len(searched) < n:
        r = len(seeds) + len(searched)
        if len(gens) == len(searched):
            forbidden = frozenset(used) | frozenset(
                j for sel in searched for j in sel
            )
            s = _Search(system, lam, forbidden, node_budget)
            searchers.append(s)
            gens.append(s.solutions())
        try:
            sel = next(gens[-1])
        except StopIteration:
            trace.append(f"round {r}: solutions exhausted")
            gens.pop()
            searchers.pop()
            if not searched:
                trace.append("no searched round left to advance; giving up")
                return failure("exhausted")
            searched.pop()
            retries += 1
            trace.append(f"advancing round {len(seeds) + len(searched)} (retry {retries})")
            if retries > retry_budget:
                trace.append(f"retry budget {retry_budget} exhausted")
                return failure("retry_limit")
            continue
        except BudgetExceeded as e:
            trace.append(f"round {r}: {e}")
            return failure("budget")
        searched.append(sel)
        trace.append(f"round {r}: solved")

    all_rounds = seeds + searched
    covered = set().union(*all_rounds) if all_rounds else set()
    if covered != set(range(system.n_cols)):
        missing = sorted(set(range(system.n_cols)) - covered)
        raise AssertionError(f"rounds leave columns uncovered: {missing[:10]}")
    designs = tuple(
        design_from_selection(system, Selection(c), lam, verify=False)
        for c in all_rounds
    )
    ls = LargeSet(system.v, system.k, system.t, n, designs)
    if verify:
        verify_large_set(ls)
    sels = tuple(Selection(c) for c in all_rounds)
    return LargeSetSearchResult("solved", ls, sels, tuple(trace), total_nodes(), retries)


# ---------------------------------------------------------------------------
# matrix dump format
#
# Matrix file: first line "tau kappa lambda_max", then tau lines of kappa
# space-separated integers.  Representative sidecars (suffixes .treps and
# .kreps) start with "v=<v> dim=<d> count=<n>" and then give one orbit
# representative per line as its basis rows, the same row encoding design
# files use.


class KMDump(NamedTuple):
    tau: int
    kappa: int
    lambda_max: int
    matrix: tuple[tuple[int, ...], ...]
    t_reps: tuple[Subspace, ...]
    k_reps: tuple[Subspace, ...]


def _write_reps(path: Path, v: int, d: int, reps: Sequence[Subspace]) -> None:
    lines = [f"v={v} dim={d} count={len(reps)}"]
    for s in reps:
        lines.append(" ".join(str(r) for r in s.rows) if s.rows else "0")
    path.write_text("\n".join(lines) + "\n")


def _read_reps(path: Path) -> tuple[int, int, tuple[Subspace, ...]]:
    lines = path.read_text().splitlines()
    fields = dict(part.split("=") for part in lines[0].split())
    v, d, count = int(fields["v"]), int(fields["dim"]), int(fields["count"])
    reps = []
    for line in lines[1 : count + 1]:
        rows = [int(x) for x in line.split()]
        reps.append(span(v, [r for r in rows if r]))
    for s in reps:
        if s.dim != d:
            raise ValueError(f"representative in {path} has dimension {s.dim}, not {d}")
    return v, d, tuple(reps)


def write_km_system(system: KMSystem, path) -> None:
    p = Path(path)
    lines = [f"{system.n_rows} {system.n_cols} {system.lambda_max}"]
    for row in system.matrix:
        lines.append(" ".join(str(a) for a in row))
    p.write_text("\n".join(lines) + "\n")
    _write_reps(p.with_name(p.name + ".treps"), system.v, system.t,
                system.t_orbits.representatives)
    _write_reps(p.with_name(p.name + ".kreps"), system.v, system.k,
                system.k_orbits.representatives)


def read_km_dump(path) -> KMDump:
    p = Path(path)
    lines = p.read_text().splitlines()
    tau, kappa, lam_max = (int(x) for x in lines[0].split())
    matrix = tuple(
        tuple(int(x) for x in line.split()) for line in lines[1 : tau + 1]
    )
    if len(matrix) != tau or any(len(row) != kappa for row in matrix):
        raise ValueError(f"matrix block in {p} does not match header {tau}x{kappa}")
    _, _, t_reps = _read_reps(p.with_name(p.name + ".treps"))
    _, _, k_reps = _read_reps(p.with_name(p.name + ".kreps"))
    return KMDump(tau, kappa, lam_max, matrix, t_reps, k_reps)
