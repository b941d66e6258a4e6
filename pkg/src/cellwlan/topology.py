"""Deployment geometry and contention-graph combinatorics.

A deployment is a set of cells (an access point plus its associated nodes)
placed in the plane.  Two co-channel cells contend when their APs are within
carrier-sense range of each other; the resulting contention graph drives all
cell-level analysis.  This module builds that graph, checks that the geometry
puts every cell pair clearly on one side of the carrier-sense boundary, and
enumerates the independent sets of the graph, which are exactly the feasible
sets of simultaneously transmitting cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_STATE_CAP = 2**20


class StateSpaceCapError(Exception):
    """Raised when independent-set enumeration would exceed the state cap."""


@dataclass(frozen=True)
class CellGeom:
    """One cell: an AP position, a coverage radius, and its client count.

    Positions and radii share one length unit (meters in the presets).
    ``node_count`` is the number of saturated senders in the cell; for
    AP-driven downlink traffic modeled as an equivalent pair it is 2.
    """

    cell_id: int
    ap_position: tuple[float, float]
    radius: float
    node_count: int = 2
    channel: int = 1

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise ValueError(f"cell {self.cell_id}: radius must be >= 0")
        if self.node_count < 1:
            raise ValueError(f"cell {self.cell_id}: node_count must be >= 1")


@dataclass(frozen=True)
class Deployment:
    """A set of cells plus the carrier-sense range shared by all radios."""

    cells: tuple[CellGeom, ...]
    carrier_sense_range: float

    def __post_init__(self) -> None:
        if self.carrier_sense_range <= 0:
            raise ValueError("carrier_sense_range must be > 0")
        ids = [c.cell_id for c in self.cells]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate cell ids in deployment")

    def cell(self, cell_id: int) -> CellGeom:
        for c in self.cells:
            if c.cell_id == cell_id:
                return c
        raise KeyError(cell_id)


def _ap_distance(a: CellGeom, b: CellGeom) -> float:
    return math.dist(a.ap_position, b.ap_position)


@dataclass(frozen=True)
class ContentionGraph:
    """Undirected graph on cell ids; an edge means the two cells contend."""

    cells: tuple[int, ...]
    edges: frozenset[frozenset[int]]

    def __post_init__(self) -> None:
        if list(self.cells) != sorted(set(self.cells)):
            raise ValueError("cells must be sorted and unique")
        cellset = set(self.cells)
        for e in self.edges:
            if len(e) != 2 or not e <= cellset:
                raise ValueError(f"bad edge {set(e)}")

    def neighbors(self, cell_id: int) -> frozenset[int]:
        return frozenset(next(iter(e - {cell_id})) for e in self.edges if cell_id in e)

    def adjacent(self, a: int, b: int) -> bool:
        return frozenset((a, b)) in self.edges

    @property
    def size(self) -> int:
        return len(self.cells)


def graph_from_edges(cells: list[int] | tuple[int, ...],
                     edges: list[tuple[int, int]]) -> ContentionGraph:
    """Build a contention graph directly from an explicit edge list."""
    cell_tuple = tuple(sorted(set(cells)))
    edge_set = set()
    for a, b in edges:
        if a == b:
            raise ValueError(f"self-loop on cell {a}")
        edge_set.add(frozenset((a, b)))
    return ContentionGraph(cells=cell_tuple, edges=frozenset(edge_set))


def build_contention_graph(deployment: Deployment) -> ContentionGraph:
    """Contention graph of a deployment.

    Two cells contend iff they share a channel and their APs are strictly
    closer than the carrier-sense range.  A distance exactly equal to the
    range counts as out of range.
    """
    cells = tuple(sorted(c.cell_id for c in deployment.cells))
    edges = set()
    cl = sorted(deployment.cells, key=lambda c: c.cell_id)
    for i, a in enumerate(cl):
        for b in cl[i + 1:]:
            if a.channel != b.channel:
                continue
            if _ap_distance(a, b) < deployment.carrier_sense_range:
                edges.add(frozenset((a.cell_id, b.cell_id)))
    return ContentionGraph(cells=cells, edges=frozenset(edges))


@dataclass(frozen=True)
class PairRelation:
    """Geometric classification of one co-channel cell pair."""

    cell_a: int
    cell_b: int
    relation: str  # "dependent" | "independent" | "partial"


@dataclass(frozen=True)
class PbdReport:
    """Result of the pairwise dependence check.

    ``satisfied`` is True when every co-channel pair is either completely
    dependent (all nodes of one cell sense all nodes of the other) or
    completely independent (no node senses any node of the other cell).
    Pairs that straddle the carrier-sense boundary are listed in
    ``violations`` and make the whole cell-level model inapplicable.
    """

    satisfied: bool
    pairs: tuple[PairRelation, ...]
    violations: tuple[PairRelation, ...]


def check_pbd(deployment: Deployment) -> PbdReport:
    """Classify every co-channel cell pair as dependent/independent/partial.

    With AP distance d and coverage radii r_a, r_b, the worst-case node
    separation is d + r_a + r_b and the best case is d - r_a - r_b.  The
    pair is completely dependent when even the worst case is inside the
    carrier-sense range, completely independent when even the best case is
    outside it, and a violation otherwise.
    """
    rels = []
    cl = sorted(deployment.cells, key=lambda c: c.cell_id)
    rcs = deployment.carrier_sense_range
    for i, a in enumerate(cl):
        for b in cl[i + 1:]:
            if a.channel != b.channel:
                continue
            d = _ap_distance(a, b)
            if d + a.radius + b.radius < rcs:
                rel = "dependent"
            elif d - a.radius - b.radius >= rcs:
                rel = "independent"
            else:
                rel = "partial"
            rels.append(PairRelation(a.cell_id, b.cell_id, rel))
    violations = tuple(r for r in rels if r.relation == "partial")
    return PbdReport(satisfied=not violations, pairs=tuple(rels),
                     violations=violations)


@dataclass(frozen=True)
class PartitionedState:
    """Cells split by what they are doing while ``transmitting`` is active.

    ``blocked`` cells neighbor an active cell and have frozen backoffs;
    ``contending`` cells are neither active nor blocked, so their nodes
    keep counting down backoff and may attempt.
    """

    transmitting: frozenset[int]
    blocked: frozenset[int]
    contending: frozenset[int]


def partition_state(graph: ContentionGraph, active: frozenset[int] | set[int]) -> PartitionedState:
    """Partition all cells into transmitting / blocked / contending."""
    active = frozenset(active)
    if not active <= set(graph.cells):
        raise ValueError("active cells not in graph")
    for a in active:
        for b in active:
            if a < b and graph.adjacent(a, b):
                raise ValueError(f"cells {a} and {b} contend; state infeasible")
    blocked = frozenset().union(*(graph.neighbors(a) for a in active)) - active if active else frozenset()
    contending = frozenset(graph.cells) - active - blocked
    return PartitionedState(active, blocked, contending)


class StateSpace:
    """All independent sets of a contention graph, in canonical order.

    States are ordered lexicographically by their sorted member tuple, so
    the empty state is always index 0.  Boolean masks over (state, cell)
    are precomputed for vectorized work: ``active_mask`` marks members,
    ``blocked_mask`` marks their neighbors, ``contending_mask`` the rest.
    """

    def __init__(self, graph: ContentionGraph, states: list[tuple[int, ...]]):
        self.graph = graph
        self.states = tuple(states)
        self.cells = graph.cells
        self._cell_col = {c: j for j, c in enumerate(graph.cells)}
        self._index = {s: i for i, s in enumerate(self.states)}
        n_states, n_cells = len(self.states), len(self.cells)
        adj = np.zeros((n_cells, n_cells), dtype=np.uint8)
        for e in graph.edges:
            a, b = sorted(e)
            adj[self._cell_col[a], self._cell_col[b]] = 1
            adj[self._cell_col[b], self._cell_col[a]] = 1
        self.active_mask = np.zeros((n_states, n_cells), dtype=bool)
        for i, members in enumerate(self.states):
            for c in members:
                self.active_mask[i, self._cell_col[c]] = True
        touched = (self.active_mask.astype(np.uint8) @ adj) > 0
        if np.any(touched & self.active_mask):
            raise ValueError("states contain an adjacent pair; not independent sets")
        self.adjacency = adj.astype(bool)
        self.blocked_mask = touched & ~self.active_mask
        self.contending_mask = ~(self.active_mask | self.blocked_mask)

    def __len__(self) -> int:
        return len(self.states)

    def index_of(self, members) -> int:
        return self._index[tuple(sorted(members))]

    def cell_column(self, cell_id: int) -> int:
        return self._cell_col[cell_id]


def _independent_sets(graph: ContentionGraph, cap: int) -> list[tuple[int, ...]]:
    """All independent sets as sorted member tuples, lexicographic order.

    Include/exclude recursion on the lowest-index vertex; raises once more
    than ``cap`` states have been produced.
    """
    order = list(graph.cells)
    nbrs = {c: graph.neighbors(c) for c in order}
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], start: int, banned: set[int]) -> None:
        out.append(tuple(prefix))
        if len(out) > cap:
            raise StateSpaceCapError(
                f"graph with {graph.size} cells has more than {cap} "
                f"independent sets; enumeration refused")
        for k in range(start, len(order)):
            v = order[k]
            if v in banned:
                continue
            prefix.append(v)
            rec(prefix, k + 1, banned | nbrs[v])
            prefix.pop()

    rec([], 0, set())
    out.sort()
    return out


def enumerate_independent_sets(graph: ContentionGraph,
                               cap: int = DEFAULT_STATE_CAP) -> StateSpace:
    """Enumerate every feasible transmission state of the graph."""
    return StateSpace(graph, _independent_sets(graph, cap))


@dataclass(frozen=True)
class MisStats:
    """Counting statistics of the maximum independent sets of a graph.

    ``max_size`` is the independence number, ``count`` the number of
    independent sets of that size, and ``per_cell[j]`` the number of those
    containing cell ``cells[j]``.  Every maximum independent set has
    exactly ``max_size`` members, so per_cell sums to max_size * count.
    """

    cells: tuple[int, ...]
    max_size: int
    count: int
    per_cell: tuple[int, ...]


def mis_stats(graph: ContentionGraph, cap: int = DEFAULT_STATE_CAP) -> MisStats:
    """Independence number and maximum-independent-set counts."""
    sets_ = _independent_sets(graph, cap)
    alpha = max(len(s) for s in sets_)
    top = [s for s in sets_ if len(s) == alpha]
    per = {c: 0 for c in graph.cells}
    for s in top:
        for c in s:
            per[c] += 1
    return MisStats(cells=graph.cells, max_size=alpha, count=len(top),
                    per_cell=tuple(per[c] for c in graph.cells))


def restrict(graph: ContentionGraph, keep) -> ContentionGraph:
    """Induced subgraph on the given subset of cells."""
    keep = frozenset(keep)
    if not keep <= set(graph.cells):
        raise ValueError("subset contains unknown cells")
    return ContentionGraph(
        cells=tuple(sorted(keep)),
        edges=frozenset(e for e in graph.edges if e <= keep))


def adjacency_text(graph: ContentionGraph) -> str:
    """Plain-text adjacency list, one ``cell: neighbors...`` line per cell."""
    lines = []
    for c in graph.cells:
        nb = " ".join(str(n) for n in sorted(graph.neighbors(c)))
        lines.append(f"{c}: {nb}".rstrip())
    return "\n".join(lines) + "\n"


def dot_edges(graph: ContentionGraph) -> str:
    """DOT-compatible rendering of the contention graph."""
    body = [f"  {c};" for c in graph.cells]
    body += [f"  {min(e)} -- {max(e)};"
             for e in sorted(graph.edges, key=lambda e: tuple(sorted(e)))]
    return "graph contention {\n" + "\n".join(body) + "\n}\n"
