"""DAG core: representation, validation, and exact path machinery.

Vertices and edges carry dense integer indices assigned at construction.
Every vector quantity in this package lives in the flat coordinate space
V ∪ E: vertex v sits at index v, edge j at index ``n_vertices + j``.  A
path is a tuple of edge indices ordered from source to sink; its 0/1
incidence vector marks both the edges and the vertices it visits.

Path counts use Python integers throughout: the number of source-sink
paths can be exponential in the number of edges and the counting
recurrence must stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CycleDetected,
    DimensionMismatch,
    InvalidDag,
    InvalidPath,
    NoPath,
    TooManyPaths,
)

Path = tuple[int, ...]

#: Default absolute tolerance for flow-constraint checks; matches the
#: feasibility slack the solver guarantees on its output.
FLOW_TOL = 1e-8


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph with a designated source and sink.

    ``names`` gives a label per vertex (used in file formats and debug
    output), ``edges`` lists (tail, head) index pairs.  Construction
    validates acyclicity, rejects parallel edges and self-loops, and
    requires the source to have no incoming and the sink no outgoing
    edges.  Reachability is *not* enforced here; see :func:`prune`.

    ``parent_vertices`` / ``parent_edges`` are set on graphs returned by
    :func:`prune` and map this graph's indices back into the graph it was
    pruned from.
    """

    names: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]
    source: int
    sink: int
    parent_vertices: tuple[int, ...] | None = field(default=None, compare=False)
    parent_edges: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        n = len(self.names)
        if len(set(self.names)) != n:
            raise InvalidDag("vertex names must be unique")
        if not (0 <= self.source < n) or not (0 <= self.sink < n):
            raise InvalidDag("source/sink index out of range")
        if self.source == self.sink:
            raise InvalidDag("source and sink must be distinct")
        seen: set[tuple[int, int]] = set()
        for u, v in self.edges:
            if not (0 <= u < n) or not (0 <= v < n):
                raise InvalidDag(f"edge ({u}, {v}) out of range")
            if u == v:
                raise CycleDetected(f"self-loop at vertex {u}")
            if (u, v) in seen:
                raise InvalidDag(f"parallel edge ({u}, {v})")
            seen.add((u, v))
        self.topo_order()  # raises CycleDetected
        if any(v == self.source for _, v in self.edges):
            raise InvalidDag("source has an incoming edge")
        if any(u == self.sink for u, _ in self.edges):
            raise InvalidDag("sink has an outgoing edge")

    # -- basic shape ---------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.names)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_coords(self) -> int:
        return len(self.names) + len(self.edges)

    def edge_coord(self, edge_id: int) -> int:
        """Index of an edge in the flat V ∪ E coordinate space."""
        return self.n_vertices + edge_id

    @cached_property
    def out_edges(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.names]
        for j, (u, _) in enumerate(self.edges):
            out[u].append(j)
        return tuple(tuple(e) for e in out)

    @cached_property
    def in_edges(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in self.names]
        for j, (_, v) in enumerate(self.edges):
            inc[v].append(j)
        return tuple(tuple(e) for e in inc)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {uv: j for j, uv in enumerate(self.edges)}

    def topo_order(self) -> tuple[int, ...]:
        """Vertices in a topological order (lowest index first among ready)."""
        return _topo_order(len(self.names), self.edges)

    @cached_property
    def topo_position(self) -> tuple[int, ...]:
        pos = [0] * self.n_vertices
        for i, v in enumerate(self.topo_order()):
            pos[v] = i
        return tuple(pos)

    # -- paths ---------------------------------------------------------

    def incidence(self, path: Path) -> np.ndarray:
        """0/1 vector over V ∪ E for a source-sink path (validated)."""
        self.check_path(path)
        x = np.zeros(self.n_coords)
        x[self.source] = 1.0
        for e in path:
            u, v = self.edges[e]
            x[v] = 1.0
            x[self.n_vertices + e] = 1.0
        return x

    def path_vertices(self, path: Path) -> tuple[int, ...]:
        verts = [self.source]
        for e in path:
            verts.append(self.edges[e][1])
        return tuple(verts)

    def check_path(self, path: Path) -> None:
        """Raise InvalidPath unless ``path`` runs from source to sink."""
        at = self.source
        for e in path:
            if not (0 <= e < self.n_edges):
                raise InvalidPath(f"edge id {e} out of range")
            u, v = self.edges[e]
            if u != at:
                raise InvalidPath(f"edge {e} does not continue the path at vertex {at}")
            at = v
        if at != self.sink:
            raise InvalidPath("path does not end at the sink")
        if not path:
            raise InvalidPath("empty path")

    def path_loss(self, path: Path, edge_weights: Sequence[float]) -> float:
        return float(sum(edge_weights[e] for e in path))


def _topo_order(n: int, edges: Iterable[tuple[int, int]]) -> tuple[int, ...]:
    import heapq

    indeg = [0] * n
    out: list[list[int]] = [[] for _ in range(n)]
    m = 0
    for u, v in edges:
        indeg[v] += 1
        out[u].append(v)
        m += 1
    ready = [v for v in range(n) if indeg[v] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(ready, w)
    if len(order) != n:
        raise CycleDetected("graph has a directed cycle")
    return tuple(order)


def topo_order(dag: Dag) -> tuple[int, ...]:
    return dag.topo_order()


def prune(dag: Dag) -> Dag:
    """Restrict to vertices/edges lying on some source-sink path.

    The result carries ``parent_vertices`` / ``parent_edges`` maps into
    ``dag``.  Raises NoPath when the sink is unreachable.
    """
    n = dag.n_vertices
    fwd = _reach(dag, dag.source, forward=True)
    bwd = _reach(dag, dag.sink, forward=False)
    keep_v = [v for v in range(n) if fwd[v] and bwd[v]]
    if dag.sink not in set(keep_v) or dag.source not in set(keep_v):
        raise NoPath("sink is unreachable from source")
    new_id = {v: i for i, v in enumerate(keep_v)}
    keep_e = [j for j, (u, v) in enumerate(dag.edges) if fwd[u] and bwd[v]]
    return Dag(
        names=tuple(dag.names[v] for v in keep_v),
        edges=tuple((new_id[dag.edges[j][0]], new_id[dag.edges[j][1]]) for j in keep_e),
        source=new_id[dag.source],
        sink=new_id[dag.sink],
        parent_vertices=tuple(keep_v),
        parent_edges=tuple(keep_e),
    )


def _reach(dag: Dag, start: int, forward: bool) -> list[bool]:
    adj = dag.out_edges if forward else dag.in_edges
    seen = [False] * dag.n_vertices
    seen[start] = True
    stack = [start]
    while stack:
        v = stack.pop()
        for e in adj[v]:
            w = dag.edges[e][1] if forward else dag.edges[e][0]
            if not seen[w]:
                seen[w] = True
                stack.append(w)
    return seen


def count_paths(dag: Dag) -> list[int]:
    """Exact number of source→v paths per vertex (Python integers).

    The recurrence is C(source) = 1 and C(v) = sum of C(u) over incoming
    edges (u, v); on a pruned graph C(sink) equals the total number of
    source-sink paths.
    """
    counts = [0] * dag.n_vertices
    counts[dag.source] = 1
    for v in dag.topo_order():
        if v == dag.source:
            continue
        counts[v] = sum(counts[dag.edges[e][0]] for e in dag.in_edges[v])
    return counts


def count_paths_to_sink(dag: Dag) -> list[int]:
    """Exact number of v→sink paths per vertex."""
    counts = [0] * dag.n_vertices
    counts[dag.sink] = 1
    for v in reversed(dag.topo_order()):
        if v == dag.sink:
            continue
        counts[v] = sum(counts[dag.edges[e][1]] for e in dag.out_edges[v])
    return counts


def longest_dist(dag: Dag) -> list[int]:
    """Length of the longest source→v path per vertex.

    Vertices unreachable from the source get -1; on pruned graphs every
    entry is defined and every edge strictly increases the label.
    """
    dist = [-1] * dag.n_vertices
    dist[dag.source] = 0
    for v in dag.topo_order():
        if dist[v] < 0:
            continue
        for e in dag.out_edges[v]:
            w = dag.edges[e][1]
            dist[w] = max(dist[w], dist[v] + 1)
    return dist


def shortest_dist(dag: Dag) -> list[int]:
    """Length of the shortest source→v path per vertex (-1 if unreachable)."""
    big = dag.n_vertices + 1
    dist = [big] * dag.n_vertices
    dist[dag.source] = 0
    for v in dag.topo_order():
        if dist[v] >= big:
            continue
        for e in dag.out_edges[v]:
            w = dag.edges[e][1]
            dist[w] = min(dist[w], dist[v] + 1)
    return [d if d < big else -1 for d in dist]


def enumerate_paths(dag: Dag, cap: int = 5000) -> list[Path]:
    """All source-sink paths as edge-index tuples, in lexicographic order.

    Raises TooManyPaths when the exact count exceeds ``cap`` (checked
    before any enumeration work).
    """
    total = count_paths_to_sink(dag)[dag.source]
    if total > cap:
        raise TooManyPaths(f"{total} paths exceed cap {cap}")
    out: list[Path] = []
    stack: list[tuple[int, tuple[int, ...]]] = [(dag.source, ())]
    while stack:
        v, prefix = stack.pop()
        if v == dag.sink:
            out.append(prefix)
            continue
        # reversed so that smaller edge ids are explored first
        for e in reversed(dag.out_edges[v]):
            stack.append((dag.edges[e][1], prefix + (e,)))
    return out


def validate_flow(values: Sequence[float], dag: Dag, tol: float = FLOW_TOL) -> bool:
    """True iff ``values`` satisfies the flow-polytope constraints within tol.

    Checks unit mass at source and sink, conservation at every vertex
    (incoming sum on non-sources, outgoing sum on non-sinks), and that all
    entries lie in [-tol, 1 + tol].
    """
    x = np.asarray(values, dtype=float)
    if x.shape != (dag.n_coords,):
        raise DimensionMismatch(f"expected {dag.n_coords} coordinates, got {x.shape}")
    if x.min() < -tol or x.max() > 1.0 + tol:
        return False
    if abs(x[dag.source] - 1.0) > tol or abs(x[dag.sink] - 1.0) > tol:
        return False
    nv = dag.n_vertices
    for v in range(nv):
        if v != dag.source:
            if abs(x[v] - sum(x[nv + e] for e in dag.in_edges[v])) > tol:
                return False
        if v != dag.sink:
            if abs(x[v] - sum(x[nv + e] for e in dag.out_edges[v])) > tol:
                return False
    return True


def best_path_in_hindsight(
    dag: Dag, cumulative_loss: Sequence[float]
) -> tuple[Path, float]:
    """Minimum-total-loss source-sink path by topological-order DP.

    Weights may be negative.  Ties are broken toward the lexicographically
    smallest incoming edge id, which makes the result deterministic.
    """
    best: list[float] = [np.inf] * dag.n_vertices
    back: list[int | None] = [None] * dag.n_vertices
    best[dag.source] = 0.0
    for v in dag.topo_order():
        if not np.isfinite(best[v]):
            continue
        for e in dag.out_edges[v]:
            w = dag.edges[e][1]
            cand = best[v] + float(cumulative_loss[e])
            if cand < best[w] - 1e-15 or (
                abs(cand - best[w]) <= 1e-15 and (back[w] is None or e < back[w])
            ):
                best[w] = cand
                back[w] = e
    if not np.isfinite(best[dag.sink]):
        raise NoPath("sink is unreachable from source")
    rev: list[int] = []
    v = dag.sink
    while v != dag.source:
        e = back[v]
        assert e is not None
        rev.append(e)
        v = dag.edges[e][0]
    path = tuple(reversed(rev))
    return path, dag.path_loss(path, cumulative_loss)


def path_weight_range(dag: Dag, edge_weights: Sequence[float]) -> tuple[float, float]:
    """(min, max) total weight over all source-sink paths, by DP."""
    lo = [np.inf] * dag.n_vertices
    hi = [-np.inf] * dag.n_vertices
    lo[dag.source] = hi[dag.source] = 0.0
    for v in dag.topo_order():
        if not np.isfinite(lo[v]):
            continue
        for e in dag.out_edges[v]:
            w = dag.edges[e][1]
            we = float(edge_weights[e])
            lo[w] = min(lo[w], lo[v] + we)
            hi[w] = max(hi[w], hi[v] + we)
    if not np.isfinite(lo[dag.sink]):
        raise NoPath("sink is unreachable from source")
    return lo[dag.sink], hi[dag.sink]


def uniform_mixture_marginals(dag: Dag) -> np.ndarray:
    """Marginals of the uniform distribution over all source-sink paths.

    Computed exactly from forward/backward path counts and converted to
    float at the end, so it stays correct when counts overflow doubles.
    Requires a pruned graph (every coordinate positive); used as the
    canonical interior point of the flow polytope.
    """
    fwd = count_paths(dag)
    bwd = count_paths_to_sink(dag)
    total = fwd[dag.sink]
    if total == 0:
        raise NoPath("sink is unreachable from source")
    x = np.zeros(dag.n_coords)
    for v in range(dag.n_vertices):
        x[v] = float(Fraction(fwd[v] * bwd[v], total))
    for j, (u, v) in enumerate(dag.edges):
        x[dag.n_vertices + j] = float(Fraction(fwd[u] * bwd[v], total))
    return x
