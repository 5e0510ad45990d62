"""Graph compression via a path-count spanning tree and centroid hierarchy.

Every vertex (except the source) keeps the incoming edge whose tail sees
the most source paths; those edges form a spanning out-tree, and any
source-sink path crosses at most log2(#paths) non-tree edges.  A centroid
decomposition of the tree then yields a compressed graph over vertex
triples (v-, v, v+): "express" edges (v-, c) and (c, v+) stand for whole
tree subpaths through centroid c, while each non-tree edge (u, v) becomes
(u+, v-).  Paths in the compressed graph biject with paths in the
original, their lengths shrink to O(log #paths), and summing original
edge weights over each express edge's subpath preserves every path
weight exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import InvalidPath, UnknownEdge
from .graph import Dag, Path, count_paths, prune

EdgeKind = str  # "into-centroid" | "out-of-centroid" | "non-tree"


@dataclass(frozen=True)
class SpanningTree:
    """Max-path-count spanning out-tree of a pruned DAG.

    ``parent_edge[v]`` is the kept incoming edge of v (None at the source).
    ``tin``/``tout`` are preorder intervals for O(1) ancestor tests in the
    tree.
    """

    dag: Dag
    parent_edge: tuple[int | None, ...]
    tree_edges: frozenset[int]
    children: tuple[tuple[int, ...], ...]
    tin: tuple[int, ...]
    tout: tuple[int, ...]

    def parent(self, v: int) -> int | None:
        e = self.parent_edge[v]
        return None if e is None else self.dag.edges[e][0]

    def is_ancestor(self, u: int, v: int) -> bool:
        """Ancestor-or-self test in the out-tree."""
        return self.tin[u] <= self.tin[v] and self.tout[v] <= self.tout[u]

    def path_edges(self, u: int, v: int) -> tuple[int, ...]:
        """Tree edges along the unique directed path u → v (u an ancestor)."""
        if not self.is_ancestor(u, v):
            raise InvalidPath(f"no directed tree path from {u} to {v}")
        rev: list[int] = []
        at = v
        while at != u:
            e = self.parent_edge[at]
            assert e is not None
            rev.append(e)
            at = self.dag.edges[e][0]
        return tuple(reversed(rev))


def build_spanning_tree(dag: Dag, counts: list[int] | None = None) -> SpanningTree:
    """Keep, per non-source vertex, the incoming edge maximizing the tail's
    path count; ties go to the tail with the largest topological index.

    The tie rule is arbitrary for correctness but fixed for reproducible
    compressed graphs.
    """
    if counts is None:
        counts = count_paths(dag)
    pos = dag.topo_position
    parent_edge: list[int | None] = [None] * dag.n_vertices
    for v in range(dag.n_vertices):
        if v == dag.source:
            continue
        best_e = None
        best_key = None
        for e in dag.in_edges[v]:
            u = dag.edges[e][0]
            key = (counts[u], pos[u])
            if best_key is None or key > best_key:
                best_key = key
                best_e = e
        if best_e is None:
            raise InvalidPath(f"vertex {v} has no incoming edge; prune first")
        parent_edge[v] = best_e

    children: list[list[int]] = [[] for _ in range(dag.n_vertices)]
    for v, e in enumerate(parent_edge):
        if e is not None:
            children[dag.edges[e][0]].append(v)

    tin = [0] * dag.n_vertices
    tout = [0] * dag.n_vertices
    clock = 0
    stack: list[tuple[int, bool]] = [(dag.source, False)]
    while stack:
        v, done = stack.pop()
        if done:
            tout[v] = clock
            continue
        tin[v] = clock
        clock += 1
        stack.append((v, True))
        for w in reversed(children[v]):
            stack.append((w, False))

    return SpanningTree(
        dag=dag,
        parent_edge=tuple(parent_edge),
        tree_edges=frozenset(e for e in parent_edge if e is not None),
        children=tuple(tuple(c) for c in children),
        tin=tuple(tin),
        tout=tuple(tout),
    )


@dataclass(frozen=True)
class CentroidDecomp:
    """Recursive centroid hierarchy of a spanning tree.

    Every vertex is the centroid of exactly one subtree;
    ``subtree_vertices[c]`` is that subtree's vertex set and
    ``chain[v]`` lists, top-down, the centroids whose subtree contains v.
    """

    tree: SpanningTree
    top: int
    subtree_vertices: tuple[tuple[int, ...], ...]
    child_centroids: tuple[tuple[int, ...], ...]
    chain: tuple[tuple[int, ...], ...]


def centroid_decompose(tree: SpanningTree) -> CentroidDecomp:
    """Recursively split the (undirected) tree at centroids.

    A centroid's removal leaves components of at most half the subtree's
    size; among valid centroids the smallest vertex id wins, again purely
    for determinism.
    """
    n = tree.dag.n_vertices
    adj: list[list[int]] = [[] for _ in range(n)]
    for e in tree.tree_edges:
        u, v = tree.dag.edges[e]
        adj[u].append(v)
        adj[v].append(u)

    removed = [False] * n
    subtree_vertices: list[tuple[int, ...]] = [()] * n
    child_centroids: list[list[int]] = [[] for _ in range(n)]
    chain: list[list[int]] = [[] for _ in range(n)]

    def component(start: int) -> list[int]:
        comp = [start]
        seen = {start}
        k = 0
        while k < len(comp):
            for w in adj[comp[k]]:
                if not removed[w] and w not in seen:
                    seen.add(w)
                    comp.append(w)
            k += 1
        return comp

    def find_centroid(comp: list[int]) -> int:
        total = len(comp)
        comp_set = set(comp)
        size = {v: 1 for v in comp}
        order: list[tuple[int, int]] = []  # (vertex, parent) in DFS postorder
        seen = {comp[0]}
        stack = [(comp[0], -1)]
        while stack:
            v, p = stack.pop()
            order.append((v, p))
            for w in adj[v]:
                if w in comp_set and not removed[w] and w not in seen:
                    seen.add(w)
                    stack.append((w, v))
        for v, p in reversed(order):
            if p >= 0:
                size[p] += size[v]
        parent_of = {v: p for v, p in order}
        best = None
        for v in comp:
            heaviest = total - size[v]
            for w in adj[v]:
                if w in comp_set and not removed[w] and parent_of.get(w) == v:
                    heaviest = max(heaviest, size[w])
            if 2 * heaviest <= total and (best is None or v < best):
                best = v
        assert best is not None  # every tree has a centroid
        return best

    top: int | None = None
    stack: list[tuple[list[int], int | None]] = [(component(tree.dag.source), None)]
    while stack:
        comp, parent = stack.pop()
        c = find_centroid(comp)
        subtree_vertices[c] = tuple(sorted(comp))
        for v in comp:
            chain[v].append(c)
        if parent is None:
            top = c
        else:
            child_centroids[parent].append(c)
        removed[c] = True
        for w in adj[c]:
            if not removed[w]:
                stack.append((component(w), c))

    assert top is not None
    return CentroidDecomp(
        tree=tree,
        top=top,
        subtree_vertices=tuple(subtree_vertices),
        child_centroids=tuple(tuple(cc) for cc in child_centroids),
        chain=tuple(tuple(ch) for ch in chain),
    )


@dataclass(frozen=True)
class CompressedDag:
    """The compressed graph plus everything needed to move between spaces.

    Vertex 3i is "v-" (entry copy), 3i+1 the center, 3i+2 "v+" (exit copy)
    of original vertex i; the compressed source/sink are the entry copy of
    the source and the exit copy of the sink.  ``sigma_lists[j]`` is the
    ordered list of original edges the compressed edge j abbreviates
    (empty exactly for the (c-, c) / (c, c+) self edges).
    """

    base: Dag
    tree: SpanningTree
    decomp: CentroidDecomp
    gdag: Dag
    sigma_lists: tuple[tuple[int, ...], ...]
    kinds: tuple[EdgeKind, ...]

    @cached_property
    def into_edge(self) -> dict[tuple[int, int], int]:
        """(v, c) -> compressed edge id of (v-, c)."""
        return {
            (self.gdag.edges[j][0] // 3, self.gdag.edges[j][1] // 3): j
            for j, k in enumerate(self.kinds)
            if k == "into-centroid"
        }

    @cached_property
    def out_edge(self) -> dict[tuple[int, int], int]:
        """(c, v) -> compressed edge id of (c, v+)."""
        return {
            (self.gdag.edges[j][0] // 3, self.gdag.edges[j][1] // 3): j
            for j, k in enumerate(self.kinds)
            if k == "out-of-centroid"
        }

    @cached_property
    def nontree_edge(self) -> dict[int, int]:
        """Original non-tree edge id -> compressed edge id of (u+, v-)."""
        return {
            self.sigma_lists[j][0]: j
            for j, k in enumerate(self.kinds)
            if k == "non-tree"
        }


def flat_id(v: int) -> int:
    return 3 * v


def mid_id(v: int) -> int:
    return 3 * v + 1


def sharp_id(v: int) -> int:
    return 3 * v + 2


def build_gdagger(
    dag: Dag, tree: SpanningTree | None = None, decomp: CentroidDecomp | None = None
) -> CompressedDag:
    """Construct the compressed graph over vertex triples.

    For every centroid c and every vertex v of its subtree: add (v-, c)
    when a directed tree path v → c exists (or v = c), and (c, v+) when
    c → v exists (or v = c).  Every non-tree edge (u, v) becomes (u+, v-).
    The self edges (c-, c) and (c, c+) are always present, so no triple
    vertex is ever isolated.
    """
    if tree is None:
        tree = build_spanning_tree(dag)
    if decomp is None:
        decomp = centroid_decompose(tree)

    names: list[str] = []
    for v in range(dag.n_vertices):
        nm = dag.names[v]
        names.extend((f"{nm}-", nm, f"{nm}+"))

    edges: list[tuple[int, int]] = []
    sigma_lists: list[tuple[int, ...]] = []
    kinds: list[EdgeKind] = []

    for c in range(dag.n_vertices):
        for v in decomp.subtree_vertices[c]:
            if tree.is_ancestor(v, c):
                edges.append((flat_id(v), mid_id(c)))
                sigma_lists.append(tree.path_edges(v, c))
                kinds.append("into-centroid")
            if tree.is_ancestor(c, v):
                edges.append((mid_id(c), sharp_id(v)))
                sigma_lists.append(tree.path_edges(c, v))
                kinds.append("out-of-centroid")

    for e, (u, v) in enumerate(dag.edges):
        if e not in tree.tree_edges:
            edges.append((sharp_id(u), flat_id(v)))
            sigma_lists.append((e,))
            kinds.append("non-tree")

    gdag = Dag(
        names=tuple(names),
        edges=tuple(edges),
        source=flat_id(dag.source),
        sink=sharp_id(dag.sink),
    )
    return CompressedDag(
        base=dag,
        tree=tree,
        decomp=decomp,
        gdag=gdag,
        sigma_lists=tuple(sigma_lists),
        kinds=tuple(kinds),
    )


def compress(dag: Dag) -> CompressedDag:
    """Full pipeline: spanning tree, centroid hierarchy, compressed graph."""
    tree = build_spanning_tree(dag)
    return build_gdagger(dag, tree, centroid_decompose(tree))


def sigma(cdag: CompressedDag, edge_dagger: int) -> tuple[int, ...]:
    """Ordered original edges abbreviated by a compressed edge."""
    if not (0 <= edge_dagger < cdag.gdag.n_edges):
        raise UnknownEdge(f"compressed edge {edge_dagger} does not exist")
    return cdag.sigma_lists[edge_dagger]


def project_path(cdag: CompressedDag, path_dagger: Path) -> Path:
    """Map a compressed source-sink path to the original path it encodes."""
    cdag.gdag.check_path(path_dagger)
    out: list[int] = []
    for e in path_dagger:
        out.extend(cdag.sigma_lists[e])
    path = tuple(out)
    cdag.base.check_path(path)
    return path


def lift_path(cdag: CompressedDag, path: Path) -> Path:
    """Map an original source-sink path to its compressed counterpart.

    The path splits into maximal tree segments at its non-tree edges; each
    segment (u, ..., w) is routed through the unique centroid c with
    u, w both in c's subtree and c on the segment, contributing the two
    express edges (u-, c) and (c, w+).
    """
    dag = cdag.base
    dag.check_path(path)
    tree, decomp = cdag.tree, cdag.decomp

    segments: list[tuple[int, int]] = []
    crossings: list[int] = []
    seg_start = dag.source
    at = dag.source
    for e in path:
        _, v = dag.edges[e]
        if e in tree.tree_edges:
            at = v
            continue
        segments.append((seg_start, at))
        crossings.append(e)
        seg_start = v
        at = v
    segments.append((seg_start, at))

    out: list[int] = []
    for idx, (u, w) in enumerate(segments):
        c = _segment_centroid(tree, decomp, u, w)
        out.append(cdag.into_edge[(u, c)])
        out.append(cdag.out_edge[(c, w)])
        if idx < len(crossings):
            out.append(cdag.nontree_edge[crossings[idx]])
    lifted = tuple(out)
    cdag.gdag.check_path(lifted)
    return lifted


def _segment_centroid(tree: SpanningTree, decomp: CentroidDecomp, u: int, w: int) -> int:
    """The unique centroid on the tree path u → w whose subtree holds both."""
    cu, cw = decomp.chain[u], decomp.chain[w]
    for a, b in zip(cu, cw):
        if a != b:
            break
        if tree.is_ancestor(u, a) and tree.is_ancestor(a, w):
            return a
    raise InvalidPath(f"no centroid covers tree segment {u} → {w}")


def convert_weights(cdag: CompressedDag, edge_weights) -> list:
    """Weights for compressed edges: sum of the abbreviated original weights.

    Empty abbreviation lists get weight 0.  Exact arithmetic survives:
    feeding Fractions in yields Fractions out.
    """
    return [
        sum((edge_weights[e] for e in lst), 0) if lst else 0
        for lst in cdag.sigma_lists
    ]
