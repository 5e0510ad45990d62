"""Path-length augmentation: auxiliary level bits that equalize path lengths.

Label every vertex with K(v), the longest source→v distance.  An edge
(u, v) "skips" the levels strictly between K(u) and K(v); a path of k
edges in a graph with longest path K skips exactly K - k levels in total,
and no level is skipped twice.  Appending one 0/1 coordinate per level to
a path's incidence vector therefore pads every path to the same total
augmented weight — which is what lets the unequal-length loss estimator
stay comparable across paths.

Levels that no edge can skip are dropped from the representation at
construction time: the square-root regularizer has unbounded slope at 0,
so carrying always-zero coordinates would break the solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .graph import Dag, Path, longest_dist


@dataclass(frozen=True)
class BitIndexMap:
    """Level bits of a DAG: which edges support which live levels.

    ``levels`` lists the live levels in increasing order (values in
    1..K-1); live level ``levels[i]`` is stored at augmented coordinate
    ``dag.n_coords + i``.  ``edge_levels[e]`` gives the live levels edge e
    skips, ``supporters[i]`` the edges skipping ``levels[i]``.
    """

    dag: Dag
    k_labels: tuple[int, ...]
    levels: tuple[int, ...]
    edge_levels: tuple[tuple[int, ...], ...]
    supporters: tuple[tuple[int, ...], ...]

    @property
    def n_bits(self) -> int:
        return len(self.levels)

    @property
    def longest(self) -> int:
        return self.k_labels[self.dag.sink]

    @property
    def n_coords(self) -> int:
        """Total augmented dimension: |V| + |E| + live bits."""
        return self.dag.n_coords + len(self.levels)

    @cached_property
    def position(self) -> dict[int, int]:
        """Live level -> bit slot."""
        return {lvl: i for i, lvl in enumerate(self.levels)}


def interval_set(dag: Dag, k_labels: list[int] | None = None) -> BitIndexMap:
    """Compute per-edge skipped-level sets and drop dead levels.

    Edge (u, v) covers exactly the levels i with K(u) < i < K(v).  A level
    with no covering edge is identically zero on every path and is removed
    from the live set.
    """
    if k_labels is None:
        k_labels = longest_dist(dag)
    K = k_labels[dag.sink]
    support: dict[int, list[int]] = {}
    raw: list[list[int]] = []
    for j, (u, v) in enumerate(dag.edges):
        lo, hi = k_labels[u], k_labels[v]
        covered = [i for i in range(lo + 1, hi) if 1 <= i <= K - 1]
        raw.append(covered)
        for i in covered:
            support.setdefault(i, []).append(j)
    levels = tuple(sorted(support))
    live = set(levels)
    return BitIndexMap(
        dag=dag,
        k_labels=tuple(k_labels),
        levels=levels,
        edge_levels=tuple(tuple(i for i in cov if i in live) for cov in raw),
        supporters=tuple(tuple(support[lvl]) for lvl in levels),
    )


def augment_path(path: Path, bitmap: BitIndexMap) -> np.ndarray:
    """Augmented 0/1 vector of a path: incidence plus its skipped-level bits.

    For a k-edge path the live bits sum to K - k, since consecutive path
    edges have disjoint skipped-level sets.
    """
    dag = bitmap.dag
    x = np.zeros(bitmap.n_coords)
    x[: dag.n_coords] = dag.incidence(path)
    base = dag.n_coords
    for e in path:
        for lvl in bitmap.edge_levels[e]:
            x[base + bitmap.position[lvl]] = 1.0
    return x


def augmented_constraints(bitmap: BitIndexMap) -> np.ndarray:
    """One equality row per live bit, tying it to its supporting edges.

    Returns a matrix R with one row per live bit over the augmented
    coordinate space; every augmented point x of the domain satisfies
    R @ x = 0.  Together with the flow constraints these rows are the
    exact linear description of the augmented polytope.
    """
    dag = bitmap.dag
    rows = np.zeros((bitmap.n_bits, bitmap.n_coords))
    for i, edges in enumerate(bitmap.supporters):
        rows[i, dag.n_coords + i] = 1.0
        for e in edges:
            rows[i, dag.n_vertices + e] -= 1.0
    return rows
