"""Markovian path sampling from a point of the flow polytope.

Starting at the source, each outgoing edge is taken with probability
proportional to its coordinate in the flow point; by the conservation
constraints the marginal of every vertex and edge under this walk equals
its coordinate exactly.  Branch probabilities are normalized by the sum
of outgoing edge values rather than the vertex value, which is identical
under exact flow constraints but robust to solver-level slack.

Randomness comes from numpy's Philox generator: counter-based, explicit
seed, bit-exact across platforms, and cheap to split one-stream-per-run.
"""

from __future__ import annotations

import numpy as np

from .errors import DeadEnd, TooManyPaths
from .graph import Dag, Path, count_paths_to_sink, enumerate_paths


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator with an explicit 64-bit seed."""
    return np.random.Generator(np.random.Philox(seed))


def sample_path(dag: Dag, flow: np.ndarray, rng: np.random.Generator) -> Path:
    """One source-sink path whose per-coordinate law matches ``flow``."""
    nv = dag.n_vertices
    path: list[int] = []
    v = dag.source
    while v != dag.sink:
        out = dag.out_edges[v]
        if not out:
            raise DeadEnd(f"vertex {v} has no outgoing edges")
        weights = np.array([flow[nv + e] for e in out], dtype=float)
        if weights.min() < -1e-9:
            raise DeadEnd(f"negative edge mass at vertex {v}")
        weights = np.maximum(weights, 0.0)
        total = weights.sum()
        if total <= 0.0:
            raise DeadEnd(f"no outgoing mass at vertex {v}")
        e = out[rng.choice(len(out), p=weights / total)]
        path.append(e)
        v = dag.edges[e][1]
    return tuple(path)


def sampler_law(dag: Dag, flow: np.ndarray, cap: int = 5000) -> dict[Path, float]:
    """Exact outcome distribution of the walk, path by path.

    Multiplies conditional branch probabilities along each enumerated
    path; a test oracle, so it refuses graphs with more than ``cap``
    paths.
    """
    total_paths = count_paths_to_sink(dag)[dag.source]
    if total_paths > cap:
        raise TooManyPaths(f"{total_paths} paths exceed cap {cap}")
    nv = dag.n_vertices
    out_sum = np.zeros(dag.n_vertices)
    for v in range(dag.n_vertices):
        out_sum[v] = sum(float(flow[nv + e]) for e in dag.out_edges[v])
    law: dict[Path, float] = {}
    for p in enumerate_paths(dag, cap):
        prob = 1.0
        for e in p:
            u = dag.edges[e][0]
            prob *= float(flow[nv + e]) / out_sum[u]
        law[p] = prob
    return law


def law_marginals(dag: Dag, law: dict[Path, float]) -> np.ndarray:
    """Per-coordinate marginals of a path distribution (V ∪ E space)."""
    x = np.zeros(dag.n_coords)
    for p, q in law.items():
        x += q * dag.incidence(p)
    return x
