"""Reductions from combinatorial decision domains to source-sink DAGs.

Each constructor returns a :class:`Reduction` bundling the DAG, a
bijective codec between domain actions and paths, and a loss lift with
the defining property that the domain loss of an action equals the inner
product of its encoded path with the lifted edge weights — exactly, so a
bandit learner run on the DAG solves the original problem.

Domains: bit vectors (hypercube), one-arm-per-task tuples (multi-task
bandits), fixed-weight bit vectors (m-sets), bounded-length walks in a
possibly cyclic graph, soldier allocations (Colonel Blotto), and
strategies of two-player games given as decision/observation/terminal
trees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import ConfigError, InvalidPath, MalformedGame, NoPath, NoWalk
from .graph import Dag, Path, prune


@dataclass(frozen=True)
class Reduction:
    """A combinatorial domain realized as path choice in a DAG.

    ``encode``/``decode`` are mutually inverse between the domain's
    canonical action set and source-sink paths; ``lift_loss`` maps one
    round's domain loss description to edge weights over the DAG.
    ``gamma_override``, when present, maps (horizon, delta) to a
    per-coordinate exploration vector over V ∪ E.
    """

    kind: str
    dag: Dag
    encode: Callable[[Any], Path]
    decode: Callable[[Path], Any]
    lift_loss: Callable[[Any], np.ndarray]
    equal_length: bool
    meta: dict = field(default_factory=dict)
    gamma_override: Callable[[int, float], np.ndarray] | None = None


# ---------------------------------------------------------------------------
# hypercube


def hypercube(d: int) -> Reduction:
    """Bit vectors of length d: bit i set <=> take the two-edge detour at
    step i.  2d+1 vertices, 3d edges, 2^d paths of length d..2d."""
    if d < 1:
        raise ConfigError(f"hypercube dimension must be >= 1, got {d}")
    names = ["v0"]
    edges: list[tuple[int, int]] = []
    skip = {}
    det_in = {}
    det_out = {}
    for i in range(1, d + 1):
        names.append(f"u{i}")
        names.append(f"v{i}")
    name_id = {nm: k for k, nm in enumerate(names)}
    for i in range(1, d + 1):
        prev, mid, nxt = name_id[f"v{i-1}"], name_id[f"u{i}"], name_id[f"v{i}"]
        skip[i] = len(edges)
        edges.append((prev, nxt))
        det_in[i] = len(edges)
        edges.append((prev, mid))
        det_out[i] = len(edges)
        edges.append((mid, nxt))
    dag = Dag(tuple(names), tuple(edges), name_id["v0"], name_id[f"v{d}"])

    def encode(bits: Sequence[int]) -> Path:
        if len(bits) != d:
            raise ConfigError(f"action must have {d} bits")
        out = []
        for i in range(1, d + 1):
            if bits[i - 1]:
                out.extend((det_in[i], det_out[i]))
            else:
                out.append(skip[i])
        return tuple(out)

    def decode(path: Path) -> tuple[int, ...]:
        dag.check_path(path)
        chosen = set(path)
        return tuple(1 if det_in[i] in chosen else 0 for i in range(1, d + 1))

    def lift_loss(y: Sequence[float]) -> np.ndarray:
        w = np.zeros(dag.n_edges)
        for i in range(1, d + 1):
            w[det_in[i]] = y[i - 1]
        return w

    return Reduction(
        kind="hypercube",
        dag=dag,
        encode=encode,
        decode=decode,
        lift_loss=lift_loss,
        equal_length=False,
        meta={"d": d, "n_actions": 2**d},
    )


# ---------------------------------------------------------------------------
# multi-task bandits


def multitask(dims: Sequence[int]) -> Reduction:
    """One arm per task: a path crosses task gadgets in sequence, entering
    arm j of task i through its private two-edge fork.  All paths have
    length 2m, so the equal-length learner applies; the per-coordinate
    exploration override scales each task's coordinates by 1/sqrt(d_i).
    """
    dims = tuple(int(x) for x in dims)
    if not dims or any(x < 2 for x in dims):
        raise ConfigError(f"each task needs >= 2 arms, got {dims}")
    m = len(dims)
    d = sum(dims)
    names = ["s0"]
    for i in range(1, m + 1):
        for j in range(dims[i - 1]):
            names.append(f"a{i}.{j}")
        names.append(f"s{i}")
    name_id = {nm: k for k, nm in enumerate(names)}
    edges: list[tuple[int, int]] = []
    in_edge: dict[tuple[int, int], int] = {}
    out_edge: dict[tuple[int, int], int] = {}
    for i in range(1, m + 1):
        for j in range(dims[i - 1]):
            arm = name_id[f"a{i}.{j}"]
            in_edge[(i, j)] = len(edges)
            edges.append((name_id[f"s{i-1}"], arm))
            out_edge[(i, j)] = len(edges)
            edges.append((arm, name_id[f"s{i}"]))
    dag = Dag(tuple(names), tuple(edges), name_id["s0"], name_id[f"s{m}"])
    offsets = [0]
    for x in dims:
        offsets.append(offsets[-1] + x)

    def encode(arms: Sequence[int]) -> Path:
        if len(arms) != m or any(not (0 <= a < dims[i]) for i, a in enumerate(arms)):
            raise ConfigError(f"action must pick one arm per task out of {dims}")
        out = []
        for i, a in enumerate(arms, start=1):
            out.extend((in_edge[(i, a)], out_edge[(i, a)]))
        return tuple(out)

    def decode(path: Path) -> tuple[int, ...]:
        dag.check_path(path)
        arms = []
        for pos in range(0, 2 * m, 2):
            e = path[pos]
            arm_vertex = dag.edges[e][1]
            nm = dag.names[arm_vertex]
            i, j = nm[1:].split(".")
            arms.append(int(j))
        return tuple(arms)

    def lift_loss(y: Sequence[float]) -> np.ndarray:
        w = np.zeros(dag.n_edges)
        for i in range(1, m + 1):
            for j in range(dims[i - 1]):
                w[in_edge[(i, j)]] = y[offsets[i - 1] + j]
        return w

    def gamma_override(horizon: int, delta: float) -> np.ndarray:
        g = np.empty(dag.n_coords)
        spine = math.sqrt(math.log2(d / delta) / horizon)
        for i in range(0, m + 1):
            g[name_id[f"s{i}"]] = spine
        for i in range(1, m + 1):
            task = math.sqrt(math.log2(d / delta) / (dims[i - 1] * horizon))
            for j in range(dims[i - 1]):
                g[name_id[f"a{i}.{j}"]] = task
                g[dag.n_vertices + in_edge[(i, j)]] = task
                g[dag.n_vertices + out_edge[(i, j)]] = task
        return g

    return Reduction(
        kind="multitask",
        dag=dag,
        encode=encode,
        decode=decode,
        lift_loss=lift_loss,
        equal_length=True,
        meta={"dims": dims, "d": d, "n_actions": int(np.prod(dims))},
        gamma_override=gamma_override,
    )


# ---------------------------------------------------------------------------
# m-sets


def msets(d: int, m: int) -> Reduction:
    """Bit vectors with exactly m ones, as monotone lattice paths.

    The grid has (d-m+1)(m+1) vertices; the vertical step at column i
    from level j-1 to j selects index i+j (1-based), so a path's vertical
    steps read off the chosen set.  All paths have length d.
    """
    if not (1 <= m <= d):
        raise ConfigError(f"need 1 <= m <= d, got m={m}, d={d}")
    cols, levels = d - m, m
    names = [f"g{i}.{j}" for i in range(cols + 1) for j in range(levels + 1)]
    name_id = {nm: k for k, nm in enumerate(names)}
    vid = lambda i, j: name_id[f"g{i}.{j}"]  # noqa: E731
    edges: list[tuple[int, int]] = []
    vertical: dict[tuple[int, int], int] = {}
    horizontal: dict[tuple[int, int], int] = {}
    for i in range(cols + 1):
        for j in range(1, levels + 1):
            vertical[(i, j)] = len(edges)
            edges.append((vid(i, j - 1), vid(i, j)))
    for i in range(1, cols + 1):
        for j in range(levels + 1):
            horizontal[(i, j)] = len(edges)
            edges.append((vid(i - 1, j), vid(i, j)))
    dag = Dag(tuple(names), tuple(edges), vid(0, 0), vid(cols, levels))

    def encode(bits: Sequence[int]) -> Path:
        if len(bits) != d or sum(1 for b in bits if b) != m:
            raise ConfigError(f"action must be a {d}-bit vector with exactly {m} ones")
        i = j = 0
        out = []
        for k in range(1, d + 1):
            if bits[k - 1]:
                j += 1
                out.append(vertical[(i, j)])
            else:
                i += 1
                out.append(horizontal[(i, j)])
        return tuple(out)

    def decode(path: Path) -> tuple[int, ...]:
        dag.check_path(path)
        bits = [0] * d
        for e in path:
            u, v = dag.edges[e]
            iu, ju = (int(t) for t in dag.names[u][1:].split("."))
            iv, jv = (int(t) for t in dag.names[v][1:].split("."))
            if jv == ju + 1:
                bits[iv + jv - 1] = 1
        return tuple(bits)

    def lift_loss(y: Sequence[float]) -> np.ndarray:
        w = np.zeros(dag.n_edges)
        for (i, j), e in vertical.items():
            w[e] = y[i + j - 1]
        return w

    return Reduction(
        kind="mset",
        dag=dag,
        encode=encode,
        decode=decode,
        lift_loss=lift_loss,
        equal_length=True,
        meta={"d": d, "m": m, "n_actions": math.comb(d, m)},
    )


# ---------------------------------------------------------------------------
# bounded-length walks in a directed graph


def shortest_walk(
    n_vertices: int,
    arcs: Sequence[tuple[int, int]],
    source: int,
    sink: int,
    max_steps: int,
) -> Reduction:
    """Walks of length <= K in a (possibly cyclic) graph, time-expanded.

    Layer copies v^(0..K) of every vertex; arc (u, v) becomes (u^(i-1),
    v^(i)) on every layer, and a zero-weight pad loop at the sink absorbs
    walks shorter than K.  The sink is absorbing (a walk ends on first
    arrival), which is what makes the path correspondence one-to-one.
    Unreachable layer copies are pruned away before learning.
    """
    if max_steps < 1:
        raise ConfigError(f"walk length bound must be >= 1, got {max_steps}")
    arcs = [tuple(a) for a in arcs]
    if any(u == v for u, v in arcs):
        raise ConfigError("self-loops are not allowed in the walk graph")
    if len(set(arcs)) != len(arcs):
        raise ConfigError("parallel arcs are not allowed in the walk graph")
    K = max_steps
    names = [f"n{v}@{i}" for i in range(K + 1) for v in range(n_vertices)]
    vid = lambda v, i: i * n_vertices + v  # noqa: E731
    edges: list[tuple[int, int]] = []
    layered_arc: list[tuple[int, int]] = []  # (original arc id, layer); pad = (-1, layer)
    full_edge_of: dict[tuple[int, int], int] = {}
    for i in range(1, K + 1):
        for a, (u, v) in enumerate(arcs):
            if u == sink:
                continue  # absorbing sink: walks stop on first arrival
            full_edge_of[(a, i)] = len(edges)
            edges.append((vid(u, i - 1), vid(v, i)))
            layered_arc.append((a, i))
        full_edge_of[(-1, i)] = len(edges)
        edges.append((vid(sink, i - 1), vid(sink, i)))
        layered_arc.append((-1, i))
    full = Dag(tuple(names), tuple(edges), vid(source, 0), vid(sink, K))
    try:
        dag = prune(full)
    except NoPath as exc:
        raise NoWalk(f"sink {sink} unreachable within {K} steps") from exc
    assert dag.parent_edges is not None
    full_to_pruned = {fe: j for j, fe in enumerate(dag.parent_edges)}
    arc_of = [layered_arc[fe] for fe in dag.parent_edges]
    arc_id = {a: k for k, a in enumerate(arcs)}

    def encode(walk: Sequence[tuple[int, int]]) -> Path:
        if len(walk) > K:
            raise ConfigError(f"walk has {len(walk)} steps, bound is {K}")
        at = source
        out = []
        for step, (u, v) in enumerate(walk, start=1):
            if u != at or (u, v) not in arc_id:
                raise InvalidPath(f"walk breaks at step {step}")
            if u == sink:
                raise InvalidPath("walk continues past the sink")
            fe = full_edge_of[(arc_id[(u, v)], step)]
            if fe not in full_to_pruned:
                raise InvalidPath(f"walk step {step} cannot reach the sink in time")
            out.append(full_to_pruned[fe])
            at = v
        if at != sink:
            raise InvalidPath("walk does not end at the sink")
        for step in range(len(walk) + 1, K + 1):
            out.append(full_to_pruned[full_edge_of[(-1, step)]])
        return tuple(out)

    def decode(path: Path) -> tuple[tuple[int, int], ...]:
        dag.check_path(path)
        walk = []
        for e in path:
            a, _ = arc_of[e]
            if a >= 0:
                walk.append(arcs[a])
        return tuple(walk)

    def lift_loss(y: Sequence[float]) -> np.ndarray:
        w = np.zeros(dag.n_edges)
        for e, (a, _) in enumerate(arc_of):
            if a >= 0:
                w[e] = y[a]
        return w

    return Reduction(
        kind="walk",
        dag=dag,
        encode=encode,
        decode=decode,
        lift_loss=lift_loss,
        equal_length=True,
        meta={"n_vertices": n_vertices, "max_steps": K, "n_arcs": len(arcs)},
    )


# ---------------------------------------------------------------------------
# Colonel Blotto


def blotto(n_soldiers: int, n_battlefields: int) -> Reduction:
    """Allocations of N soldiers over K battlefields as monotone paths.

    Vertex (i, j) means j soldiers spent after battlefield i; the edge
    (i-1, j0) -> (i, j1) allocates j1 - j0 soldiers to battlefield i.  A
    round's loss is described by (tensors, rival) where tensors[i][a][b]
    is battlefield i's loss and rival the opposing allocation.
    """
    if n_soldiers < 0 or n_battlefields < 1:
        raise ConfigError(
            f"need N >= 0 soldiers and K >= 1 battlefields, got {n_soldiers}, {n_battlefields}"
        )
    N, K = n_soldiers, n_battlefields
    levels: dict[int, list[int]] = {0: [0], K: [N]}
    for i in range(1, K):
        levels[i] = list(range(N + 1))
    names = []
    name_id = {}
    for i in range(K + 1):
        for j in levels[i]:
            name_id[(i, j)] = len(names)
            names.append(f"b{i}.{j}")
    edges: list[tuple[int, int]] = []
    edge_of: dict[tuple[int, int, int], int] = {}
    for i in range(1, K + 1):
        for j0 in levels[i - 1]:
            for j1 in levels[i]:
                if j1 >= j0:
                    edge_of[(i, j0, j1)] = len(edges)
                    edges.append((name_id[(i - 1, j0)], name_id[(i, j1)]))
    dag = Dag(tuple(names), tuple(edges), name_id[(0, 0)], name_id[(K, N)])

    def encode(alloc: Sequence[int]) -> Path:
        if len(alloc) != K or any(a < 0 for a in alloc) or sum(alloc) != N:
            raise ConfigError(f"allocation must be {K} nonnegative counts summing to {N}")
        out = []
        j = 0
        for i, a in enumerate(alloc, start=1):
            out.append(edge_of[(i, j, j + a)])
            j += a
        return tuple(out)

    def decode(path: Path) -> tuple[int, ...]:
        dag.check_path(path)
        alloc = []
        for e in path:
            u, v = dag.edges[e]
            j0 = int(dag.names[u].split(".")[1])
            j1 = int(dag.names[v].split(".")[1])
            alloc.append(j1 - j0)
        return tuple(alloc)

    def lift_loss(loss: tuple) -> np.ndarray:
        tensors, rival = loss
        if len(tensors) != K or len(rival) != K:
            raise ConfigError(f"need one loss tensor and one rival count per battlefield")
        w = np.zeros(dag.n_edges)
        for (i, j0, j1), e in edge_of.items():
            w[e] = float(tensors[i - 1][j1 - j0][rival[i - 1]])
        return w

    return Reduction(
        kind="blotto",
        dag=dag,
        encode=encode,
        decode=decode,
        lift_loss=lift_loss,
        equal_length=True,
        meta={
            "n_soldiers": N,
            "n_battlefields": K,
            "n_actions": math.comb(N + K - 1, K - 1),
        },
    )


# ---------------------------------------------------------------------------
# extensive-form games


@dataclass(frozen=True)
class EfgNode:
    """One node of a game tree: decision, observation, or terminal."""

    kind: str
    name: str
    actions: tuple[str, ...] = ()
    children: tuple["EfgNode", ...] = ()


@dataclass(frozen=True)
class EfgGame:
    """A game tree rooted at a decision node.

    The learner fixes one action per decision node, the opponent one per
    observation node; play follows those choices from the root until a
    terminal node's loss is incurred.
    """

    root: EfgNode

    def __post_init__(self) -> None:
        seen: set[str] = set()

        def check(node: EfgNode) -> None:
            if node.name in seen:
                raise MalformedGame(f"node name {node.name!r} appears twice")
            seen.add(node.name)
            if node.kind not in ("decision", "observation", "terminal"):
                raise MalformedGame(f"unknown node kind {node.kind!r}")
            if node.kind == "terminal":
                if node.children or node.actions:
                    raise MalformedGame(f"terminal {node.name!r} must be a leaf")
                return
            if len(node.actions) != len(node.children):
                raise MalformedGame(f"{node.name!r}: one child per action required")
            if len(node.actions) < 2:
                raise MalformedGame(f"{node.name!r}: non-terminals need >= 2 actions")
            if len(set(node.actions)) != len(node.actions):
                raise MalformedGame(f"{node.name!r}: duplicate action names")
            for child in node.children:
                check(child)

        if self.root.kind != "decision":
            raise MalformedGame("the root must be a decision node")
        check(self.root)

    def nodes(self) -> list[EfgNode]:
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(reversed(node.children))
        return out

    def strategy_count(self) -> int:
        """Number of distinct reduced strategies (terminal for leaves,
        sum over actions at decisions, product at observations)."""

        def n(node: EfgNode) -> int:
            if node.kind == "terminal":
                return 1
            if node.kind == "decision":
                return sum(n(c) for c in node.children)
            prod = 1
            for c in node.children:
                prod *= n(c)
            return prod

        return n(self.root)


def efg_to_dag(game: EfgGame) -> Reduction:
    """Game strategies as paths: each node becomes an entry/exit vertex
    pair; a decision's gadget branches over its actions, an observation's
    gadget chains through all of its children (a strategy must be ready
    for every opponent move), and each terminal contributes one edge that
    carries its loss when the opponent's moves make it reachable.

    Actions are dicts {decision name: action name}; decode fills decision
    nodes outside the strategy's own closure with their first action.
    """
    names: list[str] = []
    name_id: dict[str, int] = {}
    for node in game.nodes():
        for suffix in (".s", ".t"):
            name_id[node.name + suffix] = len(names)
            names.append(node.name + suffix)
    edges: list[tuple[int, int]] = []
    edge_id: dict[tuple[int, int], int] = {}

    def add_edge(a: str, b: str) -> None:
        key = (name_id[a], name_id[b])
        if key not in edge_id:
            edge_id[key] = len(edges)
            edges.append(key)

    by_name: dict[str, EfgNode] = {n.name: n for n in game.nodes()}
    terminal_edge: dict[str, int] = {}
    for node in game.nodes():
        if node.kind == "terminal":
            add_edge(node.name + ".s", node.name + ".t")
            terminal_edge[node.name] = edge_id[
                (name_id[node.name + ".s"], name_id[node.name + ".t"])
            ]
        elif node.kind == "decision":
            for child in node.children:
                add_edge(node.name + ".s", child.name + ".s")
                add_edge(child.name + ".t", node.name + ".t")
        else:
            chain = node.children
            add_edge(node.name + ".s", chain[0].name + ".s")
            for a, b in zip(chain, chain[1:]):
                add_edge(a.name + ".t", b.name + ".s")
            add_edge(chain[-1].name + ".t", node.name + ".t")

    dag = Dag(
        tuple(names),
        tuple(edges),
        name_id[game.root.name + ".s"],
        name_id[game.root.name + ".t"],
    )

    def gadget_path(node: EfgNode, strategy: dict[str, str]) -> list[int]:
        if node.kind == "terminal":
            return [terminal_edge[node.name]]
        if node.kind == "decision":
            action = strategy.get(node.name, node.actions[0])
            if action not in node.actions:
                raise ConfigError(f"{node.name!r} has no action {action!r}")
            child = node.children[node.actions.index(action)]
            return (
                [edge_id[(name_id[node.name + ".s"], name_id[child.name + ".s"])]]
                + gadget_path(child, strategy)
                + [edge_id[(name_id[child.name + ".t"], name_id[node.name + ".t"])]]
            )
        out = [edge_id[(name_id[node.name + ".s"], name_id[node.children[0].name + ".s"])]]
        for a, b in zip(node.children, node.children[1:]):
            out.extend(gadget_path(a, strategy))
            out.append(edge_id[(name_id[a.name + ".t"], name_id[b.name + ".s"])])
        out.extend(gadget_path(node.children[-1], strategy))
        out.append(
            edge_id[(name_id[node.children[-1].name + ".t"], name_id[node.name + ".t"])]
        )
        return out

    def encode(strategy: dict[str, str]) -> Path:
        return tuple(gadget_path(game.root, strategy))

    def decode(path: Path) -> dict[str, str]:
        dag.check_path(path)
        chosen = set(path)
        strategy: dict[str, str] = {}
        for node in game.nodes():
            if node.kind != "decision":
                continue
            strategy[node.name] = node.actions[0]
            for action, child in zip(node.actions, node.children):
                e = edge_id.get((name_id[node.name + ".s"], name_id[child.name + ".s"]))
                if e in chosen:
                    strategy[node.name] = action
                    break
        return strategy

    def lift_loss(loss: tuple) -> np.ndarray:
        """loss = (terminal losses {name: value}, opponent moves
        {observation name: action name})."""
        terminal_losses, opponent = loss
        w = np.zeros(dag.n_edges)

        def mark(node: EfgNode) -> None:
            if node.kind == "terminal":
                w[terminal_edge[node.name]] = float(terminal_losses.get(node.name, 0.0))
            elif node.kind == "decision":
                for child in node.children:
                    mark(child)
            else:
                action = opponent.get(node.name)
                if action is None or action not in node.actions:
                    raise ConfigError(f"opponent must pick an action at {node.name!r}")
                mark(node.children[node.actions.index(action)])

        mark(game.root)
        return w

    def play(strategy: dict[str, str], opponent: dict[str, str]) -> str:
        """Terminal reached when both configurations are followed."""
        node = game.root
        while node.kind != "terminal":
            if node.kind == "decision":
                action = strategy.get(node.name, node.actions[0])
            else:
                action = opponent[node.name]
            node = node.children[node.actions.index(action)]
        return node.name

    return Reduction(
        kind="efg",
        dag=dag,
        encode=encode,
        decode=decode,
        lift_loss=lift_loss,
        equal_length=False,
        meta={
            "n_terminals": sum(1 for n in game.nodes() if n.kind == "terminal"),
            "n_actions": game.strategy_count(),
            "play": play,
            "game": game,
        },
    )


def enumerate_actions(reduction: Reduction) -> list:
    """All canonical domain actions of a reduction (small scales only)."""
    kind = reduction.kind
    meta = reduction.meta
    if kind == "hypercube":
        d = meta["d"]
        return [tuple((k >> i) & 1 for i in range(d)) for k in range(2**d)]
    if kind == "multitask":
        import itertools

        return [tuple(t) for t in itertools.product(*[range(x) for x in meta["dims"]])]
    if kind == "mset":
        import itertools

        d, m = meta["d"], meta["m"]
        out = []
        for ones in itertools.combinations(range(d), m):
            bits = [0] * d
            for k in ones:
                bits[k] = 1
            out.append(tuple(bits))
        return out
    if kind == "blotto":
        N, K = meta["n_soldiers"], meta["n_battlefields"]

        def parts(total: int, slots: int):
            if slots == 1:
                yield (total,)
                return
            for first in range(total + 1):
                for rest in parts(total - first, slots - 1):
                    yield (first,) + rest

        return list(parts(N, K))
    if kind == "efg":
        game: EfgGame = meta["game"]
        defaults = {
            n.name: n.actions[0] for n in game.nodes() if n.kind == "decision"
        }

        def configs(node: EfgNode) -> list[dict[str, str]]:
            if node.kind == "terminal":
                return [{}]
            if node.kind == "decision":
                out = []
                for action, child in zip(node.actions, node.children):
                    for sub in configs(child):
                        cfg = dict(sub)
                        cfg[node.name] = action
                        out.append(cfg)
                return out
            out = [{}]
            for child in node.children:
                out = [
                    {**left, **right} for left in out for right in configs(child)
                ]
            return out

        # canonical complete configurations: first-listed action anywhere
        # the strategy's own choices make unreachable
        return [{**defaults, **cfg} for cfg in configs(game.root)]
    if kind == "walk":
        raise ConfigError("walk actions are enumerated by the caller (graph-specific)")
    raise ConfigError(f"unknown reduction kind {kind!r}")
