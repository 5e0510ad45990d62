"""File formats: DAG text/JSON, loss CSV, game trees, and run artifacts.

DAG text format, one graph per file::

    n m src dst
    tail head        (m lines, vertex indices)

The JSON alternative carries explicit vertex names.  Loss vectors are
two-column CSV ``edge_index,weight``.  Run directories hold ``config.json``
(fully resolved echo), ``trajectory.csv`` (round,path_id,loss,cum_regret),
``paths.json`` (path id -> edge list), and ``summary.json`` (totals plus
the cumulative edge-loss vector, which makes the regret recomputable from
the artifacts alone).

Float cells are written with ``repr``: shortest round-trip form, so the
same run produces byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path as FsPath

import numpy as np

from .errors import ConfigError
from .graph import Dag
from .learner import RegretReport
from .reductions import EfgGame, EfgNode


def save_dag_text(dag: Dag, path) -> None:
    lines = [f"{dag.n_vertices} {dag.n_edges} {dag.source} {dag.sink}"]
    lines.extend(f"{u} {v}" for u, v in dag.edges)
    FsPath(path).write_text("\n".join(lines) + "\n")


def load_dag_text(path) -> Dag:
    tokens = FsPath(path).read_text().split()
    if len(tokens) < 4:
        raise ConfigError(f"{path}: expected header 'n m src dst'")
    n, m, src, dst = (int(t) for t in tokens[:4])
    if len(tokens) != 4 + 2 * m:
        raise ConfigError(f"{path}: expected {m} edge lines")
    body = tokens[4:]
    edges = tuple(
        (int(body[2 * k]), int(body[2 * k + 1])) for k in range(m)
    )
    return Dag(tuple(str(i) for i in range(n)), edges, src, dst)


def save_dag_json(dag: Dag, path) -> None:
    payload = {
        "vertices": list(dag.names),
        "edges": [[u, v] for u, v in dag.edges],
        "source": dag.source,
        "sink": dag.sink,
    }
    FsPath(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_dag_json(path) -> Dag:
    payload = json.loads(FsPath(path).read_text())
    for key in ("vertices", "edges", "source", "sink"):
        if key not in payload:
            raise ConfigError(f"{path}: missing field {key!r}")
    names = tuple(str(v) for v in payload["vertices"])
    index = {nm: i for i, nm in enumerate(names)}

    def vid(ref) -> int:
        if isinstance(ref, int):
            return ref
        if str(ref) in index:
            return index[str(ref)]
        raise ConfigError(f"{path}: unknown vertex {ref!r}")

    edges = tuple((vid(u), vid(v)) for u, v in payload["edges"])
    return Dag(names, edges, vid(payload["source"]), vid(payload["sink"]))


def load_dag(path) -> Dag:
    p = FsPath(path)
    if p.suffix.lower() == ".json":
        return load_dag_json(p)
    return load_dag_text(p)


def save_loss_csv(weights, path) -> None:
    with open(path, "w") as fh:
        fh.write("edge_index,weight\n")
        for e, w in enumerate(weights):
            fh.write(f"{e},{float(w)!r}\n")


def load_loss_csv(path, n_edges: int) -> np.ndarray:
    out = np.zeros(n_edges)
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "edge_index,weight":
            raise ConfigError(f"{path}: expected header 'edge_index,weight'")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            e_str, w_str = line.split(",")
            e = int(e_str)
            if not (0 <= e < n_edges):
                raise ConfigError(f"{path}: edge index {e} out of range")
            out[e] = float(w_str)
    return out


def save_sigma_json(cdag, path) -> None:
    """Sidecar for a compressed graph: edge id -> abbreviated edge list."""
    payload = {
        "sigma": {str(j): list(lst) for j, lst in enumerate(cdag.sigma_lists)},
        "kinds": list(cdag.kinds),
        "edge_names": [
            f"{cdag.gdag.names[u]}->{cdag.gdag.names[v]}" for u, v in cdag.gdag.edges
        ],
        "base_edge_names": [
            f"{cdag.base.names[u]}->{cdag.base.names[v]}" for u, v in cdag.base.edges
        ],
    }
    FsPath(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_efg_json(path) -> EfgGame:
    payload = json.loads(FsPath(path).read_text())

    def build(node: dict) -> EfgNode:
        kind = node.get("kind")
        name = node.get("name")
        if kind is None or name is None:
            raise ConfigError(f"{path}: every node needs 'kind' and 'name'")
        if kind == "terminal":
            return EfgNode("terminal", str(name))
        actions = node.get("actions")
        if not isinstance(actions, list):
            raise ConfigError(f"{path}: node {name!r} needs an 'actions' list")
        labels = tuple(str(a.get("name", i)) for i, a in enumerate(actions))
        children = tuple(build(a["child"]) for a in actions)
        return EfgNode(str(kind), str(name), labels, children)

    return EfgGame(build(payload))


def save_efg_json(game: EfgGame, path) -> None:
    def dump(node: EfgNode) -> dict:
        if node.kind == "terminal":
            return {"kind": "terminal", "name": node.name}
        return {
            "kind": node.kind,
            "name": node.name,
            "actions": [
                {"name": a, "child": dump(c)}
                for a, c in zip(node.actions, node.children)
            ],
        }

    FsPath(path).write_text(json.dumps(dump(game.root), indent=2) + "\n")


def persist_run(run_dir, report: RegretReport, config_echo: dict) -> None:
    """One directory per run: config echo, trajectory, paths, summary."""
    run_dir = FsPath(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    with open(run_dir / "config.json", "w") as fh:
        json.dump(config_echo, fh, indent=2, sort_keys=True, default=str)

    path_ids: dict[tuple, int] = {}
    with open(run_dir / "trajectory.csv", "w") as fh:
        fh.write("round,path_id,loss,cum_regret\n")
        for t, (p, loss) in enumerate(zip(report.paths, report.losses), start=1):
            pid = path_ids.setdefault(p, len(path_ids))
            cr = report.cum_regret.get(t)
            fh.write(f"{t},{pid},{loss!r},{'' if cr is None else repr(cr)}\n")
    with open(run_dir / "paths.json", "w") as fh:
        json.dump(
            {str(pid): list(p) for p, pid in path_ids.items()},
            fh, indent=2, sort_keys=True,
        )
    summary = {
        "cum_loss": report.cum_loss,
        "hindsight_loss": report.hindsight_loss,
        "hindsight_path": list(report.hindsight_path),
        "regret": report.regret,
        "cumulative_edge_loss": [float(x) for x in report.cumulative_edge_loss],
        "wall_clock": report.wall_clock,
        "config": report.config,
    }
    with open(run_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)


def recompute_regret(run_dir, dag: Dag) -> float:
    """Regret recomputed from persisted artifacts only."""
    from .graph import best_path_in_hindsight, prune

    run_dir = FsPath(run_dir)
    with open(run_dir / "summary.json") as fh:
        summary = json.load(fh)
    cum_y = np.array(summary["cumulative_edge_loss"])
    realized = 0.0
    with open(run_dir / "trajectory.csv") as fh:
        fh.readline()
        for line in fh:
            realized += float(line.split(",")[2])
    comparator = prune(dag)
    assert comparator.parent_edges is not None
    _, best = best_path_in_hindsight(comparator, cum_y[np.array(comparator.parent_edges)])
    return realized - best
