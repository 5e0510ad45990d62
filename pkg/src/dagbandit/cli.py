"""Command-line interface.

Subcommands: ``validate`` (check a DAG file and optional loss vector),
``convert`` (write the compressed graph plus its edge-abbreviation
sidecar), ``reduce`` (emit the DAG and codec metadata of a combinatorial
domain), ``run`` (one learner vs one adversary), ``sweep`` (full
experiment grid from a JSON config).

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 solver
failure.  Every run echoes its fully resolved configuration, numeric
defaults included, so artifacts are self-describing.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path as FsPath

import numpy as np

from . import io as dio
from .compress import compress
from .errors import (
    ConfigError,
    DagBanditError,
    Infeasible,
    SolverStall,
)
from .graph import (
    count_paths,
    longest_dist,
    path_weight_range,
    prune,
)
from .harness import (
    build_adversary,
    build_algorithm,
    build_dag_from_config,
    build_reduction,
    checkpoints_for,
    run_experiment,
)
from .learner import run_episode

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_SOLVER = 3


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _delta(text: str) -> float:
    value = float(text)
    if not (0.0 < value < 1.0):
        raise argparse.ArgumentTypeError(f"delta must lie in (0, 1), got {value}")
    return value


def build_parser() -> _Parser:
    parser = _Parser(prog="dagbandit", description=__doc__.split("\n")[1])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[], help="check a DAG file (and loss vector)")
    p.add_argument("--dag", required=True, help="DAG file (.json or text)")
    p.add_argument("--loss", default=None, help="loss CSV to range-check (edge_index,weight)")
    p.add_argument("--format", choices=("csv", "json"), default="json",
                   help="stdout format (default: json)")

    p = sub.add_parser("convert", help="compress a DAG and write the sidecar")
    p.add_argument("--dag", required=True, help="input DAG file")
    p.add_argument("--out", required=True, help="output DAG file for the compressed graph")
    p.add_argument("--sigma", default=None,
                   help="sidecar JSON path (default: <out>.sigma.json)")

    p = sub.add_parser("reduce", help="emit the DAG of a combinatorial domain")
    p.add_argument("--domain", required=True,
                   choices=("hypercube", "multitask", "mset", "walk", "blotto", "efg"))
    p.add_argument("--out", required=True, help="output prefix (writes <out>.dag and <out>.meta.json)")
    p.add_argument("--d", type=int, default=None, help="dimension (hypercube, mset)")
    p.add_argument("--m", type=int, default=None, help="set size (mset)")
    p.add_argument("--dims", default=None, help="comma-separated arms per task (multitask)")
    p.add_argument("--soldiers", type=int, default=None, help="soldier count (blotto)")
    p.add_argument("--battlefields", type=int, default=None, help="battlefield count (blotto)")
    p.add_argument("--graph", default=None, help="directed-graph DAG/JSON file (walk)")
    p.add_argument("--max-steps", type=int, default=None, help="walk length bound (walk)")
    p.add_argument("--game", default=None, help="game-tree JSON file (efg)")

    p = sub.add_parser("run", help="one learner vs one adversary")
    p.add_argument("--dag", default=None, help="DAG file; alternative to --domain")
    p.add_argument("--domain", default=None,
                   choices=("hypercube", "multitask", "mset", "walk", "blotto", "efg"))
    p.add_argument("--domain-params", default=None,
                   help="JSON object with the domain's parameters")
    p.add_argument("--algorithm", default="ftrl-compressed",
                   help="ftrl-compressed | ftrl-augmented | ftrl-equal-length | "
                        "exp3ix | exp3-paths | uniform (default: ftrl-compressed)")
    p.add_argument("--adversary", default="stochastic",
                   help="stochastic | adaptive | multitask-lower-bound (default: stochastic)")
    p.add_argument("--adversary-params", default=None,
                   help="JSON object with adversary parameters")
    p.add_argument("--horizon", type=int, default=1000, help="rounds T (default: 1000)")
    p.add_argument("--delta", type=_delta, default=0.05,
                   help="confidence level in (0, 1) (default: 0.05)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    p.add_argument("--eta", type=float, default=None,
                   help="learning rate override (default: 1/sqrt(T))")
    p.add_argument("--gamma", type=float, default=None,
                   help="exploration override (default: sqrt(K*log2(5(|V|+|E|+K)/delta)/(|E|T)))")
    p.add_argument("--tol", type=float, default=None,
                   help="solver tolerance override (default: min(1/T^2, 1e-7))")
    p.add_argument("--multitask-gamma", action="store_true",
                   help="use the per-coordinate multitask exploration override")
    p.add_argument("--out", default=None, help="run directory (default: no artifacts)")
    p.add_argument("--plot", action="store_true", help="also render the regret curve")
    p.add_argument("--format", choices=("csv", "json"), default="json",
                   help="stdout format (default: json)")

    p = sub.add_parser("sweep", help="run the experiment grid from a JSON config")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--out", default=None, help="output directory (default: config's output_dir)")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    try:
        handler = {
            "validate": _cmd_validate,
            "convert": _cmd_convert,
            "reduce": _cmd_reduce,
            "run": _cmd_run,
            "sweep": _cmd_sweep,
        }[args.command]
        return handler(args)
    except (SolverStall, Infeasible) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except DagBanditError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        keys = sorted(payload)
        print(",".join(keys))
        print(",".join(str(payload[k]) for k in keys))


def _cmd_validate(args) -> int:
    dag = dio.load_dag(args.dag)
    core = prune(dag)
    info = {
        "vertices": dag.n_vertices,
        "edges": dag.n_edges,
        "pruned_vertices": core.n_vertices,
        "pruned_edges": core.n_edges,
        "paths": str(count_paths(core)[core.sink]),
        "longest_path": longest_dist(core)[core.sink],
    }
    if args.loss is not None:
        y = dio.load_loss_csv(args.loss, dag.n_edges)
        assert core.parent_edges is not None
        lo, hi = path_weight_range(core, y[np.array(core.parent_edges)])
        info["loss_path_min"] = lo
        info["loss_path_max"] = hi
        if lo < -1.0 - 1e-12 or hi > 1.0 + 1e-12:
            _emit(info, args.format)
            print("validation failure: some path weight falls outside [-1, 1]",
                  file=sys.stderr)
            return EXIT_VALIDATION
    _emit(info, args.format)
    return EXIT_OK


def _cmd_convert(args) -> int:
    dag = prune(dio.load_dag(args.dag))
    cdag = compress(dag)
    out = FsPath(args.out)
    if out.suffix.lower() == ".json":
        dio.save_dag_json(cdag.gdag, out)
    else:
        dio.save_dag_text(cdag.gdag, out)
    sigma_path = args.sigma or f"{args.out}.sigma.json"
    dio.save_sigma_json(cdag, sigma_path)
    _emit(
        {
            "out": str(out),
            "sigma": str(sigma_path),
            "vertices": cdag.gdag.n_vertices,
            "edges": cdag.gdag.n_edges,
            "longest_path": longest_dist(prune(cdag.gdag))[prune(cdag.gdag).sink],
        },
        "json",
    )
    return EXIT_OK


def _reduce_params(args) -> dict:
    if args.domain == "hypercube":
        if args.d is None:
            raise ConfigError("--d is required for hypercube")
        return {"d": args.d}
    if args.domain == "mset":
        if args.d is None or args.m is None:
            raise ConfigError("--d and --m are required for mset")
        return {"d": args.d, "m": args.m}
    if args.domain == "multitask":
        if args.dims is None:
            raise ConfigError("--dims is required for multitask")
        return {"dims": [int(x) for x in args.dims.split(",")]}
    if args.domain == "blotto":
        if args.soldiers is None or args.battlefields is None:
            raise ConfigError("--soldiers and --battlefields are required for blotto")
        return {"n_soldiers": args.soldiers, "n_battlefields": args.battlefields}
    if args.domain == "walk":
        if args.graph is None or args.max_steps is None:
            raise ConfigError("--graph and --max-steps are required for walk")
        g = dio.load_dag_json(args.graph) if args.graph.endswith(".json") else None
        if g is not None:
            arcs = list(g.edges)
            return {
                "n_vertices": g.n_vertices, "arcs": arcs,
                "source": g.source, "sink": g.sink, "max_steps": args.max_steps,
            }
        payload = json.loads(FsPath(args.graph).read_text())
        return {
            "n_vertices": int(payload["n_vertices"]),
            "arcs": [tuple(a) for a in payload["arcs"]],
            "source": int(payload["source"]),
            "sink": int(payload["sink"]),
            "max_steps": args.max_steps,
        }
    if args.domain == "efg":
        if args.game is None:
            raise ConfigError("--game is required for efg")
        return {"game_file": args.game}
    raise ConfigError(f"unknown domain {args.domain!r}")


def _cmd_reduce(args) -> int:
    params = _reduce_params(args)
    reduction = build_reduction(args.domain, params)
    dag_path = f"{args.out}.dag"
    dio.save_dag_text(reduction.dag, dag_path)
    meta = {
        "kind": reduction.kind,
        "params": {k: v for k, v in params.items() if k != "arcs"},
        "equal_length": reduction.equal_length,
        "vertices": list(reduction.dag.names),
        "edges": [[u, v] for u, v in reduction.dag.edges],
        "source": reduction.dag.source,
        "sink": reduction.dag.sink,
        "n_actions": reduction.meta.get("n_actions"),
    }
    meta_path = f"{args.out}.meta.json"
    FsPath(meta_path).write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")
    _emit({"dag": dag_path, "meta": meta_path,
           "vertices": reduction.dag.n_vertices, "edges": reduction.dag.n_edges}, "json")
    return EXIT_OK


def _cmd_run(args) -> int:
    if (args.dag is None) == (args.domain is None):
        raise ConfigError("exactly one of --dag or --domain is required")
    if args.dag is not None:
        dag_spec = {"file": args.dag}
    else:
        params = json.loads(args.domain_params or "{}")
        dag_spec = {"domain": {"kind": args.domain, **params}}
    dag, reduction = build_dag_from_config({"dag": dag_spec})

    alg_spec = {"name": args.algorithm, "eta": args.eta, "gamma": args.gamma,
                "tol": args.tol, "multitask_gamma": args.multitask_gamma}
    adv_spec = {"name": args.adversary, **json.loads(args.adversary_params or "{}")}

    learner, cfg = build_algorithm(alg_spec, dag, reduction, args.horizon,
                                   args.delta, args.seed)
    adversary = build_adversary(adv_spec, dag, reduction, args.horizon,
                                args.seed + 10_000)
    checkpoints = checkpoints_for(args.horizon)
    report = run_episode(dag, cfg, adversary, learner=learner, checkpoints=checkpoints)

    echo = {
        "command": "run",
        "algorithm": args.algorithm,
        "adversary": adv_spec,
        "horizon": args.horizon,
        "delta": args.delta,
        "seed": args.seed,
        "resolved": report.config,
        "regret": report.regret,
        "cum_loss": report.cum_loss,
        "hindsight_loss": report.hindsight_loss,
    }
    _emit(echo, args.format)
    if args.out is not None:
        dio.persist_run(args.out, report, echo)
        if args.plot:
            from .report import render_run

            rounds = sorted(report.cum_regret)
            render_run(rounds, [report.cum_regret[t] for t in rounds],
                       FsPath(args.out) / "regret.png")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    with open(args.config) as fh:
        config = json.load(fh)
    aggregate = run_experiment(config, out_dir=args.out)
    print(json.dumps(
        {
            "runs": len(aggregate["runs"]),
            "rows": [
                {k: r[k] for k in ("algorithm", "adversary", "median_regret")}
                for r in aggregate["rows"]
            ],
            "wall_clock": aggregate["wall_clock"],
        },
        indent=2, sort_keys=True,
    ))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
