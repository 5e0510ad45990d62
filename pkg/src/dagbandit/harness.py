"""Adversaries, baseline learners, and experiment orchestration.

Adversaries expose ``next_losses() -> edge-weight vector`` (committed
before the learner reveals its path) and ``observe(path)`` (called after,
so adaptive kinds can condition on the past trajectory only).  Every
adversary's construction proves its losses can never push a path weight
outside [-1, 1]; the episode loop additionally spot-checks emitted
vectors.

Baselines implement the same choose/feed protocol as the main learner,
so the experiment runner treats all of them interchangeably.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Sequence

import numpy as np

from .errors import ConfigError, OutOfRangeLoss, ProtocolViolation, RangeViolation, TooManyPaths
from .graph import (
    Dag,
    Path,
    count_paths_to_sink,
    enumerate_paths,
    longest_dist,
    path_weight_range,
    prune,
)
from .learner import LearnerConfig, PathLearner, RegretReport, run_episode
from .reductions import Reduction, multitask
from .sampling import make_rng

# ---------------------------------------------------------------------------
# adversaries


class StochasticIid:
    """Fixed edge means plus independent bounded noise each round."""

    def __init__(self, dag: Dag, means: Sequence[float], noise_scale: float, seed: int):
        means = np.asarray(means, dtype=float)
        if means.shape != (dag.n_edges,):
            raise ConfigError(f"means must have one entry per edge ({dag.n_edges})")
        if noise_scale < 0:
            raise ConfigError("noise scale must be nonnegative")
        core = prune(dag)
        assert core.parent_edges is not None
        lo, hi = path_weight_range(core, means[np.array(core.parent_edges)])
        worst = max(abs(lo), abs(hi)) + longest_dist(core)[core.sink] * noise_scale
        if worst > 1.0 + 1e-12:
            raise RangeViolation(
                f"worst-case |path loss| {worst:.4f} exceeds 1; rescale the means or noise"
            )
        self.dag = dag
        self.means = means
        self.noise = float(noise_scale)
        self.rng = make_rng(seed)

    def next_losses(self) -> np.ndarray:
        return self.means + self.noise * self.rng.uniform(-1.0, 1.0, self.dag.n_edges)

    def observe(self, path: Path) -> None:
        pass


def stochastic_iid(dag: Dag, means, noise_scale: float, seed: int) -> StochasticIid:
    return StochasticIid(dag, means, noise_scale, seed)


class AdaptiveTargeting:
    """Each round, load the learner's historically favorite path.

    Spreads ``magnitude`` evenly over that path's edges (zero before any
    history exists); ties go to the lexicographically smallest path."""

    def __init__(self, dag: Dag, magnitude: float):
        if not (0.0 <= magnitude <= 1.0):
            raise RangeViolation("magnitude must lie in [0, 1]")
        self.dag = dag
        self.magnitude = float(magnitude)
        self.counts: dict[Path, int] = {}

    def next_losses(self) -> np.ndarray:
        y = np.zeros(self.dag.n_edges)
        if self.counts:
            target = min(self.counts, key=lambda p: (-self.counts[p], p))
            y[list(target)] = self.magnitude / len(target)
        return y

    def observe(self, path: Path) -> None:
        self.counts[path] = self.counts.get(path, 0) + 1


def adaptive_targeting(dag: Dag, magnitude: float) -> AdaptiveTargeting:
    return AdaptiveTargeting(dag, magnitude)


class MultitaskLowerBound:
    """Hard stochastic family for simultaneous-arm play.

    A hidden best arm per task is drawn once; each round one task is
    activated uniformly at random and every arm of that task draws a
    {0, 1} loss with mean 1/2, lowered by eps_j for the hidden arm, where
    eps_j = m * sqrt(d_j) / (10 * sqrt(T)).  All other coordinates are
    zero, so any path weight stays in {0, 1}.
    """

    def __init__(self, dims: Sequence[int], horizon: int, seed: int,
                 reduction: Reduction | None = None):
        self.reduction = multitask(dims) if reduction is None else reduction
        dims = tuple(self.reduction.meta["dims"])
        m = len(dims)
        self.dims = dims
        self.epsilons = tuple(
            m * math.sqrt(dj) / (10.0 * math.sqrt(horizon)) for dj in dims
        )
        if max(self.epsilons) > 0.5:
            raise RangeViolation(
                f"eps {max(self.epsilons):.3f} > 1/2; horizon too short for dims {dims}"
            )
        self.rng = make_rng(seed)
        self.hidden = tuple(int(self.rng.integers(0, dj)) for dj in dims)
        self.d = sum(dims)
        self._offsets = [0]
        for x in dims:
            self._offsets.append(self._offsets[-1] + x)

    @property
    def dag(self) -> Dag:
        return self.reduction.dag

    def next_losses(self) -> np.ndarray:
        j = int(self.rng.integers(0, len(self.dims)))
        y = np.zeros(self.d)
        eps = self.epsilons[j]
        for arm in range(self.dims[j]):
            mean = 0.5 - eps * (arm == self.hidden[j])
            y[self._offsets[j] + arm] = float(self.rng.random() < mean)
        return self.reduction.lift_loss(y)

    def observe(self, path: Path) -> None:
        pass


def multitask_lower_bound_instance(
    dims: Sequence[int], horizon: int, seed: int, reduction: Reduction | None = None
) -> MultitaskLowerBound:
    return MultitaskLowerBound(dims, horizon, seed, reduction)


def minimax_lower_bound_instance(
    n_edges: int, n_paths: int, horizon: int, seed: int
) -> MultitaskLowerBound:
    """The hard-DAG family: a simultaneous-arm instance with
    m = log2(n_paths)/log2(n_edges) tasks of n_edges/(2m) arms each."""
    if n_edges < 4 or n_paths < 4:
        raise ConfigError("need n_edges >= 4 and n_paths >= 4")
    m = max(1, round(math.log2(n_paths) / math.log2(n_edges)))
    per = max(2, n_edges // (2 * m))
    return MultitaskLowerBound((per,) * m, horizon, seed)


class UniformRandomLearner:
    """choose/feed-compatible reference that ignores all feedback."""

    def __init__(self, dag: Dag, seed: int = 0, cap: int = 100_000):
        self.dag = prune(dag)
        assert self.dag.parent_edges is not None
        self._pe = self.dag.parent_edges
        total = count_paths_to_sink(self.dag)[self.dag.source]
        if total > cap:
            raise TooManyPaths(f"{total} paths exceed cap {cap}")
        self.paths = enumerate_paths(self.dag, cap)
        self.rng = make_rng(seed)
        self._pending = False

    def choose(self) -> Path:
        if self._pending:
            raise ProtocolViolation("choose called twice without feed")
        self._pending = True
        p = self.paths[int(self.rng.integers(0, len(self.paths)))]
        return tuple(self._pe[e] for e in p)

    def feed(self, loss: float) -> None:
        if not self._pending:
            raise ProtocolViolation("feed called without choose")
        if abs(loss) > 1.0:
            raise OutOfRangeLoss(f"loss {loss} outside [-1, 1]")
        self._pending = False


# ---------------------------------------------------------------------------
# baselines


class Exp3IxPerTask:
    """Independent exponential-weights instances, one per task.

    Each instance receives the shared scalar loss, importance-weighted by
    its own arm probability with an additive exploration term in the
    denominator.  Losses are shifted from [-1, 1] to [0, 1] internally.
    """

    def __init__(self, dims: Sequence[int], horizon: int, delta: float, seed: int = 0):
        self.reduction = multitask(dims)
        self.dims = tuple(self.reduction.meta["dims"])
        if not (0 < delta < 1):
            raise ConfigError(f"delta must lie in (0, 1), got {delta}")
        self.cum = [np.zeros(dj) for dj in self.dims]
        self.etas = [
            math.sqrt(2.0 * math.log(dj) / (dj * horizon)) for dj in self.dims
        ]
        self.gammas = [eta / 2.0 for eta in self.etas]
        self.rng = make_rng(seed)
        self._pending: tuple[int, ...] | None = None
        self._probs: list[float] | None = None

    def _distribution(self, i: int) -> np.ndarray:
        z = -self.etas[i] * self.cum[i]
        z -= z.max()
        w = np.exp(z)
        return w / w.sum()

    def choose(self) -> Path:
        if self._pending is not None:
            raise ProtocolViolation("choose called twice without feed")
        arms = []
        probs = []
        for i in range(len(self.dims)):
            p = self._distribution(i)
            a = int(self.rng.choice(self.dims[i], p=p))
            arms.append(a)
            probs.append(float(p[a]))
        self._pending = tuple(arms)
        self._probs = probs
        return self.reduction.encode(tuple(arms))

    def feed(self, loss: float) -> None:
        if self._pending is None:
            raise ProtocolViolation("feed called without choose")
        if abs(loss) > 1.0:
            raise OutOfRangeLoss(f"loss {loss} outside [-1, 1]")
        shifted = (1.0 + loss) / 2.0
        for i, (arm, prob) in enumerate(zip(self._pending, self._probs)):
            self.cum[i][arm] += shifted / (prob + self.gammas[i])
        self._pending = None
        self._probs = None


def exp3_ix_baseline(dims, horizon: int, delta: float, seed: int = 0) -> Exp3IxPerTask:
    return Exp3IxPerTask(dims, horizon, delta, seed)


class Exp3OverPaths:
    """Exponential weights over the explicitly enumerated path set.

    Importance-weighted scalar losses with explicit uniform mixing; a
    sanity baseline that only exists at small scales.
    """

    def __init__(self, dag: Dag, horizon: int, delta: float, cap: int = 5000, seed: int = 0):
        self.dag = prune(dag)
        assert self.dag.parent_edges is not None
        self._pe = self.dag.parent_edges
        self.paths = enumerate_paths(self.dag, cap)  # raises TooManyPaths
        n = len(self.paths)
        self.cum = np.zeros(n)
        self.eta = math.sqrt(2.0 * math.log(max(n, 2)) / (n * horizon))
        self.mix = min(0.5, math.sqrt(n * math.log(max(n, 2) / delta) / horizon))
        self.rng = make_rng(seed)
        self._pending: int | None = None
        self._prob: float | None = None

    def _distribution(self) -> np.ndarray:
        z = -self.eta * self.cum
        z -= z.max()
        w = np.exp(z)
        p = w / w.sum()
        return (1.0 - self.mix) * p + self.mix / len(self.paths)

    def choose(self) -> Path:
        if self._pending is not None:
            raise ProtocolViolation("choose called twice without feed")
        p = self._distribution()
        k = int(self.rng.choice(len(self.paths), p=p))
        self._pending = k
        self._prob = float(p[k])
        return tuple(self._pe[e] for e in self.paths[k])

    def feed(self, loss: float) -> None:
        if self._pending is None:
            raise ProtocolViolation("feed called without choose")
        if abs(loss) > 1.0:
            raise OutOfRangeLoss(f"loss {loss} outside [-1, 1]")
        self.cum[self._pending] += (1.0 + loss) / 2.0 / self._prob
        self._pending = None
        self._prob = None


def exact_exp3_paths_baseline(
    dag: Dag, horizon: int, delta: float, cap: int = 5000, seed: int = 0
) -> Exp3OverPaths:
    return Exp3OverPaths(dag, horizon, delta, cap, seed)


# ---------------------------------------------------------------------------
# experiment orchestration

CHECKPOINT_COUNT = 200


@dataclass
class RunSpec:
    algorithm: dict
    adversary: dict
    seed: int


def _require(cfg: dict, fieldname: str, where: str = "config"):
    if fieldname not in cfg:
        raise ConfigError(f"{where}: missing field {fieldname!r}")
    return cfg[fieldname]


def build_dag_from_config(cfg: dict) -> tuple[Dag, Reduction | None]:
    from . import io as dio

    spec = _require(cfg, "dag")
    if "file" in spec:
        return dio.load_dag(spec["file"]), None
    if "domain" in spec:
        dom = spec["domain"]
        kind = _require(dom, "kind", "dag.domain")
        red = build_reduction(kind, dom)
        return red.dag, red
    if "inline" in spec:
        inline = spec["inline"]
        return (
            Dag(
                tuple(str(n) for n in _require(inline, "vertices", "dag.inline")),
                tuple((int(u), int(v)) for u, v in _require(inline, "edges", "dag.inline")),
                int(_require(inline, "source", "dag.inline")),
                int(_require(inline, "sink", "dag.inline")),
            ),
            None,
        )
    raise ConfigError("dag: expected one of 'file', 'domain', 'inline'")


def build_reduction(kind: str, params: dict) -> Reduction:
    from . import reductions as red
    from . import io as dio

    if kind == "hypercube":
        return red.hypercube(int(_require(params, "d", "domain")))
    if kind == "multitask":
        return red.multitask(_require(params, "dims", "domain"))
    if kind == "mset":
        return red.msets(int(_require(params, "d", "domain")), int(_require(params, "m", "domain")))
    if kind == "walk":
        return red.shortest_walk(
            int(_require(params, "n_vertices", "domain")),
            [tuple(a) for a in _require(params, "arcs", "domain")],
            int(_require(params, "source", "domain")),
            int(_require(params, "sink", "domain")),
            int(_require(params, "max_steps", "domain")),
        )
    if kind == "blotto":
        return red.blotto(
            int(_require(params, "n_soldiers", "domain")),
            int(_require(params, "n_battlefields", "domain")),
        )
    if kind == "efg":
        return red.efg_to_dag(dio.load_efg_json(_require(params, "game_file", "domain")))
    raise ConfigError(f"domain.kind: unknown domain {kind!r}")


def build_algorithm(spec: dict, dag: Dag, reduction: Reduction | None,
                    horizon: int, delta: float, seed: int):
    name = _require(spec, "name", "algorithms[]")
    if name in ("ftrl", "ftrl-compressed", "ftrl-augmented", "ftrl-equal-length"):
        mode = {
            "ftrl": spec.get("mode", "compressed"),
            "ftrl-compressed": "compressed",
            "ftrl-augmented": "augmented",
            "ftrl-equal-length": "equal-length",
        }[name]
        gamma = spec.get("gamma")
        if spec.get("multitask_gamma") and reduction is not None and reduction.gamma_override:
            gamma = reduction.gamma_override(horizon, delta)
        cfg = LearnerConfig(
            mode=mode,
            horizon=horizon,
            delta=delta,
            eta=spec.get("eta"),
            gamma=gamma,
            tol=spec.get("tol"),
            seed=seed,
            warm_start=spec.get("warm_start", True),
        )
        return PathLearner(dag, cfg), cfg
    cfg = LearnerConfig(mode="compressed", horizon=horizon, delta=delta, seed=seed)
    if name == "exp3ix":
        if reduction is None or reduction.kind != "multitask":
            raise ConfigError("algorithms[]: exp3ix requires a multitask domain")
        return Exp3IxPerTask(reduction.meta["dims"], horizon, delta, seed), cfg
    if name == "exp3-paths":
        return Exp3OverPaths(dag, horizon, delta, spec.get("cap", 5000), seed), cfg
    if name == "uniform":
        return UniformRandomLearner(dag, seed), cfg
    raise ConfigError(f"algorithms[]: unknown algorithm {name!r}")


def build_adversary(spec: dict, dag: Dag, reduction: Reduction | None,
                    horizon: int, seed: int):
    name = _require(spec, "name", "adversaries[]")
    if name == "stochastic":
        means = np.zeros(dag.n_edges)
        for k, v in spec.get("edge_means", {}).items():
            means[int(k)] = float(v)
        return StochasticIid(dag, means, float(spec.get("noise", 0.0)), seed)
    if name == "adaptive":
        return AdaptiveTargeting(dag, float(spec.get("magnitude", 1.0)))
    if name == "multitask-lower-bound":
        if reduction is None or reduction.kind != "multitask":
            raise ConfigError("adversaries[]: multitask-lower-bound needs a multitask domain")
        return MultitaskLowerBound(reduction.meta["dims"], horizon, seed, reduction)
    raise ConfigError(f"adversaries[]: unknown adversary {name!r}")


def checkpoints_for(horizon: int) -> list[int]:
    if horizon <= CHECKPOINT_COUNT:
        return list(range(1, horizon + 1))
    step = horizon / CHECKPOINT_COUNT
    marks = sorted({int(round(step * k)) for k in range(1, CHECKPOINT_COUNT + 1)})
    return [m for m in marks if 1 <= m <= horizon]


def run_experiment(config: dict | str | FsPath, out_dir: str | FsPath | None = None) -> dict:
    """Run the (algorithms x adversaries x seeds) grid of an experiment.

    Persists one directory per run (config echo, trajectory CSV, summary
    JSON), then an aggregate summary with median/quantile regret curves
    and, unless disabled, a rendered figure per adversary.  Returns the
    aggregate summary.  Parallelism is capped by DAGBANDIT_THREADS.
    """
    if not isinstance(config, dict):
        with open(config) as fh:
            config = json.load(fh)

    horizon = int(_require(config, "horizon"))
    delta = float(config.get("delta", 0.05))
    seeds = [int(s) for s in _require(config, "seeds")]
    algorithms = _require(config, "algorithms")
    adversaries = _require(config, "adversaries")
    out = FsPath(out_dir if out_dir is not None else _require(config, "output_dir"))
    out.mkdir(parents=True, exist_ok=True)

    dag, reduction = build_dag_from_config(config)
    checkpoints = checkpoints_for(horizon)

    specs = [
        RunSpec(algorithm=alg, adversary=adv, seed=seed)
        for alg in algorithms
        for adv in adversaries
        for seed in seeds
    ]

    def one_run(spec: RunSpec) -> dict:
        from . import io as dio

        alg_name = spec.algorithm["name"]
        adv_name = spec.adversary["name"]
        learner, cfg = build_algorithm(
            spec.algorithm, dag, reduction, horizon, delta, spec.seed
        )
        adversary = build_adversary(
            spec.adversary, dag, reduction, horizon, spec.seed + 10_000
        )
        report = run_episode(dag, cfg, adversary, learner=learner, checkpoints=checkpoints)
        run_dir = out / f"{alg_name}__{adv_name}__seed{spec.seed}"
        dio.persist_run(run_dir, report, {
            "algorithm": spec.algorithm,
            "adversary": spec.adversary,
            "seed": spec.seed,
            "horizon": horizon,
            "delta": delta,
            "learner": report.config,
        })
        return {
            "algorithm": alg_name,
            "adversary": adv_name,
            "seed": spec.seed,
            "regret": report.regret,
            "cum_regret": {str(k): v for k, v in sorted(report.cum_regret.items())},
            "wall_clock": report.wall_clock,
            "dir": run_dir.name,
        }

    threads = int(os.environ.get("DAGBANDIT_THREADS", "1"))
    t0 = time.perf_counter()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one_run, specs))
    else:
        results = [one_run(s) for s in specs]

    summary_rows = []
    for alg in algorithms:
        for adv in adversaries:
            rs = [
                r for r in results
                if r["algorithm"] == alg["name"] and r["adversary"] == adv["name"]
            ]
            finals = np.array([r["regret"] for r in rs])
            curve = {}
            for c in checkpoints:
                vals = np.array([r["cum_regret"][str(c)] for r in rs])
                curve[str(c)] = {
                    "median": float(np.median(vals)),
                    "q25": float(np.quantile(vals, 0.25)),
                    "q75": float(np.quantile(vals, 0.75)),
                }
            summary_rows.append({
                "algorithm": alg["name"],
                "adversary": adv["name"],
                "n_seeds": len(rs),
                "median_regret": float(np.median(finals)),
                "q25_regret": float(np.quantile(finals, 0.25)),
                "q75_regret": float(np.quantile(finals, 0.75)),
                "curve": curve,
            })

    aggregate = {
        "horizon": horizon,
        "delta": delta,
        "seeds": seeds,
        "checkpoints": checkpoints,
        "rows": summary_rows,
        "runs": results,
        "wall_clock": time.perf_counter() - t0,
    }
    with open(out / "summary.json", "w") as fh:
        json.dump(aggregate, fh, indent=2, sort_keys=True)
    _write_summary_csv(out / "summary.csv", summary_rows)
    if config.get("plots", True):
        from .report import render_regret_curves

        render_regret_curves(aggregate, out / "regret_curves.png")
    return aggregate


def _write_summary_csv(path: FsPath, rows: list[dict]) -> None:
    with open(path, "w") as fh:
        fh.write("algorithm,adversary,n_seeds,median_regret,q25_regret,q75_regret\n")
        for r in rows:
            fh.write(
                f"{r['algorithm']},{r['adversary']},{r['n_seeds']},"
                f"{r['median_regret']!r},{r['q25_regret']!r},{r['q75_regret']!r}\n"
            )
