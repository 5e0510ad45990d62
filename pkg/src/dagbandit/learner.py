"""The bandit learner: per-round solve, sample, estimate, accumulate.

Three modes share one state machine:

* ``equal-length``  — runs directly on the flow polytope; only valid when
  every source-sink path has the same number of edges (checked up front).
* ``augmented``     — appends level bits so paths of different lengths
  become comparable; runs on the input graph.
* ``compressed``    — compresses the graph first (so the longest path is
  logarithmic in the number of paths), runs the augmented learner there,
  and maps every sampled path back to the input graph.

``choose`` and ``feed`` must strictly alternate; the learner owns its
random stream and is fully deterministic given (graph, config).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .augment import BitIndexMap, augment_path, interval_set
from .compress import CompressedDag, compress, project_path
from .errors import (
    ConfigError,
    OutOfRangeLoss,
    ProtocolViolation,
    UnequalLengths,
)
from .estimators import RoundObservation, biased_estimate
from .ftrl import FtrlDomain, LearnerSchedule, default_schedule, solve
from .graph import (
    Dag,
    Path,
    best_path_in_hindsight,
    longest_dist,
    prune,
    shortest_dist,
)
from .sampling import make_rng, sample_path

MODES = ("equal-length", "augmented", "compressed")


@dataclass(frozen=True)
class LearnerConfig:
    """Mode, horizon, confidence, and optional schedule overrides.

    ``gamma`` may be a scalar or a per-coordinate vector over V ∪ E of the
    *input* graph (vector overrides only make sense in the modes that run
    on the input graph directly).  ``tol`` defaults to min(1/T^2, 1e-7).
    """

    mode: str = "compressed"
    horizon: int = 1000
    delta: float = 0.05
    eta: float | None = None
    gamma: float | Sequence[float] | None = None
    gamma_bits: float | None = None
    tol: float | None = None
    seed: int = 0
    warm_start: bool = True

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not isinstance(self.horizon, (int, np.integer)) or self.horizon < 1:
            raise ConfigError(f"horizon T must be an integer >= 1, got {self.horizon!r}")
        if not (0.0 < self.delta < 1.0):
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta!r}")

    def resolved_tol(self) -> float:
        if self.tol is not None:
            return float(self.tol)
        return min(1.0 / self.horizon**2, 1e-7)


@dataclass
class RoundLog:
    round: int
    path: Path
    loss: float
    solver_iterations: int
    min_marginal: float


class PathLearner:
    """FTRL path learner over a DAG under bandit feedback."""

    def __init__(self, dag: Dag, config: LearnerConfig):
        self.config = config
        self.input_dag = dag
        self.pruned = prune(dag)

        self.cdag: CompressedDag | None = None
        if config.mode == "equal-length":
            lo, hi = shortest_dist(self.pruned), longest_dist(self.pruned)
            if any(a != b for a, b in zip(lo, hi)):
                raise UnequalLengths(
                    "equal-length mode requires every path to a vertex to have "
                    "one common length"
                )
            self.work = self.pruned
            self.bitmap: BitIndexMap | None = None
        elif config.mode == "augmented":
            self.work = self.pruned
            self.bitmap = interval_set(self.pruned)
        else:
            self.cdag = compress(self.pruned)
            self.work = prune(self.cdag.gdag)
            self.bitmap = interval_set(self.work)

        self.domain = FtrlDomain(self.work, self.bitmap)
        self.schedule = self._build_schedule()
        self.cumulative = np.zeros(self.domain.n)
        self.round = 0
        self.rng = make_rng(config.seed)
        self.last_solution: np.ndarray | None = None
        self._pending: tuple[np.ndarray, np.ndarray, Path] | None = None
        self.logs: list[RoundLog] = []
        self._last_info: dict = {}

    # -- construction helpers -------------------------------------------

    def _build_schedule(self) -> LearnerSchedule:
        cfg = self.config
        base = default_schedule(self.domain, cfg.horizon, cfg.delta)
        eta = base.eta if cfg.eta is None else float(cfg.eta)
        gamma = base.gamma
        if cfg.gamma is not None:
            if np.isscalar(cfg.gamma):
                gamma = np.full(self.work.n_coords, float(cfg.gamma))
            else:
                gamma = self._map_gamma_vector(np.asarray(cfg.gamma, dtype=float))
        gamma_bits = base.gamma_bits
        if cfg.gamma_bits is not None:
            gamma_bits = np.full(gamma_bits.shape, float(cfg.gamma_bits))
        return LearnerSchedule(
            eta=eta,
            gamma=gamma,
            gamma_bits=gamma_bits,
            horizon=cfg.horizon,
            delta=cfg.delta,
        )

    def _map_gamma_vector(self, vec: np.ndarray) -> np.ndarray:
        """Translate a V ∪ E override on the input graph to the working graph."""
        if self.config.mode == "compressed":
            raise ConfigError(
                "per-coordinate gamma overrides are not defined for compressed mode"
            )
        if vec.shape != (self.input_dag.n_coords,):
            raise ConfigError(
                f"gamma vector must have {self.input_dag.n_coords} coordinates"
            )
        pv = self.pruned.parent_vertices
        pe = self.pruned.parent_edges
        assert pv is not None and pe is not None
        out = np.empty(self.work.n_coords)
        for v in range(self.pruned.n_vertices):
            out[v] = vec[pv[v]]
        for j in range(self.pruned.n_edges):
            out[self.pruned.n_vertices + j] = vec[self.input_dag.n_vertices + pe[j]]
        return out

    # -- protocol --------------------------------------------------------

    def choose(self) -> Path:
        """Solve, sample in the working graph, and return a path of the
        input graph."""
        if self._pending is not None:
            raise ProtocolViolation("choose called twice without feed")
        if self.round >= self.config.horizon:
            raise ProtocolViolation("horizon exhausted")
        x0 = self.last_solution if self.config.warm_start else None
        xt, info = solve(
            self.domain,
            self.cumulative,
            self.schedule.eta,
            tol=self.config.resolved_tol(),
            x0=x0,
        )
        self.last_solution = xt
        self._last_info = info
        work_path = sample_path(self.work, xt, self.rng)
        if self.bitmap is not None:
            chosen = augment_path(work_path, self.bitmap)
        else:
            chosen = self.work.incidence(work_path)
        self._pending = (xt, chosen, work_path)
        return self._to_input_path(work_path)

    def _to_input_path(self, work_path: Path) -> Path:
        if self.config.mode == "compressed":
            assert self.cdag is not None
            gd_edges = self.work.parent_edges
            assert gd_edges is not None
            dagger = tuple(gd_edges[e] for e in work_path)
            base_path = project_path(self.cdag, dagger)
        else:
            base_path = work_path
        pe = self.pruned.parent_edges
        assert pe is not None
        return tuple(pe[e] for e in base_path)

    def feed(self, loss: float) -> None:
        """Consume the scalar loss of the path returned by ``choose``."""
        if self._pending is None:
            raise ProtocolViolation("feed called without a preceding choose")
        if not math.isfinite(loss) or abs(loss) > 1.0:
            raise OutOfRangeLoss(f"loss must lie in [-1, 1], got {loss}")
        xt, chosen, work_path = self._pending
        obs = RoundObservation(chosen=chosen, loss=float(loss), marginals=xt)
        self.cumulative += biased_estimate(self.work, obs, self.schedule, self.bitmap)
        self.logs.append(
            RoundLog(
                round=self.round,
                path=self._to_input_path(work_path),
                loss=float(loss),
                solver_iterations=int(self._last_info.get("iterations", 0)),
                min_marginal=float(xt[chosen > 0.5].min()),
            )
        )
        self.round += 1
        self._pending = None


@dataclass
class RegretReport:
    """Everything one episode produced, regret-accounted.

    ``regret`` is realized cumulative loss minus the best fixed path in
    hindsight; ``cum_regret[t]`` uses the hindsight optimum of the first
    t+1 rounds (only filled at ``checkpoints``).
    """

    losses: list[float]
    paths: list[Path]
    cum_loss: float
    hindsight_path: Path
    hindsight_loss: float
    regret: float
    cum_regret: dict[int, float]
    cumulative_edge_loss: np.ndarray
    config: dict
    wall_clock: float
    round_logs: list[RoundLog] = field(default_factory=list)


def run_episode(
    dag: Dag,
    config: LearnerConfig,
    adversary,
    learner=None,
    checkpoints: Sequence[int] | None = None,
) -> RegretReport:
    """Play ``config.horizon`` rounds of learner vs adversary.

    The adversary commits its loss vector before seeing the learner's
    path (it may depend on all previous rounds).  ``checkpoints`` limits
    the rounds at which running best-in-hindsight regret is computed; by
    default every round is tracked.

    A prebuilt ``learner`` (anything with choose/feed) may be supplied;
    otherwise a :class:`PathLearner` is built from ``config``.
    """
    t0 = time.perf_counter()
    if learner is None:
        learner = PathLearner(dag, config)
    T = config.horizon
    marks = set(range(T)) if checkpoints is None else {int(c) - 1 for c in checkpoints}
    comparator = prune(dag)
    pe = comparator.parent_edges
    assert pe is not None
    pe_arr = np.array(pe, dtype=int)

    cum_y = np.zeros(dag.n_edges)
    losses: list[float] = []
    paths: list[Path] = []
    cum_regret: dict[int, float] = {}
    realized = 0.0
    for t in range(T):
        y = adversary.next_losses()
        path = learner.choose()
        loss = dag.path_loss(path, y)
        learner.feed(loss)
        adversary.observe(path)
        cum_y += y
        realized += loss
        losses.append(loss)
        paths.append(path)
        if t in marks:
            _, best = best_path_in_hindsight(comparator, cum_y[pe_arr])
            cum_regret[t + 1] = realized - best

    comp_losses = cum_y[pe_arr]
    best_path, best_loss = best_path_in_hindsight(comparator, comp_losses)
    report = RegretReport(
        losses=losses,
        paths=paths,
        cum_loss=realized,
        hindsight_path=tuple(pe[e] for e in best_path),
        hindsight_loss=best_loss,
        regret=realized - best_loss,
        cum_regret=cum_regret,
        cumulative_edge_loss=cum_y,
        config=_echo_config(config, learner),
        wall_clock=time.perf_counter() - t0,
        round_logs=list(getattr(learner, "logs", [])),
    )
    return report


def _echo_config(config: LearnerConfig, learner) -> dict:
    echo = {
        "mode": config.mode,
        "horizon": config.horizon,
        "delta": config.delta,
        "seed": config.seed,
        "warm_start": config.warm_start,
        "tol": config.resolved_tol(),
    }
    sched = getattr(learner, "schedule", None)
    if sched is not None:
        echo["eta"] = sched.eta
        echo["gamma_min"] = float(sched.gamma.min())
        echo["gamma_max"] = float(sched.gamma.max())
        if sched.gamma_bits.size:
            echo["gamma_bits"] = float(sched.gamma_bits[0])
    return echo
