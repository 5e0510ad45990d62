"""Loss estimators built from one bandit observation.

Only the scalar loss of the chosen path is observed.  Edge coordinates
get numerator (1 + loss), vertex coordinates (1 - loss) with source and
sink pinned to zero, and level bits a constant 2; each is divided by the
chosen coordinate's sampling marginal.  The biased variant adds the
exploration vector gamma to every denominator, which caps the estimate's
magnitude at the price of a downward bias.

The plain (gamma = 0) estimator is not unbiased for the loss vector, but
its expected inner product with any fixed path exceeds that path's true
loss by exactly ||x||_1 - 2 — a path-independent constant once lengths
are equalized (2K - 1 on the augmented space) — so loss *differences*
between paths are preserved in expectation.  ``exact_estimator_expectation``
verifies this by full enumeration and backs the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .augment import BitIndexMap, augment_path
from .errors import OutOfRangeLoss, ZeroMarginal
from .ftrl import LearnerSchedule
from .graph import Dag, Path
from .sampling import sampler_law


@dataclass(frozen=True)
class RoundObservation:
    """What one round reveals: the chosen (augmented) path, its scalar
    loss, and the marginals it was sampled from."""

    chosen: np.ndarray
    loss: float
    marginals: np.ndarray

    def __post_init__(self) -> None:
        if abs(self.loss) > 1.0 + 1e-12:
            raise OutOfRangeLoss(f"|loss| must be at most 1, got {self.loss}")
        if self.chosen.shape != self.marginals.shape:
            raise ZeroMarginal("chosen vector and marginals have different shapes")


def _estimate(
    dag: Dag,
    obs: RoundObservation,
    gamma: np.ndarray,
    gamma_bits: np.ndarray,
    bitmap: BitIndexMap | None,
) -> np.ndarray:
    n = dag.n_coords + (bitmap.n_bits if bitmap is not None else 0)
    if obs.chosen.shape != (n,):
        raise ZeroMarginal(f"observation has {obs.chosen.shape} coords, domain has {n}")
    nv = dag.n_vertices
    numer = np.zeros(n)
    numer[:nv] = 1.0 - obs.loss
    numer[dag.source] = 0.0
    numer[dag.sink] = 0.0
    numer[nv : dag.n_coords] = 1.0 + obs.loss
    if bitmap is not None:
        numer[dag.n_coords :] = 2.0

    denom = obs.marginals + np.concatenate([gamma, gamma_bits])
    chosen = obs.chosen > 0.5
    active = chosen & (numer != 0.0)
    if np.any(denom[active] <= 0.0):
        raise ZeroMarginal("chosen coordinate has non-positive sampling marginal")
    out = np.zeros(n)
    out[active] = numer[active] / denom[active]
    return out


def biased_estimate(
    dag: Dag,
    obs: RoundObservation,
    schedule: LearnerSchedule,
    bitmap: BitIndexMap | None = None,
) -> np.ndarray:
    """Implicit-exploration estimate: denominators shifted by gamma."""
    return _estimate(dag, obs, schedule.gamma, schedule.gamma_bits, bitmap)


def unbiased_estimate(
    dag: Dag,
    obs: RoundObservation,
    bitmap: BitIndexMap | None = None,
) -> np.ndarray:
    """The gamma = 0 variant (relatively unbiased across paths)."""
    n_bits = bitmap.n_bits if bitmap is not None else 0
    return _estimate(
        dag, obs, np.zeros(dag.n_coords), np.zeros(n_bits), bitmap
    )


def exact_estimator_expectation(
    dag: Dag,
    flow: np.ndarray,
    edge_losses: np.ndarray,
    path: Path,
    bitmap: BitIndexMap | None = None,
) -> float:
    """E[<x, estimate>] for a fixed path x, by exhaustive enumeration.

    Sums, over every sampleable path p, the sampler's exact probability of
    p times the inner product of ``path``'s (augmented) incidence vector
    with the gamma = 0 estimate produced when p is drawn.  Enumeration
    only — a test oracle, never on the learner's hot path.
    """
    law = sampler_law(dag, flow)
    if bitmap is None:
        target = dag.incidence(path)
        vec = lambda p: dag.incidence(p)  # noqa: E731
        marg = np.asarray(flow, dtype=float)[: dag.n_coords]
    else:
        target = augment_path(path, bitmap)
        vec = lambda p: augment_path(p, bitmap)  # noqa: E731
        marg = np.asarray(flow, dtype=float)
    expect = 0.0
    for p, q in law.items():
        if q == 0.0:
            continue
        loss = dag.path_loss(p, edge_losses)
        obs = RoundObservation(chosen=vec(p), loss=loss, marginals=marg)
        est = unbiased_estimate(dag, obs, bitmap)
        expect += q * float(target @ est)
    return expect
