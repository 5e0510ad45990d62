"""Online shortest-path bandits on DAGs.

A library and CLI for regret minimization over source-sink paths under
bandit feedback: exact graph machinery, a square-root-regularized FTRL
learner with implicit exploration, centroid-based graph compression that
shortens every path to logarithmic length, reductions from six
combinatorial domains, and a reproducible simulation harness.
"""

from .augment import BitIndexMap, augment_path, augmented_constraints, interval_set
from .compress import (
    CentroidDecomp,
    CompressedDag,
    SpanningTree,
    build_gdagger,
    build_spanning_tree,
    centroid_decompose,
    compress,
    convert_weights,
    lift_path,
    project_path,
    sigma,
)
from .errors import DagBanditError
from .estimators import (
    RoundObservation,
    biased_estimate,
    exact_estimator_expectation,
    unbiased_estimate,
)
from .ftrl import FtrlDomain, LearnerSchedule, default_schedule, solve
from .graph import (
    Dag,
    best_path_in_hindsight,
    count_paths,
    enumerate_paths,
    longest_dist,
    prune,
    topo_order,
    validate_flow,
)
from .harness import (
    adaptive_targeting,
    exact_exp3_paths_baseline,
    exp3_ix_baseline,
    multitask_lower_bound_instance,
    run_experiment,
    stochastic_iid,
)
from .learner import LearnerConfig, PathLearner, RegretReport, run_episode
from .reductions import (
    EfgGame,
    EfgNode,
    Reduction,
    blotto,
    efg_to_dag,
    hypercube,
    msets,
    multitask,
    shortest_walk,
)
from .sampling import make_rng, sample_path, sampler_law

__version__ = "0.1.0"
