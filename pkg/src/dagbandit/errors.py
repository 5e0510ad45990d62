"""Exception types shared across the package."""


class DagBanditError(Exception):
    """Base class for every error raised by this package."""


class CycleDetected(DagBanditError):
    """The edge set admits no topological order."""


class InvalidDag(DagBanditError):
    """Structural violation other than a cycle (parallel edge, bad endpoint, ...)."""


class NoPath(DagBanditError):
    """The sink is unreachable from the source."""


class TooManyPaths(DagBanditError):
    """An enumeration-based operation was asked to exceed its path cap."""


class DimensionMismatch(DagBanditError):
    """A vector does not match the coordinate space it is checked against."""


class NonPositiveCoordinate(DagBanditError):
    """The square-root regularizer was evaluated at a coordinate <= 0."""


class Infeasible(DagBanditError):
    """The optimization domain contains no point (or no interior point)."""


class SolverStall(DagBanditError):
    """The solver hit its iteration cap before reaching the requested tolerance."""


class ZeroMarginal(DagBanditError):
    """A loss estimate was requested for a chosen coordinate with zero marginal."""


class DeadEnd(DagBanditError):
    """Path sampling reached a vertex with no usable outgoing mass."""


class UnequalLengths(DagBanditError):
    """Equal-length mode was requested on a graph with paths of different lengths."""


class OutOfRangeLoss(DagBanditError):
    """A scalar loss outside [-1, 1] was fed to a learner."""


class ProtocolViolation(DagBanditError):
    """choose/feed were not called in strict alternation."""


class UnknownEdge(DagBanditError):
    """An edge index does not exist in the graph it was used with."""


class InvalidPath(DagBanditError):
    """An edge sequence is not a source-sink path of the expected graph."""


class MalformedGame(DagBanditError):
    """A game tree violates the structural requirements of the reduction."""


class NoWalk(DagBanditError):
    """The sink cannot be reached within the requested number of steps."""


class RangeViolation(DagBanditError):
    """An adversary could emit a loss vector with some path weight outside [-1, 1]."""


class ConfigError(DagBanditError):
    """An experiment or learner configuration is invalid; the message names the field."""
