"""Error types shared across the package.

All of them are ValueError subclasses so that callers who do not care about
the distinction can catch a single base class.
"""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SingularityError(ValueError):
    """Evaluation was requested at (or too close to) a singular point."""


class AlignmentError(ValueError):
    """A grid does not contain a node that the operation requires."""


class StateError(ValueError):
    """Required state (e.g. the first fixing of an average) is missing."""


class ReachabilityError(ValueError):
    """A terminal constraint fails the finite-cost reachability condition."""
