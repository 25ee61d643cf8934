"""Exception taxonomy shared by all modules.

The split mirrors how failures are reported downstream: configuration
errors abort with exit code 1, domain/numerical failures surface as
invariant-violation diagnostics (exit code 2).
"""


class SemieffError(Exception):
    """Base class for all package errors."""


class ConfigurationError(SemieffError):
    """Inputs violate a contract: mismatched schemes, bad config keys,
    missing seeds, an ambient span too small, an uncentered tangent."""


class DomainError(SemieffError):
    """A quantity left its mathematical domain: nonpositive density at a
    node, invalid model parameters, infeasible path grid."""


class NumericalError(SemieffError):
    """Linear algebra failed in a way the caller can often remedy
    (singular Gram matrix, rank-deficient span)."""


class PathInfeasibleError(DomainError):
    """A linear density path leaves the positive cone at some grid value.

    ``max_feasible_t`` reports the largest step that keeps every node
    density strictly positive.
    """

    def __init__(self, message: str, max_feasible_t: float):
        super().__init__(message)
        self.max_feasible_t = max_feasible_t
