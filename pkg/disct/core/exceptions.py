"""
File: exceptions.py
Description: Domain exception hierarchy. Every error carries a human-readable
             `detail`, which the CLI prints before exiting with status 1.
"""

from typing import Tuple


class DisctError(Exception):
    """Base class for all errors raised by disct."""

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class DomainError(DisctError, ValueError):
    """Argument outside the mathematical domain of a kernel (e.g. |rho| >= 1)."""


class DataFormatError(DisctError):
    """Malformed, ragged or empty observation table."""


class DegenerateColumnError(DisctError):
    """Column with zero sample standard deviation."""


class PairKindMismatchError(DisctError):
    """Pair kind inconsistent with the supplied parameters or operation."""


class DegenerateEstimateError(DisctError):
    """The data carry no usable information about a latent correlation."""


class SingularJacobianError(DegenerateEstimateError):
    """Criterion Jacobian is not invertible at the estimate."""


class SingularCovarianceError(DegenerateEstimateError):
    """Covariance/correlation matrix could not be inverted."""


class VarianceDegenerateError(DegenerateEstimateError):
    """Estimated null variance is not strictly positive."""


class PairEstimationError(DisctError):
    """Estimation failure annotated with the offending variable pair."""

    def __init__(self, detail: str, pair: Tuple[int, int]):
        super().__init__(f"pair {pair}: {detail}")
        self.pair = pair

    @property
    def degenerate(self) -> bool:
        """True when the underlying failure is a degenerate estimate."""
        return isinstance(self.__cause__, DegenerateEstimateError)


class InvalidConditioningSetError(DisctError):
    """Tested indices overlap the conditioning set or are out of range."""


class InsufficientSamplesError(DisctError):
    """Too few samples for the requested statistic."""


class NonDiscreteColumnError(DisctError):
    """A test requiring discretized columns received a continuous one."""


class DegenerateStrataError(DisctError):
    """Every conditioning stratum of a contingency test was degenerate."""


class DiscretizationError(DisctError):
    """Boundary draws repeatedly failed to produce all requested levels."""


class InfeasibleGraphError(DisctError):
    """Requested graph shape cannot be realised."""


class NodeCountMismatchError(DisctError):
    """Two graphs compared over different node sets."""
