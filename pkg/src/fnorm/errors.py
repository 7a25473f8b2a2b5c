"""Exception types shared across the package."""


class FNormError(Exception):
    """Base class for all package errors."""


class DomainError(FNormError, ValueError):
    """An argument lies outside the domain of the operation."""


class InvalidSpecError(DomainError):
    """A distribution spec is malformed or has out-of-range parameters."""


class CdfUnavailable(FNormError):
    """The joint cdf of a spec is not implemented; use Monte Carlo."""

    code = "cdf-unavailable"


class IntegrationFailure(FNormError):
    """Adaptive quadrature did not reach its tolerance within the subdivision limit."""

    code = "integration-failure"

    def __init__(self, message, estimate=float("nan"), error_bound=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class TailNotIntegrable(IntegrationFailure):
    """Geometric truncation of an infinite integral stalled (contributions not decaying)."""

    code = "tail-not-integrable-numerically"


class NotConvexError(FNormError):
    """Difference quotients were not monotone, so the input is not an F-norm evaluator."""

    code = "not-convex"


class ProductUnavailable(FNormError):
    code = "product-unavailable"


class BridgeRepresentationUnavailable(FNormError):
    code = "bridge-representation-unavailable"
