"""Exception types raised by finslerkit."""


class FinslerError(Exception):
    """Base class for all errors raised by this package."""


class NonPositiveArgument(FinslerError, ValueError):
    """The polynomial under an m-th root is not strictly positive at the requested point."""


class DifferentiationFailure(FinslerError):
    """Automatic and finite-difference derivatives disagree beyond tolerance."""


class ConvexityFailure(FinslerError):
    """The norm is not strongly convex on the sampled directions."""


class ResolutionFailure(FinslerError):
    """Critical-point search found nothing, e.g. because the energy profile is constant."""


class MetricFormatError(FinslerError, ValueError):
    """A metric definition (JSON or in-memory) is malformed."""
