"""Exception and warning types shared across the library."""


class NarrowFluxError(Exception):
    """Base class for all narrowflux errors."""


class DomainError(NarrowFluxError, ValueError):
    """Argument lies outside the mathematical domain of an operation."""


class OverlapError(NarrowFluxError, ValueError):
    """Window centers closer than one window diameter."""


class RoleError(NarrowFluxError, ValueError):
    """Window roles inconsistent (missing or duplicated influx, no exit)."""


class SingularityError(NarrowFluxError, ValueError):
    """Kernel evaluated too close to its singular point."""


class NonConvergenceError(NarrowFluxError, ArithmeticError):
    """A quadrature or iteration failed to reach the requested tolerance."""


class SingularSystemError(NarrowFluxError, ArithmeticError):
    """Linear system too ill-conditioned to solve reliably."""


class DimensionMismatchError(NarrowFluxError, ValueError):
    """Array sizes inconsistent with the window count."""


class ResolutionError(NarrowFluxError, ValueError):
    """Mesh resolution below the minimum supported level."""


class StallError(NarrowFluxError, ArithmeticError):
    """Flow-line integration step size collapsed."""


class MaxTimeExceededError(NarrowFluxError, ArithmeticError):
    """Flow-line integration hit the time budget before exiting."""


class InsufficientDataError(NarrowFluxError, ValueError):
    """Too few samples to fit the requested model."""


class SlowDecayWarning(RuntimeWarning):
    """Tail extrapolation of a semi-infinite integral is stalling."""


class TimeoutWarning(RuntimeWarning):
    """More than 1% of Monte Carlo particles hit the step budget."""


class ValidityWarning(UserWarning):
    """Expansion evaluated outside its documented accuracy range."""
