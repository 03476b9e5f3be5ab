"""Exception types shared across the package."""

from __future__ import annotations


class CachenetError(Exception):
    """Base class for all package-specific errors."""


class DomainError(CachenetError, ValueError):
    """An argument or parameter violates a documented domain constraint."""


class EnergyOrderingError(DomainError):
    """Raised when the per-file miss energy is below the hit energy.

    Serving a request through the backhaul can never be cheaper than a
    local cache hit, so such inputs are almost certainly a configuration
    mistake and get their own error type.
    """


class InfeasibleBudgetError(CachenetError):
    """The deployment budget cannot buy any point of the design box."""


class QuadratureConvergenceError(CachenetError):
    """The adaptive quadrature did not converge within its doubling budget.

    Carries the last two iterates so callers can inspect how far apart
    the estimates still were.
    """

    def __init__(self, message: str, last_iterates: tuple[float, float]):
        super().__init__(message)
        self.last_iterates = last_iterates


class ConfigError(CachenetError):
    """A configuration file or CLI override could not be accepted."""
