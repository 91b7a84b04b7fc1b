"""Exception types shared across the package."""

from __future__ import annotations

__all__ = [
    "CavityTrajError",
    "InvalidDimensionError",
    "InvalidParameterError",
    "ZeroNormError",
    "TruncationError",
    "NonUniqueSteadyStateError",
    "ConvergenceError",
    "OutOfRegimeError",
    "UndefinedCorrelationError",
    "ConfigError",
]


class CavityTrajError(Exception):
    """Base class for package-specific failures."""


class InvalidDimensionError(CavityTrajError, ValueError):
    """A Hilbert-space dimension or operator shape is inconsistent."""


class InvalidParameterError(CavityTrajError, ValueError):
    """A physical parameter is outside its allowed range."""


class ZeroNormError(CavityTrajError, ValueError):
    """A state vector or projection has numerically vanishing weight."""


class TruncationError(CavityTrajError, RuntimeError):
    """Amplitude leaked into the top Fock levels beyond the allowed bound."""


class NonUniqueSteadyStateError(CavityTrajError, RuntimeError):
    """The Liouvillian null space has dimension greater than one."""


class ConvergenceError(CavityTrajError, RuntimeError):
    """An iterative solve failed to reach the requested residual."""


class OutOfRegimeError(CavityTrajError, ValueError):
    """A closed-form expression was evaluated outside its validity range."""


class UndefinedCorrelationError(CavityTrajError, ValueError):
    """A normalized correlation has a vanishing denominator."""


class ConfigError(CavityTrajError, ValueError):
    """A scenario configuration is malformed or inconsistent."""
