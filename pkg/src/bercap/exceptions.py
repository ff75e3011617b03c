"""Exception types raised across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConvergenceError(ArithmeticError):
    """A series or continued fraction did not converge."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, value: float = float("nan"), error_estimate: float = float("nan")):
        super().__init__(f"{message} (value={value!r}, error estimate={error_estimate!r})")
        self.value = value
        self.error_estimate = error_estimate


class UnsupportedChannelError(TypeError):
    """Operation has no implementation for the given channel model."""


class UnsupportedModulationError(ValueError):
    """Modulation parameters outside what an operation supports."""


class BerRangeError(ValueError):
    """A BER function returned values outside (0, 1/2]."""


class InconsistentInputError(ValueError):
    """Transform result fell outside its admissible range."""


class CurveError(ValueError):
    """Malformed or invalid BER curve data."""
