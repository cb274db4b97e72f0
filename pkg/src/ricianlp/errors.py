"""Exception types shared across the package."""


class RicianError(Exception):
    """Base class for errors raised by ricianlp."""


class InvalidParameterError(RicianError, ValueError):
    pass


class QuadratureError(RicianError, ArithmeticError):
    """Quadrature missed its tolerance at the subdivision cap."""

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class DerivativeInstabilityError(RicianError, ArithmeticError):
    """Richardson extrapolants failed to settle."""


class InfeasibleConstraintsError(RicianError, ValueError):
    pass


class ConfigError(RicianError, ValueError):
    pass


class InsufficientDataError(RicianError, ValueError):
    """Too few usable curve points for a fit."""
