"""Capacity and low-SNR asymptotics for Rician fading without channel state information."""
__version__ = "0.1.0"

from .channel import ChannelParams, NormalizedPeak
from .errors import (
    ConfigError,
    DerivativeInstabilityError,
    InfeasibleConstraintsError,
    InvalidParameterError,
    QuadratureError,
    RicianError,
)
from .numerics import QuadratureSpec
from .signaling import ConstraintSet, InputDistribution, Regime

__all__ = [
    "__version__",
    "ChannelParams",
    "NormalizedPeak",
    "ConfigError",
    "DerivativeInstabilityError",
    "InfeasibleConstraintsError",
    "InvalidParameterError",
    "QuadratureError",
    "RicianError",
    "QuadratureSpec",
    "ConstraintSet",
    "InputDistribution",
    "Regime",
]
