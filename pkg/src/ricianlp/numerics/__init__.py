"""Special functions, quadrature rules and derivative extrapolation."""
from .bessel import bessel_i0, bessel_i0_scaled, bessel_i1_scaled, log_bessel_i0
from .derivatives import DerivativeEstimate, derivative_estimates
from .quadrature import (
    QuadResult,
    QuadratureSpec,
    halfline_nodes,
    integrate_halfline,
    integrate_plane,
    plane_expectation,
)

__all__ = [
    "bessel_i0",
    "bessel_i0_scaled",
    "bessel_i1_scaled",
    "log_bessel_i0",
    "DerivativeEstimate",
    "derivative_estimates",
    "QuadResult",
    "QuadratureSpec",
    "halfline_nodes",
    "integrate_halfline",
    "integrate_plane",
    "plane_expectation",
]
