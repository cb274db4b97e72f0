"""Closed-form low-power asymptotics and numerical derivative checks.

Derivatives are taken with respect to ``SNR = P_av / n0`` and are in nats.
Bit energies are received values, ``(|m|^2 + gamma^2) ln 2 / C'(0)``, in dB.
The wideband slope is ``2 C'(0)^2 / (-C''(0))`` in bits/s/Hz per 3 dB.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .channel import ChannelParams, log_radial_kernel
from .errors import InvalidParameterError
from .mutual_info import mutual_information
from .numerics import bessel_i0_scaled, derivative_estimates, integrate_halfline, integrate_plane
from .numerics.quadrature import QuadratureSpec
from .signaling import Regime, make_ook, make_ook_fixed_peak, make_oobpsk, make_ooqpsk

LN2 = math.log(2.0)
# A second derivative this small relative to the channel gain squared is a
# cancellation residue of an exact zero (kappa == (1 + K)^2).
ZERO_CURVATURE_RTOL = 1e-12


def db(x: float) -> float:
    """``10 log10(x)`` with ``inf`` for ``x = inf``."""
    if x == math.inf:
        return math.inf
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class AsymptoticSummary:
    """Low-power figures of merit for one regime.

    ``ebn0_min_db`` is NaN where the minimum sits at an unknown nonzero
    spectral efficiency; ``ebn0_min_bounds_db`` then brackets it.
    """

    c_dot0: float
    c_ddot0: float
    ebn0_zero_se_db: float
    ebn0_min_db: float
    s0: float
    regime: Regime
    ebn0_min_bounds_db: Optional[Tuple[float, float]] = None
    note: str = ""

    def as_row(self) -> dict:
        lo, hi = self.ebn0_min_bounds_db or (math.nan, math.nan)
        return {
            "regime": self.regime.value,
            "c_dot0": self.c_dot0,
            "c_ddot0": self.c_ddot0,
            "ebn0_zero_se_db": self.ebn0_zero_se_db,
            "ebn0_min_db": self.ebn0_min_db,
            "ebn0_min_lower_db": lo,
            "ebn0_min_upper_db": hi,
            "s0": self.s0,
        }


def wideband_slope(c_dot0: float, c_ddot0: float, zero_tol: float = 0.0) -> float:
    """``2 c_dot0^2 / (-c_ddot0)`` with the conventions for degenerate cases.

    Returns 0 when ``c_dot0 = 0`` or ``c_ddot0 = -inf`` and ``+inf`` when
    the curvature vanishes (``|c_ddot0| <= zero_tol``) with positive
    ``c_dot0``.
    """
    if c_dot0 == 0.0 or c_ddot0 == -math.inf:
        return 0.0
    if abs(c_ddot0) <= zero_tol:
        return math.inf
    return 2.0 * c_dot0**2 / (-c_ddot0)


def ebn0_received_db(ch: ChannelParams, c_dot0: float) -> float:
    if c_dot0 <= 0.0:
        return math.inf
    return db(ch.gain * LN2 / c_dot0)


def _check_kappa(kappa, strict):
    if kappa is None or not math.isfinite(kappa) or (kappa <= 1.0 if strict else kappa < 1.0):
        bound = "> 1" if strict else ">= 1"
        raise InvalidParameterError(f"kappa must be {bound}, got {kappa}")


def derivs_fourth_moment(ch: ChannelParams, kappa: float) -> Tuple[float, float]:
    """``(C'(0), C''(0)) = (|m|^2, kappa gamma^4 - (|m|^2 + gamma^2)^2)``.

    Examples
    --------
    >>> ch = ChannelParams(m=0.5 ** 0.5, gamma_sq=0.5)
    >>> [round(v, 12) for v in derivs_fourth_moment(ch, 4.0)]
    [0.5, 0.0]
    """
    _check_kappa(kappa, strict=True)
    return ch.m_sq, kappa * ch.gamma_sq**2 - ch.gain**2


def derivs_ooqpsk(ch: ChannelParams, kappa: float) -> Tuple[float, float]:
    """Derivatives of the OOQPSK mutual information with ``p = 1/kappa``."""
    _check_kappa(kappa, strict=False)
    return ch.m_sq, kappa * ch.gamma_sq**2 - ch.gain**2


def derivs_oobpsk(ch: ChannelParams, kappa: float) -> Tuple[float, float]:
    """Derivatives of the OOBPSK mutual information with ``p = 1/kappa``.

    The real constellation loses ``|m|^4`` of curvature against OOQPSK.
    """
    _check_kappa(kappa, strict=False)
    return ch.m_sq, kappa * ch.gamma_sq**2 - ch.gain**2 - ch.m_sq**2


def summary_fourth_moment_or_par(ch: ChannelParams, kappa: float, regime: Regime = Regime.FOURTH_MOMENT) -> AsymptoticSummary:
    """Summary under ``E|x|^4 <= kappa P^2`` or ``max |x|^2 <= kappa P``.

    Both regimes share the derivative pair. The minimum bit energy is only
    bracketed: it lies between ``ln 2`` and the zero-spectral-efficiency value.
    """
    if regime not in (Regime.FOURTH_MOMENT, Regime.PEAK_TO_AVERAGE):
        raise InvalidParameterError(f"regime {regime} is not a kurtosis regime")
    _check_kappa(kappa, strict=regime is Regime.FOURTH_MOMENT)
    c1 = ch.m_sq
    c2 = kappa * ch.gamma_sq**2 - ch.gain**2
    eb0 = ebn0_received_db(ch, c1)
    s0 = wideband_slope(c1, c2, ZERO_CURVATURE_RTOL * ch.gain**2)
    if s0 < 0:
        note = "negative slope: minimum bit energy at a nonzero spectral efficiency"
    elif c1 > 0:
        note = "nonnegative slope: minimum at zero spectral efficiency is conjectured, not established"
    else:
        note = "Rayleigh channel: infinite bit energy at zero spectral efficiency"
    return AsymptoticSummary(c1, c2, eb0, math.nan, s0, regime, (db(LN2), eb0), note)


def closed_form_cddot_fixed_peak(ch: ChannelParams, nu: float) -> float:
    """``C''(0)`` under a fixed peak ``nu``; ``-inf`` once ``eta >= 1``."""
    eta = ch.normalized_peak(nu).eta
    if eta >= 1.0:
        return -math.inf
    return -((ch.n0 / nu) ** 2) * _fixed_peak_bessel_excess(eta, ch.rician_factor)


def _fixed_peak_bessel_excess(eta, K):
    """``B - 1`` where ``B = integral e^R g(R, sqrt(eta))^2 dR`` (closed form, eta < 1)."""
    one_m = 1.0 - eta * eta
    x = 2.0 * K * eta / one_m
    log_b = -math.log(one_m) + 2.0 * K * eta * eta / one_m + math.log(bessel_i0_scaled(x)) + x
    try:
        return math.expm1(log_b)
    except OverflowError:
        return math.inf


def cddot_fixed_peak_quadrature(ch: ChannelParams, nu: float, spec: Optional[QuadratureSpec] = None) -> float:
    """``-(n0/nu)^2 (integral e^R g^2(R, sqrt(eta)) dR - 1)`` by half-line quadrature."""
    eta = ch.normalized_peak(nu).eta
    if eta >= 1.0:
        return -math.inf
    r = math.sqrt(eta)
    K = ch.rician_factor
    res = integrate_halfline(lambda R: np.exp(R + 2.0 * log_radial_kernel(R, r, K)), spec)
    return -((ch.n0 / nu) ** 2) * (res.value - 1.0)


def summary_fixed_peak(ch: ChannelParams, nu: float) -> AsymptoticSummary:
    """Summary under ``max |x|^2 <= nu``; the two-mass input at the peak is optimal."""
    eta = ch.normalized_peak(nu).eta
    K = ch.rician_factor
    c1 = ch.gain - ch.n0 * math.log1p(eta) / nu
    c2 = closed_form_cddot_fixed_peak(ch, nu)
    if eta >= 1.0:
        s0 = 0.0
    else:
        s0 = 2.0 * (eta * (K + 1.0) - math.log1p(eta)) ** 2 / _fixed_peak_bessel_excess(eta, K)
    eb = ebn0_received_db(ch, c1)
    return AsymptoticSummary(c1, c2, eb, eb, s0, Regime.FIXED_PEAK, (eb, eb), "")


def summary_average_only(ch: ChannelParams) -> AsymptoticSummary:
    """Average power only: flash signaling reaches ``C'(0) = |m|^2 + gamma^2`` with zero slope."""
    eb = ebn0_received_db(ch, ch.gain)
    return AsymptoticSummary(ch.gain, -math.inf, eb, eb, 0.0, Regime.AVERAGE_ONLY, (eb, eb), "")


def summarize(ch: ChannelParams, regime: Regime, kappa=None, nu=None) -> AsymptoticSummary:
    if regime in (Regime.FOURTH_MOMENT, Regime.PEAK_TO_AVERAGE):
        return summary_fourth_moment_or_par(ch, kappa, regime)
    if regime is Regime.FIXED_PEAK:
        return summary_fixed_peak(ch, nu)
    return summary_average_only(ch)


def derivs_ook_fixed_peak(ch: ChannelParams, nu: float) -> Tuple[float, float]:
    """Closed-form derivatives reached by the peak-level on-off input."""
    return ch.gain - ch.n0 * math.log1p(ch.normalized_peak(nu).eta) / nu, closed_form_cddot_fixed_peak(ch, nu)


def _fixed_peak_points(ch, nu):
    a = math.sqrt(nu / 2.0)
    return np.array([a * complex(sr, si) for sr in (1, -1) for si in (1, -1)])


def pair_overlap_closed_form(ch: ChannelParams, xi: complex, xj: complex) -> float:
    """``integral f_{y|xi} f_{y|xj} / f_{y|0} dy`` for ``|xi| = |xj|`` (Gaussian integral)."""
    if not math.isclose(abs(xi), abs(xj), rel_tol=1e-12):
        raise InvalidParameterError("points must share a magnitude")
    var = ch.gamma_sq * abs(xi) ** 2 + ch.n0
    a = 2.0 / var - 1.0 / ch.n0
    if a <= 0:
        return math.inf
    b = ch.m * (xi + xj) / var
    ci, cj = ch.m * xi, ch.m * xj
    return ch.n0 / (var**2 * a) * math.exp(abs(b) ** 2 / a - (abs(ci) ** 2 + abs(cj) ** 2) / var)


def pair_overlap_quadrature(ch: ChannelParams, xi: complex, xj: complex, spec: Optional[QuadratureSpec] = None) -> float:
    """Plane quadrature of the same overlap, on a grid centred at the product's peak."""
    spec = spec or QuadratureSpec()
    var = ch.gamma_sq * abs(xi) ** 2 + ch.n0
    a = 2.0 / var - 1.0 / ch.n0
    if a <= 0:
        return math.inf
    ci, cj = ch.m * xi, ch.m * xj
    center = (ci + cj) / (var * a)
    var_j = ch.gamma_sq * abs(xj) ** 2 + ch.n0

    def log_F(y):
        return (
            -np.log(np.pi * var) - np.abs(y - ci) ** 2 / var
            - np.log(np.pi * var_j) - np.abs(y - cj) ** 2 / var_j
            + np.log(np.pi * ch.n0) + np.abs(y) ** 2 / ch.n0
        )

    return integrate_plane(log_F, center, 1.0 / math.sqrt(a), spec.plane_radial_nodes, spec.plane_angular_nodes)


def derivs_ooqpsk_fixed_peak(ch: ChannelParams, nu: float, spec: Optional[QuadratureSpec] = None) -> Tuple[float, float]:
    """Derivatives of OOQPSK whose on-points sit at the peak magnitude ``sqrt(nu)``.

    The second derivative sums the 16 pairwise overlaps of the on-points by
    plane quadrature; it is ``-inf`` for ``eta >= 1``.
    """
    eta = ch.normalized_peak(nu).eta
    c1 = ch.gain - ch.n0 * math.log1p(eta) / nu
    if eta >= 1.0:
        return c1, -math.inf
    pts = _fixed_peak_points(ch, nu)
    total = 0.0
    for xi in pts:
        for xj in pts:
            total += pair_overlap_quadrature(ch, xi, xj, spec)
    return c1, (ch.n0 / nu) ** 2 * (1.0 - total / 16.0)


SCHEMES = ("ooqpsk", "oobpsk", "ook", "ook-fixed-peak")


def scheme_input(scheme: str, p_av: float, p: Optional[float] = None, nu: Optional[float] = None):
    """Input of a named scheme at average power ``p_av``."""
    if scheme == "ooqpsk":
        return make_ooqpsk(p_av, p)
    if scheme == "oobpsk":
        return make_oobpsk(p_av, p)
    if scheme == "ook":
        return make_ook(p_av, p)
    if scheme == "ook-fixed-peak":
        return make_ook_fixed_peak(p_av, nu)
    raise InvalidParameterError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")


def scheme_closed_form(scheme: str, ch: ChannelParams, p: Optional[float] = None, nu: Optional[float] = None):
    """Closed-form ``(I'(0), I''(0))`` for a named scheme."""
    if scheme == "ooqpsk":
        return derivs_ooqpsk(ch, 1.0 / p)
    if scheme == "oobpsk":
        return derivs_oobpsk(ch, 1.0 / p)
    if scheme == "ook":
        # uniform phase on the on-level behaves like OOQPSK to second order
        return derivs_ooqpsk(ch, 1.0 / p)
    if scheme == "ook-fixed-peak":
        return derivs_ook_fixed_peak(ch, nu)
    raise InvalidParameterError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")


def mi_derivatives(
    scheme: str,
    ch: ChannelParams,
    p: Optional[float] = None,
    nu: Optional[float] = None,
    h: float = 1e-2,
    levels: int = 4,
    spec: Optional[QuadratureSpec] = None,
):
    """Richardson estimates of ``I'(0)`` and ``I''(0)`` from MI on an SNR ladder."""

    def f(snr):
        return mutual_information(scheme_input(scheme, snr * ch.n0, p, nu), ch, spec).value

    return derivative_estimates(f, h=h, levels=levels)
