"""Channel parameters and conditional output densities.

The channel is ``y = (m + a) x + n`` with ``a ~ CN(0, gamma_sq)`` and
``n ~ CN(0, n0)``. Given ``x``, ``y`` is circular Gaussian with mean ``m x``
and variance ``gamma_sq |x|^2 + n0``.
"""
import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .numerics import bessel_i0_scaled
from .numerics.quadrature import plane_expectation


@dataclass(frozen=True)
class ChannelParams:
    """Line-of-sight coefficient ``m``, diffuse variance ``gamma_sq`` and noise level ``n0``.

    Constructors never rescale; use :meth:`from_rician_factor` for the
    ``|m|^2 + gamma_sq = 1`` normalization.
    """

    m: complex = 0.0
    gamma_sq: float = 1.0
    n0: float = 1.0

    def __post_init__(self):
        m = complex(self.m)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "gamma_sq", float(self.gamma_sq))
        object.__setattr__(self, "n0", float(self.n0))
        if not cmath.isfinite(m):
            raise InvalidParameterError("m must be finite")
        if not (math.isfinite(self.gamma_sq) and self.gamma_sq > 0):
            raise InvalidParameterError(f"gamma_sq must be positive, got {self.gamma_sq}")
        if not (math.isfinite(self.n0) and self.n0 > 0):
            raise InvalidParameterError(f"n0 must be positive, got {self.n0}")

    @classmethod
    def from_rician_factor(cls, K: float, normalized: bool = True, gamma_sq: float = 1.0, n0: float = 1.0):
        """Build a channel with Rician factor ``K`` and a real positive ``m``.

        With ``normalized`` the gain ``|m|^2 + gamma_sq`` is one and
        ``gamma_sq`` is ignored.
        """
        if not (math.isfinite(K) and K >= 0):
            raise InvalidParameterError(f"Rician factor must be >= 0, got {K}")
        if normalized:
            gamma_sq = 1.0 / (1.0 + K)
        return cls(m=math.sqrt(K * gamma_sq), gamma_sq=gamma_sq, n0=n0)

    @property
    def m_sq(self) -> float:
        return abs(self.m) ** 2

    @property
    def rician_factor(self) -> float:
        return self.m_sq / self.gamma_sq

    @property
    def gain(self) -> float:
        """Average channel power gain ``|m|^2 + gamma_sq``."""
        return self.m_sq + self.gamma_sq

    def normalized_peak(self, nu: float) -> "NormalizedPeak":
        return NormalizedPeak.from_channel(self, nu)

    def normalized_amplitude(self, amplitude):
        """``r = gamma |x| / sqrt(n0)`` for amplitudes ``|x|``."""
        return np.sqrt(self.gamma_sq / self.n0) * np.asarray(amplitude, dtype=float)


@dataclass(frozen=True)
class NormalizedPeak:
    eta: float
    nu: float

    @classmethod
    def from_channel(cls, ch: ChannelParams, nu: float):
        if not (math.isfinite(nu) and nu > 0):
            raise InvalidParameterError(f"peak power must be positive, got {nu}")
        return cls(eta=ch.gamma_sq * nu / ch.n0, nu=float(nu))


def cond_density(y, x, ch: ChannelParams):
    """Density of ``y`` given input ``x`` (broadcasts over arrays)."""
    y = np.asarray(y, dtype=complex)
    x = np.asarray(x, dtype=complex)
    var = ch.gamma_sq * np.abs(x) ** 2 + ch.n0
    out = np.exp(-np.abs(y - ch.m * x) ** 2 / var) / (np.pi * var)
    return float(out) if out.ndim == 0 else out


def log_cond_density(y, x, ch: ChannelParams):
    y = np.asarray(y, dtype=complex)
    x = np.asarray(x, dtype=complex)
    var = ch.gamma_sq * np.abs(x) ** 2 + ch.n0
    return -np.log(np.pi * var) - np.abs(y - ch.m * x) ** 2 / var


def log_radial_kernel(R, r, K):
    """``log g(R, r)`` where ``R = |y|^2/n0`` and ``r = gamma |x|/sqrt(n0)``."""
    R = np.asarray(R, dtype=float)
    s = np.asarray(r, dtype=float) ** 2
    if np.any(R < 0) or np.any(s < 0) or K < 0:
        raise InvalidParameterError("radial kernel arguments must be nonnegative")
    a = 1.0 + s
    z = 2.0 * np.sqrt(K * s * R) / a
    return -np.log(a) - (R + K * s) / a + np.log(bessel_i0_scaled(z)) + z


def radial_kernel(R, r, K):
    """Density ``g(R, r)`` of the normalized output power given normalized amplitude ``r``.

    Evaluated through the scaled Bessel function, so large ``R`` cannot
    overflow.

    Examples
    --------
    >>> radial_kernel(0.0, 1.0, 1.0)  # doctest: +ELLIPSIS
    0.3032653298...
    """
    out = np.exp(log_radial_kernel(R, r, K))
    return float(out) if np.ndim(out) == 0 else out


def kl_onoff_closed_form(x0_sq: float, ch: ChannelParams) -> float:
    """``D(f_{y|x0} || f_{y|0})`` in nats for an on-level of power ``x0_sq``."""
    if x0_sq < 0:
        raise InvalidParameterError("on-level power must be nonnegative")
    return ch.gain * x0_sq / ch.n0 - math.log1p(ch.gamma_sq * x0_sq / ch.n0)


def kl_conditional_numeric(x0: complex, ch: ChannelParams, n_radial: int = 80, n_angular: int = 96) -> float:
    """Plane quadrature of ``D(f_{y|x0} || f_{y|0})``; an independent check of the closed form."""
    x0 = complex(x0)
    scale = math.sqrt(ch.gamma_sq * abs(x0) ** 2 + ch.n0)

    def llr(y):
        return log_cond_density(y, x0, ch) - log_cond_density(y, 0.0, ch)

    return plane_expectation(llr, ch.m * x0, scale, n_radial, n_angular)


def fisher_information(ch: ChannelParams, step: float = 1e-4, n_radial: int = 80, n_angular: int = 96) -> np.ndarray:
    """Fisher information of ``y`` about ``(Re x, Im x)`` at ``x = 0``.

    The score is a central difference of ``log f(y|x)`` and the expectation
    runs on the plane rule for ``f(y|0)``. The closed form is
    ``(2 |m|^2 / n0) I``.
    """
    dirs = (step, 1j * step)

    def outer(y):
        score = [
            (log_cond_density(y, d, ch) - log_cond_density(y, -d, ch)) / (2.0 * step)
            for d in dirs
        ]
        v = np.stack(score, axis=-1)
        return v[..., :, None] * v[..., None, :]

    return np.asarray(plane_expectation(outer, 0.0, math.sqrt(ch.n0), n_radial, n_angular))
