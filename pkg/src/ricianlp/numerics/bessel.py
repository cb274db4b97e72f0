"""Modified Bessel functions of the first kind, orders 0 and 1.

Power series up to x = 15, Hankel asymptotic series (truncated at its
smallest term) beyond. Both reach better than 12 significant digits at the
crossover.
"""
import math

import numpy as np

from .. import kernels
from ..errors import InvalidParameterError

SERIES_LIMIT = 15.0
_LOG_MAX = math.log(np.finfo(float).max)


def _check_nonnegative(x):
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0):
        raise InvalidParameterError("Bessel argument must be finite and nonnegative")
    return arr


def _apply(fn, x):
    arr = _check_nonnegative(x)
    out = fn(np.ascontiguousarray(arr.ravel())).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def bessel_i0_scaled(x):
    """Return ``exp(-x) * I0(x)``; never overflows."""
    return _apply(kernels.i0e_array, x)


def bessel_i1_scaled(x):
    """Return ``exp(-x) * I1(x)``."""
    return _apply(kernels.i1e_array, x)


def bessel_i0(x):
    """Return ``I0(x)``.

    Raises
    ------
    OverflowError
        If ``I0(x)`` exceeds the double range (x above roughly 713).
    """
    arr = _check_nonnegative(x)
    flat = np.ascontiguousarray(arr.ravel())
    out = np.empty_like(flat)
    small = flat <= SERIES_LIMIT
    out[small] = kernels.numpy_impl.i0_series(flat[small])
    if (~small).any():
        xb = np.ascontiguousarray(flat[~small])
        log_val = np.log(kernels.i0e_array(xb)) + xb
        if np.any(log_val > _LOG_MAX):
            raise OverflowError("I0(x) is not representable in double precision")
        out[~small] = np.exp(log_val)
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def log_bessel_i0(x):
    """``log I0(x)`` through the scaled function."""
    arr = _check_nonnegative(x)
    return np.log(bessel_i0_scaled(arr)) + arr
