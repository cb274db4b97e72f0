"""One-sided derivative estimates at zero by Richardson extrapolation."""
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import DerivativeInstabilityError


@dataclass(frozen=True)
class DerivativeEstimate:
    d1: float
    d2: float
    d1_error: float
    d2_error: float
    steps: tuple


def _richardson(values):
    """Eliminate error terms h, h^2, ... from estimates on halving steps."""
    table = [list(values)]
    for j in range(1, len(values)):
        prev = table[-1]
        factor = 2.0**j - 1.0
        table.append([prev[i + 1] + (prev[i + 1] - prev[i]) / factor for i in range(len(prev) - 1)])
    diagonal = [col[-1] for col in table]
    diffs = np.abs(np.diff(diagonal))
    return diagonal[-1], float(diffs[-1]), diffs


def derivative_estimates(
    f: Callable[[float], float],
    h: float = 1e-2,
    levels: int = 4,
    orders: Sequence[int] = (1, 2),
    max_rel_error: float = 1e-3,
    abs_floor: float = 1e-6,
    max_ratio: float = 0.5,
) -> DerivativeEstimate:
    """Estimate f'(0+) and f''(0+) for a function with f(0) = 0.

    ``f`` is sampled on the geometric schedule h, h/2, ..., h/2**(levels-1).
    The first derivative extrapolates f(t)/t; the second extrapolates
    4 (f(t) - 2 f(t/2)) / t**2. Both tables are exact for cubics.

    Raises
    ------
    DerivativeInstabilityError
        If the last correction along the extrapolation diagonal shrank by
        less than ``max_ratio`` while exceeding ``max_rel_error`` relative
        (and ``abs_floor`` absolute), or the estimate is not finite.
    """
    if levels < 3:
        raise ValueError("need at least three step levels")
    steps = tuple(h / 2.0**k for k in range(levels))
    vals = np.array([f(t) for t in steps], dtype=float)
    d1 = d2 = np.nan
    e1 = e2 = np.nan
    if 1 in orders:
        d1, e1, diffs = _richardson(vals / np.array(steps))
        _check(d1, diffs, max_rel_error, abs_floor, max_ratio, "first")
    if 2 in orders:
        second = [4.0 * (vals[k] - 2.0 * vals[k + 1]) / steps[k] ** 2 for k in range(levels - 1)]
        d2, e2, diffs = _richardson(second)
        _check(d2, diffs, max_rel_error, abs_floor, max_ratio, "second")
    return DerivativeEstimate(float(d1), float(d2), float(e1), float(e2), steps)


def _check(value, diffs, max_rel_error, abs_floor, max_ratio, which):
    # a settling table shrinks its corrections geometrically; noise or a
    # non-polynomial expansion does not
    err = diffs[-1]
    stalled = len(diffs) > 1 and err > max_ratio * diffs[-2]
    if not np.isfinite(value) or (stalled and err > max(abs_floor, max_rel_error * abs(value))):
        raise DerivativeInstabilityError(
            f"{which} derivative extrapolation unstable: value {value:.6g}, spread {err:.3g}"
        )
