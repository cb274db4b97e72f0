"""Finite-support inputs, moment constraints and named signaling schemes."""
import enum
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import InfeasibleConstraintsError, InvalidParameterError

PROB_TOL = 1e-12


class InputDistribution:
    """Finite set of mass points.

    With ``phase_symmetric=True`` each point is an amplitude ``|x| >= 0``
    carrying a uniformly distributed phase; otherwise points are explicit
    complex constellation values.

    Parameters
    ----------
    points : sequence of float or complex
    probs : sequence of float
        Must sum to one within 1e-12.
    phase_symmetric : bool
    """

    def __init__(self, points: Sequence, probs: Sequence[float], phase_symmetric: bool = True):
        probs = np.asarray(probs, dtype=float).ravel()
        if phase_symmetric:
            pts = np.asarray(points)
            if np.iscomplexobj(pts):
                if np.any(pts.imag != 0):
                    raise InvalidParameterError("amplitude points must be real")
                pts = pts.real
            pts = pts.astype(float).ravel()
            if np.any(~np.isfinite(pts)) or np.any(pts < 0):
                raise InvalidParameterError("amplitudes must be finite and nonnegative")
            if np.count_nonzero(pts == 0.0) > 1:
                raise InvalidParameterError("at most one mass point may sit at zero")
        else:
            pts = np.asarray(points, dtype=complex).ravel()
            if np.any(~np.isfinite(pts)):
                raise InvalidParameterError("constellation points must be finite")
        if pts.size == 0 or pts.size != probs.size:
            raise InvalidParameterError("need one probability per mass point")
        if np.any(~np.isfinite(probs)) or np.any(probs < 0) or np.any(probs > 1):
            raise InvalidParameterError("probabilities must lie in [0, 1]")
        if abs(probs.sum() - 1.0) > PROB_TOL:
            raise InvalidParameterError(f"probabilities sum to {probs.sum()!r}, not 1")
        self.points = pts
        self.probs = probs
        self.phase_symmetric = bool(phase_symmetric)
        self.points.setflags(write=False)
        self.probs.setflags(write=False)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.abs(self.points) if not self.phase_symmetric else self.points

    def __len__(self):
        return self.points.size

    def __repr__(self):
        kind = "amplitude" if self.phase_symmetric else "complex"
        pairs = ", ".join(f"{x!r}: {p:.6g}" for x, p in zip(self.points.tolist(), self.probs.tolist()))
        return f"InputDistribution({kind}; {pairs})"

    def second_moment(self) -> float:
        return float(np.dot(self.probs, self.amplitudes**2))

    def fourth_moment(self) -> float:
        return float(np.dot(self.probs, self.amplitudes**4))

    def peak_power(self) -> float:
        live = self.probs > 0
        return float(np.max(self.amplitudes[live] ** 2))

    def kurtosis(self) -> float:
        return self.fourth_moment() / self.second_moment() ** 2

    def amplitude_distribution(self) -> "InputDistribution":
        """Collapse to amplitudes with uniform phase (merges equal magnitudes)."""
        amps = np.round(self.amplitudes, 14)
        uniq, inverse = np.unique(amps, return_inverse=True)
        probs = np.bincount(inverse, weights=self.probs, minlength=uniq.size)
        return InputDistribution(uniq, probs / probs.sum(), phase_symmetric=True)

    def scaled(self, factor: float) -> "InputDistribution":
        """Multiply every point by ``factor`` (power scales by ``factor**2``)."""
        return InputDistribution(self.points * factor, self.probs, self.phase_symmetric)

    def pruned(self) -> "InputDistribution":
        keep = self.probs > 0
        probs = self.probs[keep]
        return InputDistribution(self.points[keep], probs / probs.sum(), self.phase_symmetric)

    def to_text(self) -> str:
        """One mass point per line: ``amplitude prob`` or ``re im prob``."""
        out = io.StringIO()
        out.write(f"# phase_symmetric={'true' if self.phase_symmetric else 'false'}\n")
        for x, p in zip(self.points, self.probs):
            if self.phase_symmetric:
                out.write(f"{float(x)!r} {float(p)!r}\n")
            else:
                out.write(f"{float(x.real)!r} {float(x.imag)!r} {float(p)!r}\n")
        return out.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "InputDistribution":
        sym = None
        rows = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip().replace(" ", "")
                if body.startswith("phase_symmetric="):
                    sym = body.split("=", 1)[1].lower() in ("true", "1", "yes")
                continue
            try:
                rows.append([float(tok) for tok in line.split()])
            except ValueError as exc:
                raise InvalidParameterError(f"line {lineno}: {exc}") from None
        widths = {len(r) for r in rows}
        if not rows or len(widths) != 1 or widths.pop() not in (2, 3):
            raise InvalidParameterError("expected rows of 'amplitude prob' or 're im prob'")
        arr = np.array(rows)
        if arr.shape[1] == 2:
            return cls(arr[:, 0], arr[:, 1], True if sym is None else sym)
        return cls(arr[:, 0] + 1j * arr[:, 1], arr[:, 2], False if sym is None else sym)


class Regime(enum.Enum):
    FOURTH_MOMENT = "fourth-moment"
    PEAK_TO_AVERAGE = "par"
    FIXED_PEAK = "fixed-peak"
    AVERAGE_ONLY = "average-only"


@dataclass(frozen=True)
class ConstraintSet:
    """Average power ``p_av`` plus at most one higher-order limit.

    ``kappa`` bounds ``E|x|^4 <= kappa p_av^2`` (fourth-moment regime) or the
    peak-to-average ratio ``max|x|^2 <= kappa p_av``; ``nu`` is a fixed peak
    power independent of ``p_av``.
    """

    p_av: float
    regime: Regime = Regime.AVERAGE_ONLY
    kappa: Optional[float] = None
    nu: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.p_av) and self.p_av > 0):
            raise InvalidParameterError(f"average power must be positive, got {self.p_av}")
        if self.regime is Regime.FOURTH_MOMENT:
            if self.kappa is None or not self.kappa > 1:
                raise InvalidParameterError("fourth-moment regime needs kappa > 1")
        elif self.regime is Regime.PEAK_TO_AVERAGE:
            if self.kappa is None or not self.kappa >= 1:
                raise InvalidParameterError("peak-to-average regime needs kappa >= 1")
        elif self.regime is Regime.FIXED_PEAK:
            if self.nu is None or not (math.isfinite(self.nu) and self.nu > 0):
                raise InvalidParameterError("fixed-peak regime needs nu > 0")

    @classmethod
    def fourth_moment(cls, p_av, kappa):
        return cls(p_av, Regime.FOURTH_MOMENT, kappa=float(kappa))

    @classmethod
    def peak_to_average(cls, p_av, kappa):
        return cls(p_av, Regime.PEAK_TO_AVERAGE, kappa=float(kappa))

    @classmethod
    def fixed_peak(cls, p_av, nu):
        return cls(p_av, Regime.FIXED_PEAK, nu=float(nu))

    @classmethod
    def average_only(cls, p_av):
        return cls(p_av, Regime.AVERAGE_ONLY)

    def with_power(self, p_av: float) -> "ConstraintSet":
        return ConstraintSet(p_av, self.regime, self.kappa, self.nu)

    @property
    def fourth_bound(self) -> Optional[float]:
        return self.kappa * self.p_av**2 if self.regime is Regime.FOURTH_MOMENT else None

    @property
    def peak_bound(self) -> Optional[float]:
        if self.regime is Regime.PEAK_TO_AVERAGE:
            return self.kappa * self.p_av
        if self.regime is Regime.FIXED_PEAK:
            return self.nu
        return None


@dataclass(frozen=True)
class ConstraintReport:
    satisfied: bool
    average_slack: float
    fourth_slack: Optional[float] = None
    peak_slack: Optional[float] = None
    details: dict = field(default_factory=dict)


def check_constraints(d: InputDistribution, c: ConstraintSet, rtol: float = 1e-12) -> ConstraintReport:
    """Slack (bound minus attained value) of every active constraint."""
    e2, e4, peak = d.second_moment(), d.fourth_moment(), d.peak_power()
    avg = c.p_av - e2
    ok = avg >= -rtol * c.p_av
    fourth = peak_slack = None
    if c.fourth_bound is not None:
        fourth = c.fourth_bound - e4
        ok = ok and fourth >= -rtol * c.fourth_bound
    if c.peak_bound is not None:
        peak_slack = c.peak_bound - peak
        ok = ok and peak_slack >= -rtol * c.peak_bound
    return ConstraintReport(bool(ok), avg, fourth, peak_slack, {"second": e2, "fourth": e4, "peak": peak})


def _check_p(p):
    if not (0.0 < p <= 1.0):
        raise InvalidParameterError(f"on-probability must lie in (0, 1], got {p}")


def _with_off(points, probs, p, phase_symmetric):
    if p < 1.0:
        points = [0.0] + list(points)
        probs = [1.0 - p] + list(probs)
    return InputDistribution(points, probs, phase_symmetric)


def make_oobpsk(p_av: float, p: float) -> InputDistribution:
    """On-off keying with BPSK on the on-level: ``0`` w.p. ``1-p``, ``+-sqrt(p_av/p)`` w.p. ``p/2``."""
    _check_p(p)
    a = math.sqrt(p_av / p)
    return _with_off([a, -a], [p / 2, p / 2], p, False)


def make_ooqpsk(p_av: float, p: float) -> InputDistribution:
    """On-off keying with QPSK on the on-level at magnitude ``sqrt(p_av/p)``."""
    _check_p(p)
    a = math.sqrt(p_av / (2.0 * p))
    pts = [a * complex(sr, si) for sr in (1, -1) for si in (1, -1)]
    return _with_off(pts, [p / 4] * 4, p, False)


def make_ook(p_av: float, p: float) -> InputDistribution:
    """Phase-symmetric on-off keying: amplitude ``sqrt(p_av/p)`` w.p. ``p``."""
    _check_p(p)
    return _with_off([math.sqrt(p_av / p)], [p], p, True)


def make_ook_fixed_peak(p_av: float, nu: float) -> InputDistribution:
    """Two masses at ``0`` and the peak amplitude ``sqrt(nu)``."""
    if not (nu > 0 and p_av > 0):
        raise InvalidParameterError("powers must be positive")
    if p_av > nu:
        raise InvalidParameterError(f"average power {p_av} exceeds the peak {nu}")
    return make_ook(p_av, p_av / nu)


def make_two_mass(p_av: float, kappa: float) -> InputDistribution:
    """``{0: 1 - 1/kappa, sqrt(kappa p_av): 1/kappa}``, the fourth-moment extremal input."""
    if not kappa >= 1:
        raise InvalidParameterError("kappa must be >= 1")
    return make_ook(p_av, 1.0 / kappa)


def lemma_max_fourth_moment(p_av: float, kappa: float):
    """Largest ``E[a^4]`` for ``a`` in ``[0, sqrt(kappa p_av)]`` with ``E[a^2] <= p_av``.

    Returns ``(kappa * p_av**2, witness)``; see :func:`lemma_brute_force` for
    the independent grid check.
    """
    if not kappa >= 1:
        raise InvalidParameterError("kappa must be >= 1")
    return kappa * p_av**2, make_two_mass(p_av, kappa)


@dataclass(frozen=True)
class LemmaBruteForce:
    pair_value: float
    pair_witness: InputDistribution
    lp_value: float
    grid: np.ndarray


def lemma_brute_force(p_av: float, kappa: float, grid_points: int = 200) -> LemmaBruteForce:
    """Grid search for the fourth-moment supremum.

    Every two-point law on the grid is scanned (for a fixed pair the
    objective is linear in the split, so the best split sits on the average
    constraint or at an endpoint), and a linear program over all grid laws
    covers larger supports.
    """
    if not kappa >= 1:
        raise InvalidParameterError("kappa must be >= 1")
    a = np.linspace(0.0, math.sqrt(kappa * p_av), grid_points)
    a2 = a * a
    lo, hi = np.meshgrid(a2, a2, indexing="ij")  # lo <= hi on the upper triangle
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(hi <= p_av, 1.0, (p_av - lo) / (hi - lo))
    q = np.where(lo > p_av, np.nan, np.clip(q, 0.0, 1.0))
    val = q * hi**2 + (1.0 - q) * lo**2
    val = np.where(np.triu(np.ones_like(val, dtype=bool)) & np.isfinite(val), val, -np.inf)
    i, j = np.unravel_index(np.argmax(val), val.shape)
    if i == j or q[i, j] >= 1.0:
        witness = InputDistribution([a[j]], [1.0])
    else:
        witness = InputDistribution([a[i], a[j]], [1.0 - q[i, j], q[i, j]])
    res = linprog(
        -(a2**2),
        A_ub=a2[None, :],
        b_ub=[p_av],
        A_eq=np.ones((1, grid_points)),
        b_eq=[1.0],
        bounds=(0, None),
        method="highs",
    )
    if not res.success:  # pragma: no cover - the LP is always feasible (mass at 0)
        raise InfeasibleConstraintsError(res.message)
    return LemmaBruteForce(float(val[i, j]), witness, float(-res.fun), a)
