"""Capacity over finite-support phase-symmetric inputs, KT certificates and SNR sweeps.

The optimizer works on masses ``p_j`` and normalized powers ``t_j = a_j^2 / A``
where ``A`` is the amplitude-squared search domain of the regime. The mutual
information gradient is analytic:

    dI/dp_j = i(a_j) - 1,    dI/ds_j = p_j di/ds(s_j),

with ``i`` the marginal information density. SLSQP handles the simplex and
the moment constraints.
"""
import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.optimize import linprog, minimize

from . import kernels
from .asymptotics import LN2, db
from .channel import ChannelParams
from .errors import InfeasibleConstraintsError, InsufficientDataError, InvalidParameterError, RicianError
from .mutual_info import kl_component, marginal_information_density, mutual_information, radial_nodes
from .numerics.quadrature import QuadratureSpec
from .signaling import ConstraintSet, InputDistribution, Regime, check_constraints

log = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_UNCERTIFIED = "non-certified"
STATUS_FAILED = "failed"
STATUS_SCHEME = "scheme"
# a moment constraint within this relative slack counts as active in the KT check
BINDING_RTOL = 1e-3


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for :func:`optimize_capacity`.

    ``amplitude_domain`` is a fixed bound on ``|x|^2``; ``None`` picks one
    per regime (the peak where there is one, a multiple of the power
    otherwise).
    """

    max_points: int = 6
    amplitude_domain: Optional[float] = None
    n_starts: int = 3
    tol: float = 1e-12
    kt_tol: float = 1e-4
    kt_grid: int = 400
    merge_tol: float = 1e-4
    mass_floor: float = 1e-10
    maxiter: int = 200
    refine_rounds: int = 4
    seed: int = 0
    spec: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        if self.max_points < 2:
            raise InvalidParameterError("max_points must be >= 2")
        for name in ("tol", "kt_tol", "merge_tol", "mass_floor"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be positive")
        if self.refine_rounds < 0:
            raise InvalidParameterError("refine_rounds must be >= 0")
        if self.n_starts < 0 or self.kt_grid < 2 or self.maxiter < 1:
            raise InvalidParameterError("n_starts >= 0, kt_grid >= 2 and maxiter >= 1 required")
        if self.amplitude_domain is not None and not self.amplitude_domain > 0:
            raise InvalidParameterError("amplitude_domain must be positive")


@dataclass(frozen=True)
class KtReport:
    """Kuhn-Tucker certificate on a dense amplitude grid.

    ``max_violation`` is the smallest achievable worst excess of
    ``i(a) - lam2 a^2 - lam4 a^4`` over the support level ``c`` (with
    support points held to equality), in nats. ``entering_amplitude`` is
    where the excess peaks under multipliers fitted to the support alone.
    """

    max_violation: float
    certified: bool
    lam2: float
    lam4: float
    level: float
    worst_amplitude: float
    entering_amplitude: float = math.nan


@dataclass(frozen=True)
class OptimizationResult:
    distribution: InputDistribution
    capacity: float
    kt: Optional[KtReport]
    status: str
    message: str = ""


def search_domain(ch: ChannelParams, c: ConstraintSet, cfg: Optional[OptimizerConfig] = None) -> float:
    """Largest ``|x|^2`` the optimizer may place mass at."""
    if cfg is not None and cfg.amplitude_domain is not None:
        dom = cfg.amplitude_domain
        if c.peak_bound is not None:
            dom = min(dom, c.peak_bound)
        return dom
    floor = ch.n0 / ch.gamma_sq
    if c.regime is Regime.FOURTH_MOMENT:
        return max(4.0 * c.kappa * c.p_av, 4.0 * floor)
    if c.regime in (Regime.PEAK_TO_AVERAGE, Regime.FIXED_PEAK):
        return c.peak_bound
    return 40.0 * max(c.p_av, floor)


def power_unit(ch: ChannelParams, c: ConstraintSet) -> float:
    """Typical on-level power; optimizer variables are powers in this unit."""
    if c.regime in (Regime.FOURTH_MOMENT, Regime.PEAK_TO_AVERAGE):
        return c.kappa * c.p_av
    if c.regime is Regime.FIXED_PEAK:
        return c.nu
    return max(c.p_av, ch.n0 / ch.gamma_sq)


class _Problem:
    """Objective, gradient and constraints in the variables ``(p, t)``.

    ``t_j = a_j^2 / T`` with ``T`` from :func:`power_unit`, bounded by ``A / T``.
    """

    def __init__(self, ch, c, A, spec):
        self.ch, self.c, self.A = ch, c, A
        self.T = power_unit(ch, c)
        self.tmax = A / self.T
        self.K = ch.rician_factor
        self.sT = ch.gamma_sq * self.T / ch.n0
        # one node set for the whole run keeps the objective smooth
        self.R, self.w = radial_nodes(ch.gamma_sq * A / ch.n0, self.K, spec)
        self.scale = c.p_av / ch.n0 * ch.gain

    def bounds(self, n):
        return [(0.0, 1.0)] * n + [(0.0, self.tmax)] * n

    def split(self, x):
        n = x.size // 2
        return np.clip(x[:n], 0.0, 1.0), np.clip(x[n:], 0.0, self.tmax)

    def mi_and_grad(self, x):
        p, t = self.split(x)
        s = np.ascontiguousarray(self.sT * t)
        p = np.ascontiguousarray(p)
        div, val, grad = kernels.mixture_mi_terms(self.R, self.w, s, p, self.K)
        kl = kl_component(s, self.K)
        mi = float(np.dot(p, kl)) - div
        dens = kl - val
        dds = (1.0 + self.K) - 1.0 / (1.0 + s) - grad
        return mi, np.concatenate([dens - 1.0, p * dds * self.sT])

    def fun(self, x):
        mi, g = self.mi_and_grad(x)
        return -mi / self.scale, -g / self.scale

    def constraints(self, n):
        c = self.c
        cons = [{
            "type": "eq",
            "fun": lambda x: np.sum(x[:n]) - 1.0,
            "jac": lambda x: np.concatenate([np.ones(n), np.zeros(n)]),
        }]
        k2 = self.T / c.p_av
        cons.append({
            "type": "ineq",
            "fun": lambda x: 1.0 - k2 * np.dot(x[:n], x[n:]),
            "jac": lambda x: -k2 * np.concatenate([x[n:], x[:n]]),
        })
        if c.regime is Regime.FOURTH_MOMENT:
            k4 = self.T**2 / (c.kappa * c.p_av**2)
            cons.append({
                "type": "ineq",
                "fun": lambda x: 1.0 - k4 * np.dot(x[:n], x[n:] ** 2),
                "jac": lambda x: -k4 * np.concatenate([x[n:] ** 2, 2.0 * x[:n] * x[n:]]),
            })
        return cons


def _shrink_to_feasible(p, t, T, c):
    """Move mass from the nonzero points to zero until every constraint holds."""
    alpha = 1.0
    m2 = T * np.dot(p, t)
    if m2 > c.p_av:
        alpha = min(alpha, c.p_av / m2)
    if c.regime is Regime.FOURTH_MOMENT:
        m4 = T**2 * np.dot(p, t**2)
        if m4 > c.kappa * c.p_av**2:
            alpha = min(alpha, c.kappa * c.p_av**2 / m4)
    if alpha >= 1.0:
        return p, t
    alpha *= 1.0 - 1e-12
    on = t > 0
    p = np.where(on, p * alpha, p)
    zero = np.flatnonzero(~on)
    if zero.size:
        p[zero[0]] += 1.0 - p.sum()
    else:
        p = np.append(p, 1.0 - p.sum())
        t = np.append(t, 0.0)
    return p, t


def _pad(p, t, n, tmax, rng):
    if p.size > n:
        keep = np.argsort(-p)[:n]
        p, t = p[keep], t[keep]
        p = p / p.sum()
    extra = n - p.size
    if extra:
        p = np.concatenate([p, np.zeros(extra)])
        t = np.concatenate([t, rng.uniform(0.05, 1.0, extra) * min(1.0, tmax)])
    return p, t


def _merge_closest(p, t):
    """Merge the two nearest points, keeping mass and second moment (the fourth moment can only drop)."""
    order = np.argsort(t)
    p, t = p[order], t[order]
    i = int(np.argmin(np.diff(t)))
    tot = p[i] + p[i + 1]
    merged = (p[i] * t[i] + p[i + 1] * t[i + 1]) / tot if tot > 0 else t[i]
    p = np.concatenate([p[:i], [tot], p[i + 2:]])
    t = np.concatenate([t[:i], [merged], t[i + 2:]])
    return p, t


def _start_two_mass(c, A, T):
    if c.regime is Regime.FIXED_PEAK:
        peak = min(c.nu, A)
    elif c.regime in (Regime.FOURTH_MOMENT, Regime.PEAK_TO_AVERAGE):
        peak = min(c.kappa * c.p_av, A)
    else:
        peak = A
    q = min(1.0, c.p_av / peak)
    return np.array([1.0 - q, q]), np.array([0.0, peak / T])


def _starts(c, A, T, cfg, rng, warm):
    out = [_start_two_mass(c, A, T)]
    tmax = A / T
    if c.regime is Regime.AVERAGE_ONLY:
        for level in np.geomspace(c.p_av, A, 5)[1:-1]:
            out.append((np.array([1.0 - c.p_av / level, c.p_av / level]), np.array([0.0, level / T])))
    if warm is not None:
        amps2 = np.asarray(warm.amplitudes) ** 2
        ratio = c.p_av / max(warm.second_moment(), 1e-300)
        for factor in (ratio, 1.0):
            t = np.clip(amps2 * factor / T, 0.0, tmax)
            out.append(_shrink_to_feasible(np.array(warm.probs, dtype=float), t, T, c))
    for _ in range(cfg.n_starts):
        k = int(rng.integers(2, cfg.max_points + 1))
        t = np.concatenate([[0.0], rng.uniform(0.0, tmax, k - 1)])
        p = rng.dirichlet(np.ones(k))
        out.append(_shrink_to_feasible(p, t, T, c))
    return out


def _tidy(p, t, T, cfg):
    """Merge near-coincident points (keeping the second moment) and drop dust."""
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    a = np.sqrt(T * t)
    order = np.argsort(a)
    a, p = a[order], p[order]
    merged_a, merged_p = [a[0]], [p[0]]
    for ai, pi in zip(a[1:], p[1:]):
        if ai - merged_a[-1] < cfg.merge_tol:
            tot = merged_p[-1] + pi
            if tot > 0:
                merged_a[-1] = math.sqrt((merged_p[-1] * merged_a[-1] ** 2 + pi * ai**2) / tot)
            merged_p[-1] = tot
        else:
            merged_a.append(ai)
            merged_p.append(pi)
    a, p = np.array(merged_a), np.array(merged_p)
    if a[0] < cfg.merge_tol and a[0] > 0 and p[0] > 0:
        # a point this close to zero is the zero point
        a[0] = 0.0
    dust = p < cfg.mass_floor
    if dust.any() and not dust.all():
        moved = p[dust].sum()
        p = p[~dust]
        a = a[~dust]
        # to the zero point if there is one, else the weakest point
        p[0] += moved
    return InputDistribution(a, p / p.sum(), phase_symmetric=True)


def kt_check(d: InputDistribution, ch: ChannelParams, c: ConstraintSet, cfg: Optional[OptimizerConfig] = None) -> KtReport:
    """Certify ``d`` against the Kuhn-Tucker conditions on an amplitude grid.

    Solves a small linear program for the multipliers ``lam2, lam4 >= 0``
    (zero when their constraint is slack) and the level ``c`` minimizing the
    worst violation; support points must sit on the level.
    """
    cfg = cfg or OptimizerConfig()
    d = d.pruned()
    A = search_domain(ch, c, cfg)
    amax = math.sqrt(max(A, float(np.max(d.amplitudes)) ** 2))
    grid = np.linspace(0.0, amax, cfg.kt_grid)
    support = d.amplitudes
    dens_grid = marginal_information_density(grid, d, ch, cfg.spec)
    dens_sup = marginal_information_density(support, d, ch, cfg.spec)
    rep = check_constraints(d, c)
    scale = ch.gain * c.p_av / ch.n0
    lam2_free = rep.average_slack <= BINDING_RTOL * c.p_av
    lam4_free = rep.fourth_slack is not None and rep.fourth_slack <= BINDING_RTOL * c.fourth_bound
    # unknowns lam2 P, lam4 P^2, level and worst violation v, in units of ``scale``
    g2, s2 = grid**2 / c.p_av, support**2 / c.p_av
    rows, rhs = [], []
    for u, dv in zip(g2, dens_grid):
        rows.append([-u, -u * u, -1.0, -1.0])
        rhs.append(-dv)
    for u, dv in zip(s2, dens_sup):
        rows.append([u, u * u, 1.0, -1.0])
        rhs.append(dv)
    bounds = [
        (0, None) if lam2_free else (0, 0),
        (0, None) if lam4_free else (0, 0),
        (None, None),
        (0, None),
    ]
    res = linprog([0, 0, 0, 1.0], A_ub=np.array(rows), b_ub=np.array(rhs) / scale, bounds=bounds, method="highs")
    if not res.success:  # pragma: no cover - LP with a free slack variable is always feasible
        return KtReport(math.inf, False, math.nan, math.nan, math.nan, math.nan)
    l2, l4, level, _ = res.x * scale
    resid = dens_grid - l2 * g2 - l4 * g2**2 - level
    viol = max(float(np.max(resid)), float(np.max(np.abs(dens_sup - l2 * s2 - l4 * s2**2 - level))))
    worst = float(grid[int(np.argmax(resid))])
    # multipliers fitted to the support alone point at where mass should enter
    k = len(s2)
    sup = linprog([0, 0, 0, 1.0], A_ub=np.array(rows[-k:] + [[-u, -u * u, -1.0, -1.0] for u, dv in zip(s2, dens_sup)]),
                  b_ub=np.concatenate([dens_sup, -dens_sup]) / scale, bounds=bounds, method="highs")
    entering = worst
    if sup.success:
        m2, m4, lev, _ = sup.x * scale
        entering = float(grid[int(np.argmax(dens_grid - m2 * g2 - m4 * g2**2 - lev))])
    return KtReport(viol, viol <= cfg.kt_tol, l2 / c.p_av, l4 / c.p_av**2, level, worst, entering)


def optimize_capacity(
    ch: ChannelParams,
    c: ConstraintSet,
    snr: float,
    cfg: Optional[OptimizerConfig] = None,
    warm: Optional[InputDistribution] = None,
    rng: Optional[np.random.Generator] = None,
) -> OptimizationResult:
    """Maximize the mutual information over phase-symmetric inputs.

    Parameters
    ----------
    ch : ChannelParams
    c : ConstraintSet
        Its average power is replaced by ``snr * n0``.
    snr : float
    cfg : OptimizerConfig, optional
    warm : InputDistribution, optional
        Previous solution; it is rescaled to the new power and used as a start.

    Returns
    -------
    OptimizationResult
        The best input found, its capacity (nats), and a KT report.

    Raises
    ------
    InfeasibleConstraintsError
        If ``snr`` is not positive and finite.
    """
    cfg = cfg or OptimizerConfig()
    if not (math.isfinite(snr) and snr > 0):
        raise InfeasibleConstraintsError(f"snr must be positive and finite, got {snr}")
    c = c.with_power(snr * ch.n0)
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    A = search_domain(ch, c, cfg)
    prob = _Problem(ch, c, A, cfg.spec)
    T = prob.T
    scored = []
    for p0, t0 in _starts(c, A, T, cfg, rng, warm):
        d = _solve(prob, p0, t0, cfg.max_points, cfg, rng)
        scored.append((mutual_information(d, ch, cfg.spec).value, d))
    best_mi = max(s[0] for s in scored)
    near = [s for s in scored if s[0] >= best_mi - cfg.tol * max(1.0, prob.scale) - 1e-15]
    mi, d = min(near, key=lambda s: (len(s[1]), -s[0]))
    kt = kt_check(d, ch, c, cfg)
    for _ in range(cfg.refine_rounds):
        if kt.certified:
            break
        # add a light point where the KT condition is most violated
        p0 = np.append(np.asarray(d.probs, float) * (1.0 - 1e-3), 1e-3)
        t0 = np.append(np.asarray(d.amplitudes, float) ** 2, kt.entering_amplitude**2) / T
        p0, t0 = _shrink_to_feasible(p0, t0, T, c)
        while p0.size > cfg.max_points:
            p0, t0 = _merge_closest(p0, t0)
        d_new = _solve(prob, p0, t0, cfg.max_points, cfg, rng)
        mi_new = mutual_information(d_new, ch, cfg.spec).value
        if mi_new <= mi:
            break
        mi, d = mi_new, d_new
        kt = kt_check(d, ch, c, cfg)
    status = STATUS_OK if kt.certified else STATUS_UNCERTIFIED
    return OptimizationResult(d, mi, kt, status)


def _solve(prob, p0, t0, n, cfg, rng):
    """One SLSQP run from ``(p0, t0)`` padded to ``n`` points; falls back to the start."""
    p0, t0 = _pad(np.asarray(p0, float), np.asarray(t0, float), n, prob.tmax, rng)
    x0 = np.concatenate([p0, t0])
    base = -prob.fun(x0)[0]
    with warnings.catch_warnings():
        # SLSQP clips its own line-search steps to the bounds; nothing to report
        warnings.filterwarnings("ignore", "Values in x were outside bounds", RuntimeWarning)
        res = minimize(
            prob.fun, x0, jac=True, method="SLSQP", bounds=prob.bounds(n),
            constraints=prob.constraints(n), options={"maxiter": cfg.maxiter, "ftol": cfg.tol},
        )
    p, t = prob.split(res.x)
    d = _tidy(p, t, prob.T, cfg)
    if not check_constraints(d, prob.c, rtol=1e-9).satisfied or -res.fun < base:
        log.debug("start rejected (%s); keeping its initial point", res.message)
        d = _tidy(p0, t0, prob.T, cfg)
    return d


@dataclass(frozen=True)
class CurvePoint:
    snr: float
    capacity_nats: float
    spectral_eff_bits: float
    ebn0_tx_db: float
    ebn0_rx_db: float
    status: str
    distribution: Optional[InputDistribution] = field(default=None, compare=False, repr=False)
    kt: Optional[KtReport] = field(default=None, compare=False, repr=False)

    CSV_FIELDS = ("snr", "capacity_nats", "spectral_eff_bits", "ebn0_tx_db", "ebn0_rx_db", "status")

    @classmethod
    def from_capacity(cls, ch: ChannelParams, snr: float, capacity: float, status: str, distribution=None, kt=None):
        bits = capacity / LN2
        if bits > 0:
            tx = db(snr / bits)
            rx = tx + db(ch.gain)
        else:
            tx = rx = math.inf
        return cls(snr, capacity, bits, tx, rx, status, distribution, kt)


def log_grid(snr_min: float = 1e-4, snr_max: float = 10.0, points_per_decade: int = 40) -> np.ndarray:
    """Decreasing logarithmic SNR grid including both ends."""
    if not (0 < snr_min <= snr_max) or not math.isfinite(snr_max):
        raise InvalidParameterError("need 0 < snr_min <= snr_max < inf")
    if points_per_decade < 1:
        raise InvalidParameterError("points_per_decade must be >= 1")
    decades = math.log10(snr_max / snr_min)
    n = max(1, int(round(decades * points_per_decade))) + 1
    return np.logspace(math.log10(snr_max), math.log10(snr_min), n) if snr_max > snr_min else np.array([snr_min])


def sweep_curve(
    ch: ChannelParams,
    c: ConstraintSet,
    snr_grid: Sequence[float],
    cfg: Optional[OptimizerConfig] = None,
    progress: Optional[Callable[[int, float], None]] = None,
) -> List[CurvePoint]:
    """Optimize capacity along a decreasing SNR grid with warm starts.

    Failures are recorded in the status tag. A final pass in increasing SNR
    replaces any point whose capacity falls below a lower-SNR optimum, which
    stays feasible at higher power, so capacity never decreases with SNR.
    """
    cfg = cfg or OptimizerConfig()
    grid = np.asarray(snr_grid, dtype=float)
    if grid.size == 0 or np.any(~np.isfinite(grid)) or np.any(grid <= 0):
        raise InvalidParameterError("SNR grid must be nonempty, finite and positive")
    if np.any(np.diff(grid) > 0):
        raise InvalidParameterError("SNR grid must be decreasing")
    seeds = np.random.SeedSequence(cfg.seed).spawn(grid.size)
    results: List[Optional[OptimizationResult]] = []
    warm = None
    for k, snr in enumerate(grid):
        if progress:
            progress(k, float(snr))
        try:
            res = optimize_capacity(ch, c, float(snr), cfg, warm=warm, rng=np.random.default_rng(seeds[k]))
            warm = res.distribution
        except RicianError as exc:
            res = OptimizationResult(None, math.nan, None, f"{STATUS_FAILED}: {exc}")
        results.append(res)
    # increasing SNR pass: index -1 is the lowest SNR
    for k in range(grid.size - 2, -1, -1):
        lower, here = results[k + 1], results[k]
        if lower.distribution is None:
            continue
        if here.distribution is None or here.capacity < lower.capacity:
            cset = c.with_power(grid[k] * ch.n0)
            kt = kt_check(lower.distribution, ch, cset, cfg)
            results[k] = OptimizationResult(
                lower.distribution, lower.capacity, kt, STATUS_OK if kt.certified else STATUS_UNCERTIFIED
            )
    return [
        CurvePoint.from_capacity(ch, float(snr), r.capacity, r.status, r.distribution, r.kt)
        for snr, r in zip(grid, results)
    ]


def sweep_scheme(ch: ChannelParams, make_input: Callable[[float], InputDistribution], snr_grid, spec=None) -> List[CurvePoint]:
    """Curve of a fixed signaling scheme; ``make_input`` maps ``P_av`` to an input."""
    out = []
    for snr in np.asarray(snr_grid, dtype=float):
        try:
            mi = mutual_information(make_input(float(snr) * ch.n0), ch, spec).value
            out.append(CurvePoint.from_capacity(ch, float(snr), mi, STATUS_SCHEME))
        except RicianError as exc:
            out.append(CurvePoint.from_capacity(ch, float(snr), math.nan, f"{STATUS_FAILED}: {exc}"))
    return out


def two_mass_threshold(curve: Sequence[CurvePoint], kappa: Optional[float] = None, rtol: float = 1e-3) -> float:
    """Largest grid SNR below which every optimum is ``{0, single on-level}``.

    With ``kappa`` the on-level must also carry probability ``1/kappa``.
    Returns NaN when even the lowest grid point is not of that form.
    """
    pts = sorted((p for p in curve if p.distribution is not None), key=lambda p: p.snr)
    best = math.nan
    for p in pts:
        d = p.distribution.pruned()
        ok = len(d) == 2 and d.amplitudes.min() == 0.0
        if ok and kappa is not None:
            ok = abs(d.probs[d.amplitudes > 0][0] * kappa - 1.0) <= rtol
        if not ok:
            break
        best = p.snr
    return best


def estimate_wideband_slope(
    curve: Sequence[CurvePoint],
    ebn0_limit_db: float,
    window_db: float = 1.5,
    received: bool = True,
) -> float:
    """Slope in bits/s/Hz per 3 dB of capacity against bit energy near its limit.

    Fits ``C = alpha x + beta x^2`` with ``x = Eb/N0 (dB) - ebn0_limit_db`` to
    the points within ``window_db`` of the limit and returns
    ``alpha * 10 log10(2)``.

    Raises
    ------
    InsufficientDataError
        With fewer than three points in the window or a flat curve.
    """
    eb = np.array([p.ebn0_rx_db if received else p.ebn0_tx_db for p in curve], dtype=float)
    cb = np.array([p.spectral_eff_bits for p in curve], dtype=float)
    ok = np.isfinite(eb) & np.isfinite(cb) & (np.abs(eb - ebn0_limit_db) <= window_db)
    if np.count_nonzero(ok) < 3:
        raise InsufficientDataError("need at least three points near the bit-energy limit")
    x, y = eb[ok] - ebn0_limit_db, cb[ok]
    if np.ptp(y) <= 1e-12 * max(np.max(np.abs(y)), 1e-300) or np.ptp(x) == 0:
        raise InsufficientDataError("curve shows no variation near the limit")
    coef, *_ = np.linalg.lstsq(np.column_stack([x, x * x]), y, rcond=None)
    return float(coef[0] * db(2.0))


@dataclass(frozen=True)
class MinBitEnergy:
    ebn0_min_db: float
    c_star_bits: float
    interior: bool
    index: int


def find_min_bit_energy(curve: Sequence[CurvePoint]) -> MinBitEnergy:
    """Grid minimum of the received bit energy and whether it is interior.

    Interior means the minimizing point has a larger spectral efficiency
    than the smallest one on the grid.
    """
    if not curve:
        raise InsufficientDataError("empty curve")
    eb = np.array([p.ebn0_rx_db for p in curve], dtype=float)
    cb = np.array([p.spectral_eff_bits for p in curve], dtype=float)
    usable = np.isfinite(eb) & np.isfinite(cb)
    if not usable.any():
        raise InsufficientDataError("no finite curve points")
    idx = int(np.flatnonzero(usable)[np.argmin(eb[usable])])
    interior = bool(cb[idx] > np.min(cb[usable]))
    return MinBitEnergy(float(eb[idx]), float(cb[idx]), interior, idx)
