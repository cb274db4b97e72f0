import math

import numpy as np
import pytest

from ricianlp.asymptotics import LN2, db, summary_fixed_peak
from ricianlp.capacity import (
    STATUS_OK,
    STATUS_SCHEME,
    STATUS_UNCERTIFIED,
    CurvePoint,
    OptimizerConfig,
    _merge_closest,
    _tidy,
    estimate_wideband_slope,
    find_min_bit_energy,
    kt_check,
    log_grid,
    optimize_capacity,
    search_domain,
    sweep_curve,
    sweep_scheme,
    two_mass_threshold,
)
from ricianlp.channel import ChannelParams
from ricianlp.errors import InfeasibleConstraintsError, InsufficientDataError, InvalidParameterError
from ricianlp.mutual_info import mutual_information
from ricianlp.signaling import (
    ConstraintSet,
    InputDistribution,
    check_constraints,
    make_ook,
    make_ook_fixed_peak,
    make_ooqpsk,
)

K1 = ChannelParams.from_rician_factor(1.0)


@pytest.mark.parametrize(
    "kwargs",
    [{"max_points": 1}, {"tol": 0.0}, {"kt_tol": -1.0}, {"refine_rounds": -1}, {"kt_grid": 1}, {"amplitude_domain": 0.0}],
)
def test_config_validation(kwargs):
    with pytest.raises(InvalidParameterError):
        OptimizerConfig(**kwargs)


def test_log_grid():
    g = log_grid(1e-4, 10.0, 40)
    assert g.size == 201
    assert g[0] == pytest.approx(10.0) and g[-1] == pytest.approx(1e-4)
    assert np.all(np.diff(g) < 0)
    assert np.allclose(np.diff(np.log10(g)), -1 / 40)
    assert log_grid(0.5, 0.5, 10).tolist() == [0.5]
    for bad in [(0.0, 1.0, 10), (1.0, 0.5, 10), (1e-3, math.inf, 10), (1e-3, 1.0, 0)]:
        with pytest.raises(InvalidParameterError):
            log_grid(*bad)


def test_merge_closest_keeps_mass_and_power():
    p = np.array([0.5, 0.2, 0.25, 0.05])
    t = np.array([0.0, 1.0, 1.1, 3.0])
    q, u = _merge_closest(p, t)
    assert q.size == 3 and q.sum() == pytest.approx(1.0)
    assert np.dot(q, u) == pytest.approx(np.dot(p, t))
    assert np.dot(q, u**2) <= np.dot(p, t**2)


def test_tidy_merges_and_moves_dust():
    cfg = OptimizerConfig(merge_tol=1e-3, mass_floor=1e-8)
    p = np.array([0.5, 0.2, 0.3 - 1e-9, 1e-9])
    t = np.array([1e-9, 1.0, 1.0 + 1e-8, 2.0])
    d = _tidy(p, t, 1.0, cfg)
    assert len(d) == 2
    assert d.amplitudes[0] == 0.0
    assert d.probs.sum() == pytest.approx(1.0)
    assert d.probs[0] == pytest.approx(0.5 + 1e-9)
    assert d.amplitudes[1] ** 2 == pytest.approx(1.0 + 0.6e-8, rel=1e-9)


def test_search_domain_by_regime():
    assert search_domain(K1, ConstraintSet.fixed_peak(0.1, 2.0)) == 2.0
    assert search_domain(K1, ConstraintSet.peak_to_average(0.5, 3.0)) == pytest.approx(1.5)
    assert search_domain(K1, ConstraintSet.fourth_moment(1.0, 4.0)) == pytest.approx(16.0)
    assert search_domain(K1, ConstraintSet.fourth_moment(1e-3, 4.0)) == pytest.approx(4.0 * K1.n0 / K1.gamma_sq)
    cfg = OptimizerConfig(amplitude_domain=5.0)
    assert search_domain(K1, ConstraintSet.fixed_peak(0.1, 2.0), cfg) == 2.0
    assert search_domain(K1, ConstraintSet.average_only(1.0), cfg) == 5.0


@pytest.mark.parametrize("snr", [0.0, -1.0, math.nan, math.inf])
def test_optimize_rejects_bad_snr(snr):
    with pytest.raises(InfeasibleConstraintsError):
        optimize_capacity(K1, ConstraintSet.fourth_moment(1.0, 2.0), snr)


def test_fixed_peak_low_snr_is_on_off():
    nu = 1.0
    c = ConstraintSet.fixed_peak(1.0, nu)
    res = optimize_capacity(K1, c, 1e-3)
    d = res.distribution.pruned()
    assert res.status == STATUS_OK
    assert len(d) == 2 and d.amplitudes[0] == 0.0
    assert d.amplitudes[1] == pytest.approx(math.sqrt(nu), rel=1e-6)
    slope = summary_fixed_peak(K1, nu).c_dot0
    assert res.capacity / 1e-3 == pytest.approx(slope, rel=0.05)
    ook = mutual_information(make_ook_fixed_peak(1e-3 * K1.n0, nu), K1).value
    assert res.capacity >= ook - 1e-12


@pytest.mark.parametrize("K, kappa", [(1.0, 2.0), (2.0, 4.0)])
def test_fourth_moment_low_snr_beats_on_off(K, kappa):
    ch = ChannelParams.from_rician_factor(K)
    snr = 1e-2
    res = optimize_capacity(ch, ConstraintSet.fourth_moment(1.0, kappa), snr)
    p_av = snr * ch.n0
    assert check_constraints(res.distribution, ConstraintSet.fourth_moment(p_av, kappa), rtol=1e-9).satisfied
    assert res.capacity >= mutual_information(make_ook(p_av, 1 / kappa), ch).value - 1e-12
    # the fixed-phase constellation agrees with uniform phase to second order
    assert res.capacity >= mutual_information(make_ooqpsk(p_av, 1 / kappa), ch).value - 1e-6
    assert res.kt is not None and res.kt.certified


def test_average_only_beats_qpsk():
    snr = 0.1
    res = optimize_capacity(K1, ConstraintSet.average_only(1.0), snr)
    assert res.capacity >= mutual_information(make_ooqpsk(snr * K1.n0, 1.0), K1).value - 1e-9


def test_regime_ordering():
    snr, kappa = 0.5, 2.0
    avg = optimize_capacity(K1, ConstraintSet.average_only(1.0), snr).capacity
    fourth = optimize_capacity(K1, ConstraintSet.fourth_moment(1.0, kappa), snr).capacity
    par = optimize_capacity(K1, ConstraintSet.peak_to_average(1.0, kappa), snr).capacity
    tol = 1e-9
    assert avg >= fourth - tol >= par - 2 * tol


def test_kt_flags_suboptimal_input():
    c = ConstraintSet.fixed_peak(0.05, 1.0)
    bad = InputDistribution([0.0, 0.5], [0.8, 0.2])
    assert check_constraints(bad, c).satisfied
    rep = kt_check(bad, K1, c)
    assert not rep.certified and rep.max_violation > 1e-3


def test_kt_certifies_optimum_and_reports_entry_point():
    c = ConstraintSet.fourth_moment(1.0, 2.0)
    res = optimize_capacity(K1, c, 0.3)
    assert res.kt.certified and res.kt.max_violation <= 1e-4
    assert res.kt.lam2 >= 0 and res.kt.lam4 >= 0
    assert math.isfinite(res.kt.entering_amplitude)


def test_optimizer_deterministic():
    c = ConstraintSet.fourth_moment(1.0, 3.0)
    a = optimize_capacity(K1, c, 0.7, OptimizerConfig(seed=5))
    b = optimize_capacity(K1, c, 0.7, OptimizerConfig(seed=5))
    assert a.capacity == b.capacity
    assert a.distribution.to_text() == b.distribution.to_text()


def test_sweep_curve_small():
    c = ConstraintSet.fourth_moment(1.0, 2.0)
    grid = log_grid(1e-2, 1.0, 2)
    curve = sweep_curve(K1, c, grid)
    assert [p.snr for p in curve] == pytest.approx(grid.tolist())
    caps = [p.capacity_nats for p in curve]
    assert all(np.diff(caps) <= 0)
    assert all(p.status in (STATUS_OK, STATUS_UNCERTIFIED) for p in curve)
    assert all(p.spectral_eff_bits == pytest.approx(p.capacity_nats / LN2) for p in curve)
    assert two_mass_threshold(curve, kappa=2.0) >= 1e-2


@pytest.mark.parametrize("grid", [[], [1.0, math.nan], [0.1, 1.0], [1.0, 0.0]])
def test_sweep_curve_rejects_bad_grid(grid):
    with pytest.raises(InvalidParameterError):
        sweep_curve(K1, ConstraintSet.fourth_moment(1.0, 2.0), grid)


def test_sweep_scheme_tags_status():
    curve = sweep_scheme(K1, lambda p: make_ooqpsk(p, 0.5), [1.0, 0.1])
    assert [p.status for p in curve] == [STATUS_SCHEME] * 2
    assert curve[0].capacity_nats > curve[1].capacity_nats > 0


def test_curve_point_zero_capacity():
    p = CurvePoint.from_capacity(K1, 0.1, 0.0, STATUS_OK)
    assert p.ebn0_tx_db == math.inf and p.ebn0_rx_db == math.inf


def test_curve_point_received_offset():
    ch = ChannelParams.from_rician_factor(1.0, normalized=False)
    p = CurvePoint.from_capacity(ch, 0.1, 0.05, STATUS_OK)
    assert p.ebn0_rx_db - p.ebn0_tx_db == pytest.approx(db(ch.gain))
    assert p.ebn0_tx_db == pytest.approx(db(0.1 * LN2 / 0.05))


def _synthetic(c1, c2, snrs, ch=K1):
    return [CurvePoint.from_capacity(ch, s, c1 * s + 0.5 * c2 * s * s, STATUS_OK) for s in snrs]


def test_wideband_slope_on_synthetic_curve():
    c1, s0 = 0.5, 4.0 / 7.0
    c2 = -2 * c1**2 / s0
    curve = _synthetic(c1, c2, np.geomspace(1e-4, 0.1, 60))
    limit = db(LN2 / c1) + db(K1.gain)
    assert estimate_wideband_slope(curve, limit) == pytest.approx(s0, rel=0.05)


def test_wideband_slope_needs_data():
    curve = _synthetic(0.5, -1.0, [1e-3, 1e-2])
    with pytest.raises(InsufficientDataError):
        estimate_wideband_slope(curve, db(LN2 / 0.5))
    flat = [CurvePoint(s, 0.1, 0.1 / LN2, 0.0, 0.0, STATUS_OK) for s in (1e-3, 1e-2, 1e-1)]
    with pytest.raises(InsufficientDataError):
        estimate_wideband_slope(flat, 0.0)


def test_min_bit_energy_interior_and_edge():
    # C = s^2 / (1 + s^2): snr per nat (1 + s^2) / s is smallest at s = 1
    bowl = [CurvePoint.from_capacity(K1, s, s * s / (1 + s * s), STATUS_OK) for s in np.geomspace(1e-2, 10.0, 31)]
    res = find_min_bit_energy(bowl)
    assert res.interior and bowl[res.index].snr == pytest.approx(1.0)
    mono = _synthetic(0.5, -0.5, np.geomspace(1e-3, 1.0, 20))
    res = find_min_bit_energy(mono)
    assert not res.interior
    assert mono[res.index].snr == pytest.approx(1e-3)


def test_min_bit_energy_errors():
    with pytest.raises(InsufficientDataError):
        find_min_bit_energy([])
    with pytest.raises(InsufficientDataError):
        find_min_bit_energy([CurvePoint.from_capacity(K1, 0.1, math.nan, "failed")])


def test_min_bit_energy_single_point():
    res = find_min_bit_energy(_synthetic(0.5, -0.5, [0.1]))
    assert res.index == 0 and not res.interior


def test_received_offset_constant_along_sweep():
    ch = ChannelParams.from_rician_factor(2.0, normalized=False)
    curve = sweep_scheme(ch, lambda p: make_ooqpsk(p, 0.25), log_grid(1e-3, 1.0, 3))
    offsets = [p.ebn0_rx_db - p.ebn0_tx_db for p in curve]
    assert offsets == pytest.approx([db(ch.gain)] * len(curve))
