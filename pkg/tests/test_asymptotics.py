import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ricianlp.asymptotics import (
    LN2,
    SCHEMES,
    cddot_fixed_peak_quadrature,
    closed_form_cddot_fixed_peak,
    db,
    derivs_fourth_moment,
    derivs_oobpsk,
    derivs_ook_fixed_peak,
    derivs_ooqpsk,
    derivs_ooqpsk_fixed_peak,
    mi_derivatives,
    pair_overlap_closed_form,
    pair_overlap_quadrature,
    scheme_closed_form,
    scheme_input,
    summarize,
    summary_average_only,
    summary_fixed_peak,
    summary_fourth_moment_or_par,
    wideband_slope,
)
from ricianlp.channel import ChannelParams
from ricianlp.errors import InvalidParameterError
from ricianlp.numerics import bessel_i0, integrate_halfline
from ricianlp.channel import log_radial_kernel
from ricianlp.signaling import Regime

HALF = ChannelParams(m=math.sqrt(0.5), gamma_sq=0.5)


def peak_for(ch, eta):
    return eta * ch.n0 / ch.gamma_sq


# |m|^2 = gamma^2 = 0.5 gives gamma^4 = 0.25, so the curvature is kappa/4 - 1
@pytest.mark.parametrize("kappa, c2", [(4.0, 0.0), (5.0, 0.25), (2.0, -0.5)])
def test_fourth_moment_derivatives(kappa, c2):
    c1, cc = derivs_fourth_moment(HALF, kappa)
    assert c1 == pytest.approx(0.5)
    assert cc == pytest.approx(c2)


def test_rayleigh_first_derivative_vanishes():
    c1, c2 = derivs_fourth_moment(ChannelParams(m=0.0, gamma_sq=1.0), 3.0)
    assert c1 == 0.0 and c2 == pytest.approx(2.0)


@pytest.mark.parametrize("kappa", [1.0, 0.5, math.nan, math.inf])
def test_fourth_moment_kappa_validated(kappa):
    with pytest.raises(InvalidParameterError):
        derivs_fourth_moment(HALF, kappa)


def test_oobpsk_examples():
    assert derivs_oobpsk(HALF, 4.0) == pytest.approx((0.5, -0.25))
    ray = ChannelParams(m=0.0, gamma_sq=0.7)
    assert derivs_oobpsk(ray, 3.0) == pytest.approx((0.0, 3 * 0.49 - 0.49))


@pytest.mark.parametrize("K", [1.0, 2.0])
@pytest.mark.parametrize("kappa", [2.0, 4.0])
def test_ooqpsk_equals_fourth_moment(K, kappa):
    ch = ChannelParams.from_rician_factor(K)
    assert derivs_ooqpsk(ch, kappa) == derivs_fourth_moment(ch, kappa)
    q, b = derivs_ooqpsk(ch, kappa)[1], derivs_oobpsk(ch, kappa)[1]
    assert q - b == pytest.approx(ch.m_sq**2)


def test_scheme_slopes():
    ch = ChannelParams.from_rician_factor(1.0)
    q = wideband_slope(*derivs_ooqpsk(ch, 2.0))
    b = wideband_slope(*derivs_oobpsk(ch, 2.0))
    assert (b, q) == pytest.approx((2.0 / 3.0, 1.0))


def test_wideband_slope_conventions():
    assert wideband_slope(0.0, -1.0) == 0.0
    assert wideband_slope(0.5, -math.inf) == 0.0
    assert wideband_slope(0.5, 0.0) == math.inf
    assert wideband_slope(0.5, -0.5) == pytest.approx(1.0)
    assert wideband_slope(0.5, 0.5) == pytest.approx(-1.0)


def test_zero_rate_bit_energy_k1():
    s = summary_fourth_moment_or_par(ChannelParams.from_rician_factor(1.0), 2.0)
    assert s.ebn0_zero_se_db == pytest.approx(db(2 * LN2))
    assert s.ebn0_zero_se_db == pytest.approx(1.42, abs=5e-3)
    assert s.s0 == pytest.approx(1.0)
    assert math.isnan(s.ebn0_min_db)
    lo, hi = s.ebn0_min_bounds_db
    assert lo == pytest.approx(-1.5917, abs=1e-4) and hi == s.ebn0_zero_se_db


def test_large_k_approaches_wideband_limit():
    s = summary_fourth_moment_or_par(ChannelParams.from_rician_factor(100.0), 2.0)
    assert abs(s.ebn0_zero_se_db - db(LN2)) < 0.05


def test_rayleigh_summary():
    s = summary_fourth_moment_or_par(ChannelParams.from_rician_factor(0.0), 3.0)
    assert s.c_dot0 == 0.0
    assert s.ebn0_zero_se_db == math.inf
    assert s.s0 == 0.0


@pytest.mark.parametrize("K", [1.0, 2.0, 3.0])
@pytest.mark.parametrize("kappa", range(2, 13))
def test_sign_rule_and_published_slope(K, kappa):
    ch = ChannelParams.from_rician_factor(K)
    s = summary_fourth_moment_or_par(ch, float(kappa))
    denom = (1 + K) ** 2 - kappa
    if denom == 0:
        assert s.s0 == math.inf
        return
    assert (s.s0 < 0) == (kappa > (1 + K) ** 2)
    assert s.s0 == pytest.approx(2 * K**2 / denom, rel=1e-12)


def test_par_regime_shares_pair():
    ch = ChannelParams.from_rician_factor(2.0)
    a = summary_fourth_moment_or_par(ch, 1.0, Regime.PEAK_TO_AVERAGE)
    assert a.regime is Regime.PEAK_TO_AVERAGE
    assert a.c_ddot0 == pytest.approx(ch.gamma_sq**2 - 1.0)
    with pytest.raises(InvalidParameterError):
        summary_fourth_moment_or_par(ch, 1.0, Regime.FOURTH_MOMENT)
    with pytest.raises(InvalidParameterError):
        summary_fourth_moment_or_par(ch, 2.0, Regime.FIXED_PEAK)


def test_fixed_peak_rayleigh_eta_one():
    ch = ChannelParams.from_rician_factor(0.0)
    s = summary_fixed_peak(ch, peak_for(ch, 1.0))
    assert s.ebn0_min_db == pytest.approx(db(LN2 / (1 - LN2)))
    assert s.ebn0_min_db == pytest.approx(3.54, abs=5e-3)
    assert s.s0 == 0.0 and s.c_ddot0 == -math.inf


@pytest.mark.parametrize("K", [0.5, 1.0, 4.0])
def test_fixed_peak_small_eta_limits(K):
    ch = ChannelParams.from_rician_factor(K)
    s = summary_fixed_peak(ch, peak_for(ch, 1e-6))
    assert s.ebn0_min_db == pytest.approx(db((1 + 1 / K) * LN2), abs=1e-4)
    assert s.s0 == pytest.approx(2 * K**2 / (1 + K) ** 2, rel=1e-4)


def test_fixed_peak_large_peak():
    ch = ChannelParams.from_rician_factor(1.0)
    s = summary_fixed_peak(ch, peak_for(ch, 1e6))
    assert abs(s.ebn0_min_db - db(LN2)) < 0.01


@pytest.mark.parametrize("K", [0.0, 1.0, 2.0])
@pytest.mark.parametrize("eta", [0.2, 0.5, 0.8])
def test_fixed_peak_slope_consistent(K, eta):
    ch = ChannelParams.from_rician_factor(K)
    s = summary_fixed_peak(ch, peak_for(ch, eta))
    assert s.s0 == pytest.approx(2 * s.c_dot0**2 / -s.c_ddot0, rel=1e-12)


def test_cddot_examples():
    ch0 = ChannelParams.from_rician_factor(0.0)
    nu = peak_for(ch0, 0.5)
    assert closed_form_cddot_fixed_peak(ch0, nu) == pytest.approx(-((ch0.n0 / nu) ** 2) / 3.0)
    ch1 = ChannelParams.from_rician_factor(1.0)
    nu = peak_for(ch1, 0.5)
    scaled = -closed_form_cddot_fixed_peak(ch1, nu) * (nu / ch1.n0) ** 2
    assert scaled == pytest.approx(4 / 3 * math.exp(2 / 3) * bessel_i0(4 / 3) - 1)
    assert scaled == pytest.approx(2.886, abs=1e-3)
    assert closed_form_cddot_fixed_peak(ch1, peak_for(ch1, 1.0)) == -math.inf


@pytest.mark.parametrize("K", [0.0, 1.0, 2.0])
@pytest.mark.parametrize("eta", [0.2, 0.5, 0.8])
def test_cddot_closed_form_vs_quadrature(K, eta):
    ch = ChannelParams.from_rician_factor(K)
    nu = peak_for(ch, eta)
    assert cddot_fixed_peak_quadrature(ch, nu) == pytest.approx(closed_form_cddot_fixed_peak(ch, nu), rel=1e-6)


def test_average_only_summary():
    ch = ChannelParams.from_rician_factor(1.0)
    s = summary_average_only(ch)
    assert s.c_dot0 == pytest.approx(1.0) and s.c_ddot0 == -math.inf
    assert s.ebn0_min_db == pytest.approx(db(LN2)) and s.s0 == 0.0


def test_summarize_dispatch():
    ch = ChannelParams.from_rician_factor(1.0)
    assert summarize(ch, Regime.FIXED_PEAK, nu=1.0).regime is Regime.FIXED_PEAK
    assert summarize(ch, Regime.AVERAGE_ONLY).regime is Regime.AVERAGE_ONLY
    assert summarize(ch, Regime.PEAK_TO_AVERAGE, kappa=2.0).regime is Regime.PEAK_TO_AVERAGE
    row = summarize(ch, Regime.FOURTH_MOMENT, kappa=2.0).as_row()
    assert row["regime"] == "fourth-moment" and row["s0"] == pytest.approx(1.0)


def test_fourth_moment_bit_energy_bounds():
    for K in (0.5, 1.0, 3.0):
        s = summary_fourth_moment_or_par(ChannelParams.from_rician_factor(K), 2.0)
        lo, hi = s.ebn0_min_bounds_db
        assert lo == pytest.approx(db(LN2)) and hi == pytest.approx(db((1 + 1 / K) * LN2))


@pytest.mark.parametrize("K", [0.0, 1.5])
@pytest.mark.parametrize("eta", [0.3, 0.7, 1.0, 2.0])
def test_ooqpsk_fixed_peak_first_derivative(K, eta):
    ch = ChannelParams.from_rician_factor(K)
    nu = peak_for(ch, eta)
    assert derivs_ooqpsk_fixed_peak(ch, nu)[0] == pytest.approx(summary_fixed_peak(ch, nu).c_dot0)
    if eta >= 1:
        assert derivs_ooqpsk_fixed_peak(ch, nu)[1] == -math.inf


def _radial_B(eta, K):
    r = math.sqrt(eta)
    return integrate_halfline(lambda R: np.exp(R + 2.0 * log_radial_kernel(R, r, K))).value


@pytest.mark.parametrize("eta", [0.2, 0.5, 0.8])
def test_pair_overlap_diagonal_matches_radial_rayleigh(eta):
    ch = ChannelParams.from_rician_factor(0.0)
    x = math.sqrt(peak_for(ch, eta)) * complex(1, 1) / math.sqrt(2)
    assert pair_overlap_quadrature(ch, x, x) == pytest.approx(_radial_B(eta, 0.0), rel=1e-6)


@pytest.mark.parametrize("K", [1.0, 2.0])
@pytest.mark.parametrize("eta", [0.2, 0.5, 0.8])
def test_pair_overlap_quadrature_vs_gaussian_closed_form(K, eta):
    ch = ChannelParams.from_rician_factor(K)
    a = math.sqrt(peak_for(ch, eta) / 2)
    pts = [a * complex(sr, si) for sr in (1, -1) for si in (1, -1)]
    for xi in pts:
        for xj in pts:
            assert pair_overlap_quadrature(ch, xi, xj) == pytest.approx(pair_overlap_closed_form(ch, xi, xj), rel=1e-9)


def test_pair_overlap_diagonal_with_line_of_sight():
    # a fixed-phase point is not the phase-averaged radial law once K > 0
    K, eta = 1.0, 0.5
    ch = ChannelParams.from_rician_factor(K)
    x = complex(math.sqrt(peak_for(ch, eta)), 0.0)
    diag = pair_overlap_closed_form(ch, x, x)
    assert diag == pytest.approx(math.exp(2 * K * eta / (1 - eta)) / (1 - eta**2), rel=1e-12)
    assert diag > _radial_B(eta, K)


def test_pair_overlap_requires_equal_magnitude():
    with pytest.raises(InvalidParameterError):
        pair_overlap_closed_form(HALF, 1.0, 2.0)


def test_ooqpsk_fixed_peak_second_derivative_finite_below_unit_eta():
    ch = ChannelParams.from_rician_factor(1.0)
    assert math.isfinite(derivs_ooqpsk_fixed_peak(ch, peak_for(ch, 0.5))[1])


def test_scheme_helpers():
    ch = ChannelParams.from_rician_factor(1.0)
    for s in SCHEMES:
        d = scheme_input(s, 0.5, p=0.25, nu=2.0)
        assert d.second_moment() == pytest.approx(0.5)
        c1, _ = scheme_closed_form(s, ch, p=0.25, nu=2.0)
        assert math.isfinite(c1)
    with pytest.raises(InvalidParameterError):
        scheme_input("pam", 1.0, p=0.5)
    with pytest.raises(InvalidParameterError):
        scheme_closed_form("pam", ch, p=0.5)
    assert derivs_ook_fixed_peak(ch, 2.0)[0] == pytest.approx(summary_fixed_peak(ch, 2.0).c_dot0)


@pytest.mark.parametrize("scheme", ["ooqpsk", "oobpsk", "ook"])
@pytest.mark.parametrize("K, kappa", [(1.0, 2.0), (2.0, 2.0)])
def test_numeric_derivatives_match_closed_forms(scheme, K, kappa):
    ch = ChannelParams.from_rician_factor(K)
    est = mi_derivatives(scheme, ch, p=1 / kappa)
    c1, c2 = scheme_closed_form(scheme, ch, p=1 / kappa)
    assert est.d1 == pytest.approx(c1, rel=1e-4)
    assert est.d2 == pytest.approx(c2, rel=1e-3)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 20.0), st.floats(1.01, 50.0))
def test_ooqpsk_dominates_oobpsk(K, kappa):
    ch = ChannelParams.from_rician_factor(K)
    q, b = derivs_ooqpsk(ch, kappa)[1], derivs_oobpsk(ch, kappa)[1]
    assert q >= b
    assert q - b == pytest.approx(ch.m_sq**2, abs=1e-12)
