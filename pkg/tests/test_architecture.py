import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sharray import (ArchitectureConfig, ChannelControls, InvalidControl, InvalidParameter, Kind,
                     beam_map, channel_weights, gain_report, make_comb, make_square, phase_profile,
                     required_bandwidths, shifted_copy, validate_bandwidth, wrap_phase)
from sharray.architecture import steering_sine

from conftest import F_HM, F_RF, make_cfg


def test_kind_parse():
    assert Kind.parse("HMJPTA3") is Kind.HMJPTA3
    assert Kind.parse(Kind.TMA) is Kind.TMA
    with pytest.raises(InvalidParameter):
        Kind.parse("phased")


def test_wrap_phase_range():
    x = np.array([-math.pi, math.pi, 3 * math.pi, -3 * math.pi + 1e-3, 0.0, 7.0])
    w = wrap_phase(x)
    assert np.all(w > -math.pi) and np.all(w <= math.pi)
    assert w[0] == pytest.approx(math.pi)
    np.testing.assert_allclose(np.exp(1j * w), np.exp(1j * x), atol=1e-12)


def test_config_validation(comb5, square4):
    with pytest.raises(InvalidParameter):
        make_cfg("hma", 0, comb5)
    with pytest.raises(InvalidParameter):
        make_cfg("hma", 4, comb5, spacing_d=0)
    with pytest.raises(InvalidParameter):
        make_cfg("tma", 8, square4)       # duty must be 1/N
    with pytest.raises(InvalidParameter):
        make_cfg("tma", 5, comb5)
    make_cfg("tma", 4, square4)


def test_config_round_trip(comb5):
    cfg = make_cfg("hmjpta3", 8, comb5, f_bw=1e8, f_tr=2e7)
    back = ArchitectureConfig.from_dict(cfg.to_dict())
    assert back.to_dict() == cfg.to_dict()


def test_controls_round_trip():
    ctl = ChannelControls(d_tau=-5e-10, d_phi_rf=0.1, d_phi_lo=4.7)
    assert ChannelControls.from_dict(ctl.to_dict()) == ctl


@pytest.mark.parametrize("kind,ctl", [
    ("hma", ChannelControls(d_phi_rf=0.1)),
    ("hma", ChannelControls(d_phi_lo=0.1)),
    ("hmjpta2", ChannelControls(d_phi_lo=0.2)),
])
def test_unsupported_controls(comb5, kind, ctl):
    with pytest.raises(InvalidControl):
        phase_profile(make_cfg(kind, 4, comb5), ctl)


def test_tma_controls_fixed(square4):
    cfg = make_cfg("tma", 4, square4)
    fixed = cfg.fixed_controls()
    assert fixed.d_tau == pytest.approx(1 / (4 * F_HM))
    for ctl in (None, ChannelControls(), fixed):
        np.testing.assert_array_equal(phase_profile(cfg, ctl).d_phi, phase_profile(cfg).d_phi)
    with pytest.raises(InvalidControl):
        phase_profile(cfg, ChannelControls(d_tau=1e-12))


def test_hma_profile(comb5):
    cfg = make_cfg("hma", 8, comb5)
    tau = 0.1 / F_HM
    prof = phase_profile(cfg, ChannelControls(d_tau=tau))
    np.testing.assert_allclose(prof.d_phi, 2 * math.pi * np.arange(-2, 3) * 0.1, rtol=1e-12)
    np.testing.assert_allclose(prof.f_m, F_RF + np.arange(-2, 3) * F_HM)


def test_hmjpta2_profile(comb5):
    cfg = make_cfg("hmjpta2", 8, comb5)
    prof = phase_profile(cfg, ChannelControls(d_tau=0.05 / F_HM, d_phi_rf=0.4))
    np.testing.assert_allclose(prof.d_phi, 2 * math.pi * np.arange(-2, 3) * 0.05 + 0.4)


def test_hmjpta3_profile_sign_flip(comb5):
    cfg = make_cfg("hmjpta3", 8, comb5)
    phi_lo, phi_rf = 0.7, 0.2
    prof = phase_profile(cfg, ChannelControls(d_phi_rf=phi_rf, d_phi_lo=phi_lo))
    assert prof.at(0) == pytest.approx(phi_rf)
    assert prof.at(1) == pytest.approx(phi_rf + phi_lo)
    assert prof.at(2) == pytest.approx(phi_rf + phi_lo)
    assert prof.at(-1) == pytest.approx(phi_rf - phi_lo)
    assert prof.at(-2) == pytest.approx(phi_rf - phi_lo)


def test_hmjpta3_ttd_sees_output_frequency(comb5):
    cfg = make_cfg("hmjpta3", 8, comb5)
    tau = 3e-12
    prof = phase_profile(cfg, ChannelControls(d_tau=tau))
    np.testing.assert_allclose(prof.d_phi, 2 * math.pi * (F_RF + np.arange(-2, 3) * F_HM) * tau)


@settings(max_examples=50, deadline=None)
@given(st.floats(-1e-9, 1e-9), st.floats(0, 2 * math.pi))
def test_hmjpta3_minus_hmjpta2_is_constant(tau, phi_rf):
    w = make_comb(range(-3, 4), 1.0, f_hm=F_HM)
    ctl = ChannelControls(d_tau=tau, d_phi_rf=phi_rf)
    p2 = phase_profile(make_cfg("hmjpta2", 4, w), ctl).d_phi
    p3 = phase_profile(make_cfg("hmjpta3", 4, w), ctl).d_phi
    diff = p3 - p2
    np.testing.assert_allclose(diff, 2 * math.pi * F_RF * tau, rtol=1e-9, atol=1e-9)


def test_channel_weights_match_advanced_copy(comb5):
    cfg = make_cfg("hma", 4, comb5)
    tau = 0.13 / F_HM
    for n in range(4):
        cw = channel_weights(cfg, ChannelControls(d_tau=tau), n)
        ref = shifted_copy(comb5, n, -tau)
        np.testing.assert_allclose(cw.coeffs, ref.coeffs, rtol=1e-12, atol=1e-15)
    with pytest.raises(InvalidParameter):
        channel_weights(cfg, None, 4)


def test_tma_equals_hma_square():
    w = make_square(1 / 8, f_hm=F_HM)
    tma = make_cfg("tma", 8, w)
    hma = make_cfg("hma", 8, w)
    ctl = ChannelControls(d_tau=1 / (8 * F_HM))
    a, b = beam_map(tma), beam_map(hma, ctl)
    np.testing.assert_array_equal(a.d_phi_wrapped, b.d_phi_wrapped)
    np.testing.assert_array_equal(a.theta_deg, b.theta_deg)
    ga, gb = gain_report(tma), gain_report(hma, ctl)
    np.testing.assert_array_equal(ga.g_sig, gb.g_sig)
    np.testing.assert_array_equal(ga.g_noise, gb.g_noise)


def test_tma_profile_values():
    cfg = make_cfg("tma", 4, make_square(0.25, f_hm=F_HM))
    bm = beam_map(cfg, harmonics=[-1, 0, 1, 2])
    # d_phi = 2*pi*m/4; sin(theta) = m/2 for d = 1/2
    np.testing.assert_allclose(bm.d_phi_wrapped[:3], [-math.pi / 2, 0, math.pi / 2])
    # m = 2 lands on the wrap boundary; either endfire is the same beam
    assert abs(bm.d_phi_wrapped[3]) == pytest.approx(math.pi)
    assert bm.theta(0) == pytest.approx(0.0)
    assert bm.theta(1) == pytest.approx(30.0)
    assert bm.theta(-1) == pytest.approx(-30.0)
    assert abs(bm.theta(2)) == pytest.approx(90.0)


def test_beam_map_invisible(comb5):
    cfg = make_cfg("hma", 4, comb5, spacing_d=0.25)
    bm = beam_map(cfg, ChannelControls(d_tau=0.2 / F_HM))
    # d_phi(1) = 0.4*pi -> sin = 0.4*pi / (0.5*pi) = 0.8, d_phi(2) wraps to -0.4*pi
    assert bm.theta(1) == pytest.approx(math.degrees(math.asin(0.8)))
    cfg2 = make_cfg("hma", 4, comb5, spacing_d=0.25)
    bm2 = beam_map(cfg2, ChannelControls(d_tau=0.3 / F_HM))
    assert bm2.theta(1) is None
    assert math.isnan(bm2.theta_deg[list(bm2.harmonics).index(1)])
    assert any(r[2] == "invisible" for r in bm2.rows())


def test_beam_map_gain(comb5):
    bm = beam_map(make_cfg("hma", 16, comb5))
    np.testing.assert_allclose(bm.g_sig_db, 10 * math.log10(256 * 0.2))


def test_steering_sine():
    assert steering_sine(math.pi / 2, 0.5) == pytest.approx(0.5)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 0.24 / F_HM))
def test_hma_beam_angles_monotone_in_delay(tau):
    # small delays: positive harmonics move toward +90, ordered by m
    w = make_comb(range(0, 3), 1.0, f_hm=F_HM)
    bm = beam_map(make_cfg("hma", 4, w), ChannelControls(d_tau=tau))
    assert bm.theta(0) == pytest.approx(0.0)
    assert bm.theta(1) <= bm.theta(2) + 1e-9


@pytest.mark.parametrize("f_hm,f_bw,f_tr,ok", [
    (1e9, 4e8, 1e8, True),
    (1e9, 9e8, 1e8, False),      # equality is not enough
    (1e9, 1e9, 0.0, False),
    (1e9, 0.0, 0.0, True),
    (1e8, 2e8, 0.0, False),
    (5e8, 2e8, 2.9e8, True),
])
def test_validate_bandwidth_fixtures(f_hm, f_bw, f_tr, ok):
    res = validate_bandwidth(f_hm, f_bw, f_tr)
    assert res.passed is ok
    assert res.margin == pytest.approx(f_hm - f_bw - f_tr)


def test_validate_bandwidth_negative():
    with pytest.raises(InvalidParameter):
        validate_bandwidth(1e9, -1.0)


@pytest.mark.parametrize("m_max,lo_bw", [(8, 7e9), (4, 3e9), (12, 11e9)])
def test_required_bandwidths_square(m_max, lo_bw):
    # duty 1/4 has nulls at multiples of 4, so the highest nonzero harmonic is m_max-1
    rb = required_bandwidths(make_square(0.25, m_max=m_max, f_hm=F_HM), f_rf=F_RF)
    assert rb.lo_network_bw == pytest.approx(lo_bw)
    assert rb.output_span == pytest.approx(2 * lo_bw)
    assert rb.f_low == pytest.approx(F_RF - lo_bw)
    assert rb.f_high == pytest.approx(F_RF + lo_bw)


def test_required_bandwidths_comb(comb5):
    rb = required_bandwidths(comb5)
    assert rb.lo_network_bw == pytest.approx(2 * F_HM)
