import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import erfc

from hybridber import (LogNormalSnr, QuadratureError, erfc_prony, frustration, in2on_aber,
                       in2on_snr_params, lognormal_aber, lognormal_aber_frustration,
                       lognormal_aber_prony, offbody_ber, onbody_aber, onbody_snr_params)
from hybridber.em import normal_expectation, rayleigh_bpsk_ber

# mpmath references (50 digits)
PRONY_AT_1 = 0.160251027180881
FRUSTRATION_1_HALF = 0.512428645624087
RAYLEIGH_AT_3 = 0.0669872981077807


def test_prony_values():
    assert erfc_prony(0.0) == pytest.approx(0.628, rel=1e-15)
    assert erfc_prony(1.0) == pytest.approx(PRONY_AT_1, rel=1e-13)
    assert np.allclose(erfc_prony(np.array([1.0, 1.0])), PRONY_AT_1)


@pytest.mark.parametrize("l", [0.1, 0.5, 1.0, 2.0])
def test_frustration_at_zero(l):
    assert frustration(0.0, l) == pytest.approx(1.0, abs=1e-8)


def test_frustration_reference():
    assert frustration(1.0, 0.5) == pytest.approx(FRUSTRATION_1_HALF, rel=1e-10)


def test_frustration_against_direct_integral():
    from scipy.integrate import quad
    k, l = 3.0, 0.8
    dens = lambda x: math.exp(-k * x * x - (math.log(x) + l * l) ** 2 / (2 * l * l)) / (x * l * math.sqrt(2 * math.pi))  # noqa: E731
    ref = quad(dens, 0, 1, limit=200)[0] + quad(dens, 1, math.inf, limit=200)[0]
    assert frustration(k, l) == pytest.approx(ref, rel=1e-9)


@settings(max_examples=100, deadline=None, derandomize=True)
@given(st.floats(0.0, 1e6), st.floats(0.05, 1.5))
def test_frustration_is_a_probability_weight(k, l):
    assert 0.0 <= frustration(k, l) <= 1.0


def test_frustration_wide_spread_reports_non_convergence():
    # a sharp transition far out in the tails outruns 1024 nodes; the error carries the estimate
    with pytest.raises(QuadratureError) as err:
        frustration(57055.0, 2.0)
    assert 0.0 <= err.value.estimate <= 1.0


def test_frustration_rejects_bad_args():
    with pytest.raises(ValueError):
        frustration(-1.0, 0.5)
    with pytest.raises(ValueError):
        frustration(1.0, 0.0)


@settings(max_examples=60, deadline=None, derandomize=True)
@given(st.floats(-5.0, 8.0), st.floats(0.1, 2.0))
def test_closed_form_equals_prony_quadrature(mu, sigma):
    snr = LogNormalSnr(mu, sigma)
    assert lognormal_aber_frustration(snr) == pytest.approx(lognormal_aber_prony(snr), rel=1e-10)


def test_aber_degenerate_limit():
    # tiny spread: the average collapses onto the instantaneous BER at exp(mu)
    snr = LogNormalSnr(math.log(2.0), 1e-6)
    assert lognormal_aber(snr) == pytest.approx(0.5 * erfc(math.sqrt(2.0)), rel=1e-6)


def test_aber_sampling_oracle():
    rng = np.random.default_rng(7)
    snr = LogNormalSnr(1.0, 0.8)
    draws = 0.5 * erfc(np.exp((snr.mu_gamma + snr.sigma_gamma * rng.standard_normal(10 ** 6)) / 2))
    se = draws.std() / math.sqrt(draws.size)
    assert abs(lognormal_aber(snr) - draws.mean()) <= 3 * se


def test_quadrature_cap_raises():
    with pytest.raises(QuadratureError) as err:
        normal_expectation(lambda u: (u > 0.3).astype(float), n_max=64)
    assert err.value.estimate == pytest.approx(0.38, abs=0.05)


def test_in2on_params(default_scenario):
    cfg = default_scenario.in2on
    t = 1.5e-3
    # dB budget: P_tx - PL(d) - N0 + 10 log10(t)
    loss_db = 47.14 + 10 * 4.26 * math.log10(20 / 50)
    snr_db = -102 - loss_db + 174 + 10 * math.log10(t)
    p = in2on_snr_params(cfg, t)
    assert p.mu_gamma == pytest.approx(snr_db * math.log(10) / 10, rel=1e-12)
    assert p.sigma_gamma == pytest.approx(7.85 * math.log(10) / 10, rel=1e-14)


def test_onbody_params(default_scenario):
    cfg = default_scenario.onbody
    t = 1.5e-3
    snr_db = -76 - 63.24 + 174 + 10 * math.log10(t)
    p = onbody_snr_params(cfg, t)
    assert p.mu_gamma == pytest.approx(-0.39 + snr_db * math.log(10) / 10, rel=1e-12)
    assert p.sigma_gamma == 0.23


def test_rayleigh_values():
    assert rayleigh_bpsk_ber(0.0) == 0.5
    assert rayleigh_bpsk_ber(3.0) == pytest.approx(RAYLEIGH_AT_3, rel=1e-14)
    g = 1e12
    assert rayleigh_bpsk_ber(g) == pytest.approx(1 / (4 * g), rel=1e-9)
    with pytest.raises(ValueError):
        rayleigh_bpsk_ber(-1.0)


@pytest.mark.parametrize("link", ["in2on", "onbody", "offbody"])
def test_decreasing_in_symbol_time(default_scenario, link):
    fn = {"in2on": in2on_aber, "onbody": onbody_aber, "offbody": offbody_ber}[link]
    cfg = getattr(default_scenario, link)
    bers = [fn(cfg, t) for t in np.linspace(0.1e-3, 3e-3, 30)]
    assert all(0.0 < b <= 0.5 for b in bers)
    assert all(a > b for a, b in zip(bers, bers[1:]))


def test_rejects_bad_symbol_time(default_scenario):
    with pytest.raises(ValueError):
        onbody_aber(default_scenario.onbody, 0.0)


def test_high_power_drives_ber_down(default_scenario):
    cfg = replace(default_scenario.in2on, tx_power=1e-3)
    assert in2on_aber(cfg, 1e-3) < 1e-12


def _prony_gaps():
    mus = np.linspace(0, 6, 13)
    sigmas = np.linspace(0.2, 2, 10)
    return [(m, s, lognormal_aber_prony(LogNormalSnr(m, s)) / lognormal_aber(LogNormalSnr(m, s)) - 1)
            for m in mus for s in sigmas]


def test_prony_gap_small_at_moderate_spread():
    gaps = [g for m, s, g in _prony_gaps() if 0.6 <= s <= 1.0]
    assert max(abs(g) for g in gaps) <= 0.05


@pytest.mark.xfail(strict=True, reason="three-term fit drifts in the far tail and near zero (gap -71% at mu=6, sigma=0.2; -13% at mu=0, sigma=2)")
def test_prony_gap_within_five_percent_everywhere():
    worst = max(_prony_gaps(), key=lambda r: abs(r[2]))
    assert abs(worst[2]) <= 0.05, worst
