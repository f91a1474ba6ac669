import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from wiretap_dmt.channel import AntennaConfig
from wiretap_dmt.dmt import dmt_classical
from wiretap_dmt.exceptions import ConfigError, FitUnavailableError
from wiretap_dmt.montecarlo import (
    McConfig,
    WindowPolicy,
    fit_power_law,
    fit_slope,
    run_sweep,
    sample_channel_block,
    wilson_interval,
    words_per_trial,
)
from wiretap_dmt.serialize import curve_csv


def _cfg(**kw):
    base = dict(
        antennas=AntennaConfig(2, 1, 1), scheme="zero_forcing", plan_kind="csit_adaptive",
        r_s=0.75, snr_db_grid=None, trials=3000, master_seed=17,
    )
    base.update(kw)
    grid = base.pop("snr_db_grid") or (20.0, 30.0, 40.0)
    return McConfig(snr_grid_db=grid, **base)


def test_config_validation():
    with pytest.raises(ConfigError, match="zero_forcing"):
        _cfg(antennas=AntennaConfig(2, 2, 2))
    with pytest.raises(ConfigError, match="artificial"):
        _cfg(antennas=AntennaConfig(2, 2, 1), scheme="artificial_noise")
    with pytest.raises(ConfigError):
        _cfg(snr_db_grid=(10.0, 10.0))
    with pytest.raises(ConfigError):
        _cfg(trials=0)
    with pytest.raises(ConfigError):
        _cfg(master_seed=2**64)
    with pytest.raises(ConfigError):
        _cfg(r_s=-1.0)
    with pytest.raises(ValueError):
        _cfg(scheme="beamforming")


def test_substreams_are_position_addressed():
    cfg = AntennaConfig(3, 2, 1)
    whole = sample_channel_block(cfg, 5, 2, 0, 10)
    a = sample_channel_block(cfg, 5, 2, 0, 4)
    b = sample_channel_block(cfg, 5, 2, 4, 6)
    assert np.array_equal(whole.h_d, np.concatenate([a.h_d, b.h_d]))
    assert np.array_equal(whole.h_e, np.concatenate([a.h_e, b.h_e]))
    other = sample_channel_block(cfg, 5, 3, 0, 4)
    assert not np.array_equal(a.h_d, other.h_d)
    assert words_per_trial(cfg) % 4 == 0


def test_substream_entries_are_standard_complex_gaussian():
    ch = sample_channel_block(AntennaConfig(2, 2, 1), 1, 0, 0, 50_000)
    gains = np.abs(ch.h_d[:, 0, 1]) ** 2
    assert stats.kstest(gains, "expon").pvalue > 0.01
    assert stats.kstest(ch.h_e[:, 0, 0].real, "norm", args=(0, math.sqrt(0.5))).pvalue > 0.01
    assert abs(np.corrcoef(ch.h_d[:, 0, 0].real, ch.h_e[:, 0, 0].real)[0, 1]) < 0.02


def test_symmetric_floor_is_one_half():
    cfg = McConfig(AntennaConfig(1, 1, 1), "isotropic_no_csit", "no_csit", 0.0, (-10.0, -5.0, 0.0), 1000, 3)
    for est in run_sweep(cfg).estimates:
        p = est.p_hat["secrecy_rate_outage"]
        width = est.ci_high["secrecy_rate_outage"] - est.ci_low["secrecy_rate_outage"]
        assert abs(p - 0.5) <= 3 * width


def test_no_decay_when_eavesdropper_dominates():
    cfg = McConfig(AntennaConfig(2, 2, 2), "isotropic_no_csit", "no_csit", 0.5, (10.0, 20.0, 30.0, 40.0), 5000, 3)
    p = run_sweep(cfg).p_hat("secrecy_rate_outage")
    assert np.all(p > 0.3)


def test_determinism_across_threads_and_blocks():
    cfg = _cfg(trials=5000)
    ref = curve_csv(run_sweep(cfg, threads=1))
    assert curve_csv(run_sweep(cfg, threads=1)) == ref
    assert curve_csv(run_sweep(cfg, threads=3, block_size=777)) == ref
    assert curve_csv(run_sweep(cfg, threads=0, block_size=64)) == ref


def test_estimate_invariants():
    curve = run_sweep(_cfg())
    for est in curve.estimates:
        for e, c in est.counts.items():
            assert est.p_hat[e] == c / est.trials
            assert est.ci_low[e] <= est.p_hat[e] <= est.ci_high[e]
    assert list(curve.snr_db) == [20.0, 30.0, 40.0]


def test_progress_callback():
    seen = []
    run_sweep(_cfg(trials=100), block_size=30, progress=lambda d, t: seen.append((d, t)))
    assert seen[-1] == (12, 12)


def test_wilson_zero_and_full():
    assert wilson_interval(0, 1000) == (0.0, 0.003)
    lo, hi = wilson_interval(1000, 1000)
    assert hi == 1.0 and lo < 1.0


@given(trials=st.integers(1, 10**7), frac=st.floats(0, 1))
def test_wilson_brackets_estimate(trials, frac):
    count = int(frac * trials)
    lo, hi = wilson_interval(count, trials)
    assert 0 <= lo <= count / trials <= hi <= 1


def test_wilson_coverage():
    rng = np.random.default_rng(99)
    for p, n in [(0.3, 200), (0.05, 500), (0.01, 2000)]:
        counts = rng.binomial(n, p, size=1000)
        covered = sum(lo <= p <= hi for lo, hi in (wilson_interval(int(c), n) for c in counts))
        assert covered >= 930


def test_fit_exact_power_law():
    snr_db = np.arange(10.0, 50.0, 5.0)
    p = (10 ** (snr_db / 10)) ** -0.5
    fit = fit_power_law(snr_db, p, np.full(p.shape, 10**6), 10**12, WindowPolicy(1e-5, 1.0, 100))
    assert abs(fit.slope - 0.5) <= 1e-12
    assert np.allclose(fit.predict(snr_db), p, rtol=1e-10)


def test_fit_noisy_power_law():
    rng = np.random.default_rng(5)
    snr_db = np.arange(10.0, 45.0, 5.0)
    p = 0.1 * (10 ** ((snr_db - 10) / 10)) ** -1.0
    trials = 10**6
    counts = rng.binomial(trials, p)
    fit = fit_power_law(snr_db, counts / trials, counts, trials)
    assert abs(fit.slope - 1.0) <= 0.1
    assert fit.points_used >= 2


def test_fit_flat_curve():
    rng = np.random.default_rng(6)
    trials = 10**5
    counts = rng.binomial(trials, 0.3, size=7)
    fit = fit_power_law(np.arange(7) * 5.0, counts / trials, counts, trials, WindowPolicy(1e-5, 1.0, 100))
    assert abs(fit.slope) <= 3 * fit.stderr


def test_fit_unavailable_lists_reasons():
    with pytest.raises(FitUnavailableError) as err:
        fit_power_law([10, 20, 30], [0.5, 0.2, 1e-6], [5000, 2000, 1], 10000)
    msg = str(err.value)
    assert "> 0.1" in msg and "< 100" in msg and "30 dB" in msg


def test_fit_slope_unknown_event():
    curve = run_sweep(_cfg(trials=100))
    with pytest.raises(ValueError):
        fit_slope(curve, "decoding_error")


def test_classical_slope_recovered_without_eavesdropper():
    r = 0.5
    cfg = McConfig(AntennaConfig(1, 1, 0), "isotropic_no_csit", "no_csit", r, (20.0, 25.0, 30.0, 35.0, 40.0), 100_000, 7)
    fit = fit_slope(run_sweep(cfg), "main_outage")
    assert abs(fit.slope - dmt_classical(1, 1, r)) <= 0.15
