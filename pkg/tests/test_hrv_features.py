import math

import numpy as np
import pytest

from rehabloop.errors import InsufficientDataError
from rehabloop.hrv.ecg import RrSeries
from rehabloop.hrv.features import (
    FEATURE_NAMES,
    N_FEATURES,
    NormalizationParams,
    compute_features,
    fit_baseline,
    normalize,
)


def _series(intervals):
    times = np.concatenate(([0.0], np.cumsum(intervals)))
    return RrSeries.from_peak_times(times)


def _tone_series(freq_hz, amp_ms=50.0, base_ms=800.0, duration_s=70.0):
    times = [0.0]
    t = 0.0
    while t < duration_s:
        rr = base_ms + amp_ms * math.sin(2 * math.pi * freq_hz * t)
        t += rr / 1000.0
        times.append(t * 1000.0)
    return RrSeries.from_peak_times(times)


def test_feature_count():
    assert N_FEATURES == 22
    assert len(FEATURE_NAMES) == 22


def test_too_few_intervals():
    with pytest.raises(InsufficientDataError):
        compute_features(_series([800.0] * 10))


def test_constant_rr():
    f = compute_features(_series([800.0] * 75))
    assert f.mean_rr == pytest.approx(800.0)
    assert f.median_rr == pytest.approx(800.0)
    assert f.sdnn == 0.0
    assert f.rmssd == 0.0
    assert f.sdsd == 0.0
    assert f.sd1 == 0.0
    assert f.mean_hr == pytest.approx(75.0)
    assert f.nn50 == 0 and f.pnn50 == 0.0
    assert f.lf_hf_ratio == 0.0  # degenerate flat spectrum
    assert f.degenerate_spectrum


def test_alternating_790_810():
    f = compute_features(_series([790.0, 810.0] * 38))
    assert f.sdnn == pytest.approx(10.0, abs=1e-9)
    assert f.rmssd == pytest.approx(20.0, abs=1e-9)
    assert f.sd1 == pytest.approx(20.0 / math.sqrt(2), abs=1e-6)
    assert f.pnn50 == 0.0
    assert f.pnn20 == pytest.approx(100.0)


def test_sd1_identity_on_random_windows():
    """sd1 = rmssd / sqrt(2) over 1000 random windows."""
    rng = np.random.default_rng(17)
    for _ in range(1000):
        intervals = rng.uniform(600.0, 1100.0, size=rng.integers(25, 90))
        f = compute_features(_series(intervals))
        assert f.sd1 == pytest.approx(f.rmssd / math.sqrt(2), abs=1e-6)
        assert f.ellipse_area == pytest.approx(math.pi * f.sd1 * f.sd2, abs=1e-6)


def test_norms_sum_to_100():
    rng = np.random.default_rng(23)
    for _ in range(50):
        intervals = 800.0 + 60.0 * rng.standard_normal(80)
        f = compute_features(_series(np.clip(intervals, 400, 1500)))
        if not f.degenerate_spectrum:
            assert f.lf_norm + f.hf_norm == pytest.approx(100.0, abs=1e-6)


def test_hf_single_tone():
    f = compute_features(_tone_series(0.25))
    assert f.hf_power / (f.lf_power + f.hf_power) >= 0.95
    assert f.peak_hf_freq == pytest.approx(0.25, abs=0.05)


def test_lf_single_tone():
    f = compute_features(_tone_series(0.1))
    assert f.lf_power / (f.lf_power + f.hf_power) >= 0.95


def test_total_power_tracks_variance():
    """Parseval-style sanity on an in-band multi-tone tachogram."""
    times = [0.0]
    t = 0.0
    while t < 300.0:
        rr = (
            800.0
            + 40.0 * math.sin(2 * math.pi * 0.1 * t)
            + 30.0 * math.sin(2 * math.pi * 0.25 * t)
        )
        t += rr / 1000.0
        times.append(t * 1000.0)
    series = RrSeries.from_peak_times(times)
    f = compute_features(series)
    # reproduce the resampled, mean-removed tachogram for the variance
    ts = np.cumsum(series.intervals)
    grid = np.arange(ts[0], ts[-1], 250.0)
    x = np.interp(grid, ts, series.intervals)
    var = float(np.var(x))
    assert abs(f.total_power - var) / var < 0.15
    # and the resampling itself keeps most of the analytic tone variance
    assert abs(var - 1250.0) / 1250.0 < 0.15


def test_time_shift_invariance():
    rng = np.random.default_rng(41)
    intervals = rng.uniform(650.0, 1000.0, size=70)
    a = compute_features(_series(intervals))
    b = compute_features(_series(intervals).shifted(12_345.0))
    assert a == b


def test_fit_baseline_min_max():
    rng = np.random.default_rng(47)
    feats = [
        compute_features(_series(rng.uniform(600, 1100, size=60))) for _ in range(5)
    ]
    p = fit_baseline(feats)
    mat = np.array([f.to_vector() for f in feats])
    assert np.allclose(p.minima, mat.min(axis=0))
    assert np.allclose(p.maxima, mat.max(axis=0))


def test_fit_baseline_needs_three_windows():
    f = compute_features(_series([800.0] * 40))
    with pytest.raises(InsufficientDataError):
        fit_baseline([f, f])


def test_normalize_endpoints_and_degenerate():
    rng = np.random.default_rng(53)
    feats = [
        compute_features(_series(rng.uniform(600, 1100, size=60))) for _ in range(4)
    ]
    p = fit_baseline(feats)
    mat = np.array([f.to_vector() for f in feats])
    lo = normalize(feats[int(np.argmin(mat[:, 0]))], p)
    assert np.all(lo >= -1e-12) and np.all(lo <= 1.0 + 1e-12)
    # identical windows: every span degenerates to the 0.5 convention
    same = compute_features(_series([800.0] * 40))
    p2 = fit_baseline([same, same, same])
    assert np.all(normalize(same, p2) == 0.5)


def test_normalize_extrapolates_linearly():
    f = compute_features(_series([800.0] * 40))
    p = NormalizationParams(
        minima=np.zeros(N_FEATURES), maxima=np.full(N_FEATURES, 400.0)
    )
    v = normalize(f, p)
    assert v[0] == pytest.approx(2.0)  # mean_rr 800 over range [0, 400]


def test_params_dict_round_trip():
    p = NormalizationParams(
        minima=np.arange(N_FEATURES, dtype=float),
        maxima=np.arange(N_FEATURES, dtype=float) + 1.0,
    )
    q = NormalizationParams.from_dict(p.to_dict())
    assert np.array_equal(p.minima, q.minima)
    assert np.array_equal(p.maxima, q.maxima)
