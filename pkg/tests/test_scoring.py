import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

import helpers
from rehabloop.assist import HandleState
from rehabloop.errors import InputError, SpecificationError
from rehabloop.scoring import (
    ScoringConfig,
    SessionMetrics,
    compare_sessions,
    compute_metrics,
    metrics_from_arrays,
    pdi_from_terms,
    sample_error,
)
from rehabloop.trajectory import PathKind, TrajectorySpec, eval_at, path_length, project
from rehabloop.wire import decode

CIRCLE = TrajectorySpec(kind=PathKind.CIRCLE, size=0.1, target_duration_s=240.0)
CFG = ScoringConfig()


def _m(session, pdi):
    return SessionMetrics(0.01, 0.02, 0.6, 240.0, pdi, session)


def test_weight_validation():
    with pytest.raises(SpecificationError):
        ScoringConfig(0.5, 0.25, 0.15)  # sum != 1
    with pytest.raises(SpecificationError):
        ScoringConfig(0.34, 0.33, 0.33)  # ordering not strict
    ScoringConfig(0.6, 0.25, 0.15)


def test_sample_error_delegates_to_project():
    rng = np.random.default_rng(2)
    for _ in range(50):
        pos = tuple(rng.uniform(-0.15, 0.15, size=2))
        state = HandleState(pos, (0, 0), 0.0)
        assert sample_error(CIRCLE, state) == project(CIRCLE, pos)[1]


def test_sample_error_radial():
    state = HandleState(CIRCLE.center, (0, 0), 0.0)
    assert sample_error(CIRCLE, state) == pytest.approx(0.1, abs=1e-9)


def test_perfect_trace_scores_zero():
    n = 400
    samples = [
        HandleState(eval_at(CIRCLE, i / n).position, (0, 0), i * 600.0)
        for i in range(n + 1)
    ]
    m = compute_metrics(samples, CIRCLE, CFG)
    assert m.pdi == pytest.approx(0.0, abs=1e-6)
    assert m.mean_deviation_m < 1e-8


def test_unit_terms_give_w_err():
    pdi = pdi_from_terms(CIRCLE.tolerance_band_m, path_length(CIRCLE), 240.0, CIRCLE, CFG)
    assert pdi == pytest.approx(0.6, abs=1e-12)


def test_one_sided_terms():
    # Finishing early and moving less than one loop is never penalized.
    assert pdi_from_terms(0.0, 0.1, 100.0, CIRCLE, CFG) == 0.0


def test_monotonicity_in_each_term():
    base = pdi_from_terms(0.01, 1.0, 250.0, CIRCLE, CFG)
    assert pdi_from_terms(0.02, 1.0, 250.0, CIRCLE, CFG) > base
    assert pdi_from_terms(0.01, 1.5, 250.0, CIRCLE, CFG) > base
    assert pdi_from_terms(0.01, 1.0, 300.0, CIRCLE, CFG) > base


def test_tolerance_scale_halves_error_term():
    wide = replace(CIRCLE, tolerance_band_m=0.04)
    a = pdi_from_terms(0.01, 0.0, 0.0, CIRCLE, CFG)
    b = pdi_from_terms(0.01, 0.0, 0.0, wide, CFG)
    assert a == pytest.approx(2 * b, rel=1e-12)


def test_input_validation():
    with pytest.raises(InputError):
        metrics_from_arrays([0.0], [0.0], 0.0, CIRCLE, CFG)
    with pytest.raises(InputError):
        metrics_from_arrays([0.0, 0.0], [0.0, 0.0], 0.0, CIRCLE, CFG)


def _brute_force_pdi(t, xs, ys, spec, cfg):
    """Independent straightforward recomputation from raw samples.

    The fixture exercise is a circle, so the nearest-point distance has the
    exact closed form |r - |p - c||, sidestepping the production projector
    entirely.
    """
    assert spec.kind is PathKind.CIRCLE
    cx, cy = spec.center
    devs = [abs(math.hypot(x - cx, y - cy) - spec.size) for x, y in zip(xs, ys)]
    num = sum(
        0.5 * (devs[i] + devs[i + 1]) * (t[i + 1] - t[i]) for i in range(len(t) - 1)
    )
    mean_dev = num / (t[-1] - t[0])
    dist = sum(
        math.hypot(xs[i + 1] - xs[i], ys[i + 1] - ys[i]) for i in range(len(t) - 1)
    )
    elapsed = (t[-1] - t[0]) / 1000.0
    return (
        cfg.w_err * mean_dev / spec.tolerance_band_m
        + cfg.w_dist * max(0.0, dist / path_length(spec) - 1.0)
        + cfg.w_time * max(0.0, elapsed / spec.target_duration_s - 1.0)
    )


@pytest.mark.parametrize("k", range(20))
def test_fixture_logs_match_brute_force(k):
    """PDI of each recorded fixture log vs an independent recomputation."""
    path = helpers.FIXTURES / "scorelogs" / f"trace_{k:02d}.ndjson"
    msgs = [decode(line) for line in path.read_bytes().splitlines()]
    handles = [m for m in msgs if m.type == "HANDLE"]
    logged = [m for m in msgs if m.type == "METRICS"][0]
    t = [m.ts_ms for m in handles]
    xs = [m.fields["x"] for m in handles]
    ys = [m.fields["y"] for m in handles]
    oracle = _brute_force_pdi(t, xs, ys, helpers.SCORE_SPEC, CFG)
    assert logged.fields["pdi"] == pytest.approx(oracle, abs=1e-9)


def test_compare_sessions_cases():
    r = compare_sessions([_m(1, 0.8), _m(2, 0.5), _m(3, 0.3)])
    assert (r.best_session, r.improving) == (3, True)
    r = compare_sessions([_m(1, 0.3), _m(2, 0.3), _m(3, 0.3)])
    assert (r.best_session, r.improving) == (3, False)
    r = compare_sessions([_m(1, 0.2), _m(2, 0.5), _m(3, 0.4)])
    assert (r.best_session, r.improving) == (1, False)


def test_compare_sessions_scale_invariance():
    a = compare_sessions([_m(1, 0.8), _m(2, 0.5), _m(3, 0.6)])
    b = compare_sessions([_m(1, 8.0), _m(2, 5.0), _m(3, 6.0)])
    assert a.best_session == b.best_session


def test_compare_sessions_validation():
    with pytest.raises(InputError):
        compare_sessions([_m(1, 0.5), _m(2, 0.4)])
    with pytest.raises(InputError):
        compare_sessions([_m(1, 0.5), _m(3, 0.4), _m(2, 0.3)])


def test_metrics_dict_round_trip():
    m = _m(2, 0.42)
    assert SessionMetrics.from_dict(m.to_dict()) == m
