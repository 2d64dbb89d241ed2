"""Shared test tooling: the synthetic stress-subject recipe, scripted
coach scenarios, and the score-fixture log generator.

Everything here is deterministic so the committed fixtures can be
regenerated bit-for-bit by scripts/make_fixtures.py.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from rehabloop._rng import SplitMix64
from rehabloop.affect import AffectEvent, AffectKind
from rehabloop.assist import AssistConfig, AssistLevel
from rehabloop.coach import (
    AgentAction,
    CoachState,
    SessionPlan,
    Start,
    Tick,
    UserAck,
    advance,
)
from rehabloop.config import AppConfig
from rehabloop.hrv.ecg import RrSeries, filter_artifacts
from rehabloop.hrv.features import compute_features, fit_baseline, normalize
from rehabloop.patient import PatientProfile, generate_rr
from rehabloop.scoring import ScoringConfig, SessionMetrics, metrics_from_arrays
from rehabloop.trajectory import PathKind, TrajectorySpec, eval_at, project
from rehabloop.wire import encode, msg_handle, msg_metrics, msg_session_ctrl
from rehabloop.assist import HandleState

FIXTURES = Path(__file__).parent / "fixtures"

# -- Stress recipe ----------------------------------------------------------
#
# Ten synthetic subjects with distinct autonomic parameters.  Per subject:
# a 300 s rest baseline fits the MinMax normalization, then 10 unstressed
# and 10 stressed 60 s windows become labeled feature vectors.

N_SUBJECTS = 10
WINDOWS_PER_CLASS = 10
WINDOW_S = 60.0

# Baseline-relative MinMax features are unclamped, so cross-subject vectors
# can sit hundreds of span units apart; the RBF width must be wide enough
# that those points still interact, or training degenerates to memorization.
STRESS_GAMMA = 1e-3


def subject_profile(k: int) -> PatientProfile:
    return PatientProfile(
        hr_base=58.0 + 3.0 * k,
        stress_hr_delta=15.0 + 1.5 * k,
        stress_hrv_scale=0.45 + 0.02 * k,
    )


def _window_features(profile: PatientProfile, stressed: bool, seed: int):
    rr = filter_artifacts(
        RrSeries.from_peak_times(generate_rr(profile, WINDOW_S + 5.0, stressed, seed))
    )
    return compute_features(rr.window(0.0, WINDOW_S * 1000.0))


def subject_windows(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Normalized feature matrix and 0/1 stress labels for subject k."""
    profile = subject_profile(k)
    base_rr = filter_artifacts(
        RrSeries.from_peak_times(generate_rr(profile, 300.0, False, 9000 + k))
    )
    feats = [
        compute_features(base_rr.window(j * 60_000.0, (j + 1) * 60_000.0))
        for j in range(5)
    ]
    params = fit_baseline(feats)
    X, y = [], []
    for j in range(WINDOWS_PER_CLASS):
        for stressed in (False, True):
            f = _window_features(profile, stressed, 100 * k + 2 * j + int(stressed))
            X.append(normalize(f, params))
            y.append(int(stressed))
    return np.asarray(X), np.asarray(y)


def all_subject_windows() -> list[tuple[np.ndarray, np.ndarray]]:
    return [subject_windows(k) for k in range(N_SUBJECTS)]


# -- Scripted coach scenarios ----------------------------------------------


def _metrics(session: int, pdi: float) -> SessionMetrics:
    mean_dev = pdi * 0.02 / 0.6  # invert the error term for a clean PDI
    return SessionMetrics(
        mean_deviation_m=mean_dev,
        max_deviation_m=mean_dev * 2.5,
        distance_traveled_m=0.6,
        elapsed_time_s=240.0,
        pdi=pdi,
        session_index=session,
    )


def _fmt(ts: float, a: AgentAction) -> str:
    return f"{ts:.1f}\t{a.cause.value}\t{a.expression_tag}\t{a.gesture_tag}\t{a.utterance}"


def _default_plan() -> SessionPlan:
    return SessionPlan(
        exercise=TrajectorySpec(kind=PathKind.CIRCLE),
        assist=AssistConfig.from_level(AssistLevel.MEDIUM),
    )


def run_scenario(name: str) -> str:
    """One of three scripted coach runs; returns the transcript text."""
    plan = _default_plan()
    state = CoachState(plan=plan, seed=1234)
    lines: list[str] = []

    def step(inp) -> None:
        nonlocal state
        ts = getattr(inp, "ts_ms", None)
        if ts is None:
            ts = getattr(inp, "onset_ms", 0.0)
        if isinstance(inp, SessionMetrics):
            ts = 300_000.0 + inp.session_index * 240_000.0
        state, acts = advance(state, inp)
        for a in acts:
            lines.append(_fmt(ts, a))

    step(Start(0.0))
    step(Tick(300_000.0))
    step(UserAck(300_000.0))

    if name == "clean":
        pdis = [0.8, 0.5, 0.3]
        events: dict[int, list[AffectEvent]] = {}
    elif name == "stress":
        pdis = [0.8, 0.5, 0.3]
        events = {2: [AffectEvent(AffectKind.STRESS, 660_000.0, 3.0)]}
    elif name == "distraction":
        pdis = [1.5, 0.9, 0.15]
        events = {
            s: [
                AffectEvent(AffectKind.DISTRACTION, 300_000.0 + (s - 1) * 240_000.0 + o, 0.7)
                for o in (40_000.0, 150_000.0)
            ]
            for s in (1, 2, 3)
        }
    else:
        raise ValueError(f"unknown scenario {name!r}")

    for s in (1, 2, 3):
        for ev in events.get(s, []):
            step(ev)
            if state.break_started_ms is not None:
                step(UserAck(ev.onset_ms + 30_000.0))
        step(_metrics(s, pdis[s - 1]))
        step(UserAck(300_000.0 + s * 240_000.0))
    step(UserAck(300_000.0 + 3 * 240_000.0))
    return "\n".join(lines) + "\n"


SCENARIOS = ("clean", "stress", "distraction")


# -- Score fixture logs -----------------------------------------------------

SCORE_SPEC = TrajectorySpec(kind=PathKind.CIRCLE, target_duration_s=10.0)
SCORE_N_LOGS = 20


def make_score_log(k: int) -> bytes:
    """A short noisy-trace session log, scored live the same way the
    engine does, so `score` and the oracle can both recompute it."""
    rng = SplitMix64(5000 + k)
    cfg = AppConfig.from_dict(
        {"exercise": SCORE_SPEC.to_dict(), "per_session_duration_s": 10.0}
    )
    n = 200
    t, xs, ys = [], [], []
    for i in range(n):
        s = i / n + 0.002 * rng.gauss()
        radial = 0.004 * rng.gauss()
        p = eval_at(SCORE_SPEC, s).position
        cx, cy = SCORE_SPEC.center
        r = math.hypot(p[0] - cx, p[1] - cy)
        scale = (r + radial) / r
        t.append(float(i) * 50.0)
        xs.append(cx + (p[0] - cx) * scale)
        ys.append(cy + (p[1] - cy) * scale)
    out = [encode(msg_session_ctrl("config", 0.0, cfg.to_dict()))]
    for ti, xi, yi in zip(t, xs, ys):
        out.append(encode(msg_handle(HandleState((xi, yi), (0.0, 0.0), ti))))
    dev = [project(SCORE_SPEC, (xi, yi))[1] for xi, yi in zip(xs, ys)]
    dist = float(np.sum(np.hypot(np.diff(xs), np.diff(ys))))
    m = metrics_from_arrays(t, dev, dist, SCORE_SPEC, ScoringConfig(), 1)
    out.append(encode(msg_metrics(m, t[-1])))
    return b"".join(out)
