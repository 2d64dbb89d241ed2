"""Headless closed-loop driver: synthetic patient, controller, affect
pipeline, and coach wired together for a full multi-session run.

Every stream is seeded through one root seed, so a run with the same
config and seed writes a byte-identical session log.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import IO, Optional, Sequence

import numpy as np

from . import backend as _backend
from ._rng import SplitMix64
from .affect import AffectEvent, AffectFrame, AttentionMonitor, StressSmoother
from .assist import HandleState, ForceCommand
from .coach import AgentAction, CoachState, Phase, Start, Tick, UserAck, advance
from .config import AppConfig
from .hrv.ecg import RrSeries, filter_artifacts
from .hrv.features import compute_features, fit_baseline, normalize
from .hrv.svm import SvmModel, load_model, svm_predict
from .patient import gaze_generate, generate_rr
from .scoring import SessionMetrics, TrendReport, compare_sessions, metrics_from_arrays
from .trajectory import eval_at
from .wire import (
    WireMessage,
    encode,
    msg_agent_action,
    msg_event,
    msg_force,
    msg_frame,
    msg_handle,
    msg_hello,
    msg_metrics,
    msg_session_ctrl,
)

HRV_WINDOW_MS = 60_000.0

# Stream tags folded into the root seed so each generator draws from an
# independent deterministic sequence.
_TAG_BASELINE = 0xB5
_TAG_MOTION = 0x40
_TAG_GAZE = 0x6A
_TAG_RR = 0x44


def derive_seed(root: int, tag: int, index: int = 0) -> int:
    return SplitMix64((root << 16) ^ (tag << 8) ^ index).next_u64() >> 1


@dataclass
class SimulationResult:
    metrics: list[SessionMetrics]
    trend: Optional[TrendReport]
    actions: list[tuple[float, AgentAction]]
    events: list[AffectEvent]
    final_phase: Phase
    backend: str


class _LogWriter:
    """Append-only newline-delimited wire log with monotonicity check."""

    def __init__(self, fh: Optional[IO[bytes]]):
        self.fh = fh
        self.last_ts = 0.0

    def write(self, msg: WireMessage) -> None:
        if self.fh is None:
            return
        if msg.ts_ms < self.last_ts:
            raise AssertionError("log timestamps must be non-decreasing")
        self.last_ts = msg.ts_ms
        self.fh.write(encode(msg))


def _session_distance(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.sum(np.hypot(np.diff(x), np.diff(y))))


def _stress_verdicts(
    rr: RrSeries,
    model: SvmModel,
    params,
    duration_ms: float,
) -> list[tuple[float, bool]]:
    """(window end ms, stressed) per full HRV window of the session."""
    out = []
    n_windows = int(duration_ms // HRV_WINDOW_MS)
    for k in range(n_windows):
        w = rr.window(k * HRV_WINDOW_MS, (k + 1) * HRV_WINDOW_MS)
        if len(w) < 20:
            continue
        vec = normalize(compute_features(w), params)
        _, stressed = svm_predict(model, vec)
        out.append(((k + 1) * HRV_WINDOW_MS, stressed))
    return out


def run_simulation(
    cfg: AppConfig,
    seed: Optional[int] = None,
    out_path: Optional[str | Path] = None,
    force_backend: Optional[str] = None,
    stressed_sessions: Sequence[int] = (),
) -> SimulationResult:
    """Run the full protocol headlessly; optionally write the wire log."""
    root = cfg.seed if seed is None else seed
    # The logged config must carry the effective seed so a replay of the
    # log re-derives the same draw sequences.
    cfg = replace(cfg, seed=root)
    plan = cfg.plan
    spec = plan.exercise
    profile = cfg.profile
    model = load_model(cfg.model_path) if cfg.model_path else None

    state = CoachState(plan=plan, seed=root)
    actions: list[tuple[float, AgentAction]] = []
    all_events: list[AffectEvent] = []
    metrics: list[SessionMetrics] = []

    fh = open(out_path, "wb") if out_path is not None else None
    log = _LogWriter(fh)

    def emit_actions(ts: float, acts: list[AgentAction]) -> None:
        for a in acts:
            actions.append((ts, a))
            log.write(msg_agent_action(a, ts))

    try:
        log.write(msg_session_ctrl("config", 0.0, cfg.to_dict()))
        log.write(msg_hello("engine", 0.0))
        log.write(msg_session_ctrl("start", 0.0))
        state, acts = advance(state, Start(0.0))
        emit_actions(0.0, acts)

        # Calibration: resting RR baseline, feature normalization fit.
        baseline_ms = plan.baseline_duration_s * 1000.0
        rr_times = generate_rr(
            profile, plan.baseline_duration_s, False, derive_seed(root, _TAG_BASELINE)
        )
        baseline_rr = filter_artifacts(RrSeries.from_peak_times(rr_times))
        norm_params = None
        if model is not None:
            feats = []
            for k in range(int(baseline_ms // HRV_WINDOW_MS)):
                w = baseline_rr.window(k * HRV_WINDOW_MS, (k + 1) * HRV_WINDOW_MS)
                if len(w) >= 20:
                    feats.append(compute_features(w))
            norm_params = fit_baseline(feats, plan.baseline_duration_s)

        state, acts = advance(state, Tick(baseline_ms))
        emit_actions(baseline_ms, acts)
        log.write(msg_session_ctrl("ack", baseline_ms))
        state, acts = advance(state, UserAck(baseline_ms))
        emit_actions(baseline_ms, acts)

        session_ms = plan.per_session_duration_s * 1000.0
        n_ticks = int(round(plan.per_session_duration_s / cfg.dynamics.dt))
        t0 = baseline_ms
        smoother = StressSmoother(cfg.thresholds)

        for i in range(1, plan.sessions + 1):
            assist = state.assist
            init = HandleState(eval_at(spec, 0.0).position, (0.0, 0.0), t0)
            res = _backend.run_motion_loop(
                spec,
                assist,
                cfg.dynamics,
                profile,
                profile.session_sigma(i),
                n_ticks,
                derive_seed(root, _TAG_MOTION, i),
                init=init,
                force_backend=force_backend,
            )

            # Affect streams for the same span, expressed on the global clock.
            frames, _ = gaze_generate(
                profile, plan.per_session_duration_s, derive_seed(root, _TAG_GAZE, i)
            )
            session_rr = filter_artifacts(
                RrSeries.from_peak_times(
                    generate_rr(
                        profile,
                        plan.per_session_duration_s,
                        i in stressed_sessions,
                        derive_seed(root, _TAG_RR, i),
                    )
                )
            )
            attention = AttentionMonitor(cfg.thresholds)
            aux: list[WireMessage] = []

            def session_event(ev: AffectEvent) -> None:
                nonlocal state
                all_events.append(ev)
                aux.append(msg_event(ev))
                state, acts = advance(state, ev)
                for a in acts:
                    actions.append((ev.onset_ms, a))
                    aux.append(msg_agent_action(a, ev.onset_ms))
                if state.phase is Phase.BREAK_SUGGESTED:
                    # Headless patient accepts the break and resumes at once.
                    aux.append(msg_session_ctrl("ack", ev.onset_ms))
                    state, acts = advance(state, UserAck(ev.onset_ms))
                    for a in acts:
                        actions.append((ev.onset_ms, a))
                        aux.append(msg_agent_action(a, ev.onset_ms))

            verdicts = (
                _stress_verdicts(session_rr, model, norm_params, session_ms)
                if model is not None
                else []
            )
            vi = 0
            for t_rel, pitch, yaw in frames:
                ts = t0 + t_rel
                while vi < len(verdicts) and verdicts[vi][0] <= t_rel:
                    v_ts = t0 + verdicts[vi][0]
                    ev = smoother.push(verdicts[vi][1], v_ts)
                    vi += 1
                    if ev is not None:
                        session_event(ev)
                frame = AffectFrame(timestamp_ms=ts, gaze=(pitch, yaw))
                aux.append(msg_frame(frame))
                ev = attention.push(frame)
                if ev is not None:
                    session_event(ev)
            while vi < len(verdicts):
                v_ts = t0 + verdicts[vi][0]
                ev = smoother.push(verdicts[vi][1], v_ts)
                vi += 1
                if ev is not None:
                    session_event(ev)

            # Interleave tick telemetry with the affect records by timestamp.
            if fh is not None:
                ai = 0
                for j in range(n_ticks):
                    ts = float(res.t_ms[j])
                    while ai < len(aux) and aux[ai].ts_ms <= ts:
                        log.write(aux[ai])
                        ai += 1
                    log.write(
                        msg_handle(
                            HandleState(
                                (float(res.x[j]), float(res.y[j])),
                                _tick_velocity(res, j, init, cfg.dynamics.dt),
                                ts,
                            )
                        )
                    )
                    ref = eval_at(spec, float(res.ref_s[j]))
                    log.write(
                        msg_force(
                            ForceCommand(
                                (float(res.force_x[j]), float(res.force_y[j])),
                                ref,
                                float(res.error_m[j]),
                            ),
                            ts,
                        )
                    )
                for m_ in aux[ai:]:
                    log.write(m_)

            dist = _session_distance(res.x, res.y)
            m = metrics_from_arrays(
                res.t_ms, res.deviation, dist, spec, cfg.scoring, session_index=i
            )
            metrics.append(m)
            t_end = t0 + session_ms
            log.write(msg_metrics(m, t_end))
            state, acts = advance(state, m)
            emit_actions(t_end, acts)
            log.write(msg_session_ctrl("ack", t_end))
            state, acts = advance(state, UserAck(t_end))
            emit_actions(t_end, acts)
            t0 = t_end

        # Final summary acknowledged; protocol complete.
        log.write(msg_session_ctrl("ack", t0))
        state, acts = advance(state, UserAck(t0))
        emit_actions(t0, acts)
    finally:
        if fh is not None:
            fh.flush()
            fh.close()

    trend = compare_sessions(metrics) if len(metrics) == 3 else None
    return SimulationResult(
        metrics=metrics,
        trend=trend,
        actions=actions,
        events=all_events,
        final_phase=state.phase,
        backend=force_backend or _backend.backend_name(),
    )


def _tick_velocity(res, j: int, init: HandleState, dt: float) -> tuple[float, float]:
    """Finite-difference velocity for the logged handle stream."""
    if j == 0:
        px, py = init.position
    else:
        px, py = float(res.x[j - 1]), float(res.y[j - 1])
    return ((float(res.x[j]) - px) / dt, (float(res.y[j]) - py) / dt)


def trend_study(
    cfg: AppConfig,
    n_seeds: int = 100,
    force_backend: Optional[str] = None,
) -> tuple[int, list[tuple[float, float, float]]]:
    """Run n_seeds full protocols; count runs with strictly decreasing PDI."""
    improving = 0
    pdi_rows = []
    for k in range(n_seeds):
        result = run_simulation(cfg, seed=k, force_backend=force_backend)
        pdis = tuple(m.pdi for m in result.metrics)
        pdi_rows.append(pdis)
        if all(a > b for a, b in zip(pdis, pdis[1:])):
            improving += 1
    return improving, pdi_rows
