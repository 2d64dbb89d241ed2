"""Command-line entry points tying the modules into the closed loop."""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import click
import numpy as np

from .affect import AffectEvent, AffectKind
from .coach import CoachState, Start, Tick, UserAck, advance
from .config import AppConfig, default_config, load_config
from .errors import RehabLoopError
from .hrv.ecg import RrSeries, filter_artifacts
from .hrv.features import FEATURE_NAMES, compute_features, fit_baseline, normalize
from .hrv.svm import load_model, svm_predict
from .scoring import SessionMetrics, metrics_from_arrays
from .server import run_session_server
from .simulate import run_simulation
from .trajectory import project
from .wire import decode

HRV_WINDOW_S = 60.0


def _load_cfg(path: str | None) -> AppConfig:
    return load_config(path) if path else default_config()


def _fail(exc: Exception) -> None:
    raise click.ClickException(str(exc))


@click.group()
def main() -> None:
    """Rehabilitation training loop: simulate, serve, and analyze sessions."""


@main.command()
@click.option("--config", "config_path", type=click.Path(), help="JSON config file.")
@click.option("--log", "log_path", type=click.Path(), help="Session log output.")
def serve(config_path: str | None, log_path: str | None) -> None:
    """Run the session server until an abort command arrives."""
    try:
        cfg = _load_cfg(config_path)
        status = run_session_server(cfg, log_path)
    except RehabLoopError as exc:
        _fail(exc)
    sys.exit(status)


@main.command()
@click.option("--config", "config_path", type=click.Path(), help="JSON config file.")
@click.option("--seed", type=int, default=None, help="Root seed (default: config).")
@click.option("--out", "out_path", type=click.Path(), help="Write the wire log here.")
@click.option(
    "--backend",
    type=click.Choice(["compiled", "python"]),
    default=None,
    help="Force a loop backend.",
)
def simulate(config_path, seed, out_path, backend) -> None:
    """Run the full protocol headlessly with the synthetic patient."""
    try:
        cfg = _load_cfg(config_path)
        result = run_simulation(cfg, seed=seed, out_path=out_path, force_backend=backend)
    except RehabLoopError as exc:
        _fail(exc)
    for m in result.metrics:
        click.echo(
            f"session {m.session_index}: pdi {m.pdi:.4f} "
            f"mean_dev {m.mean_deviation_m * 1000:.2f} mm "
            f"distance {m.distance_traveled_m:.3f} m "
            f"elapsed {m.elapsed_time_s:.1f} s"
        )
    if result.trend is not None:
        word = "improving" if result.trend.improving else "mixed"
        click.echo(f"trend: {word}, best session {result.trend.best_session}")


@main.command()
@click.option("--rr", "rr_path", type=click.Path(), required=True, help="RR CSV (t_ms).")
@click.option("--model", "model_path", type=click.Path(), help="Stress model file.")
@click.option("--baseline-s", type=float, default=300.0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), help="Feature CSV (default stdout).")
def hrv(rr_path, model_path, baseline_s, out_path) -> None:
    """Batch stress pipeline: RR series to windowed features and verdicts."""
    try:
        with open(rr_path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or "t_ms" not in reader.fieldnames:
                raise RehabLoopError(f"{rr_path}: expected a 't_ms' column")
            times = [float(row["t_ms"]) for row in reader]
        rr = filter_artifacts(RrSeries.from_peak_times(times))
        window_ms = HRV_WINDOW_S * 1000.0
        baseline_feats = []
        for k in range(int(baseline_s * 1000.0 // window_ms)):
            w = rr.window(k * window_ms, (k + 1) * window_ms)
            if len(w) >= 20:
                baseline_feats.append(compute_features(w))
        params = fit_baseline(baseline_feats, baseline_s)
        model = load_model(model_path) if model_path else None

        rows = []
        total_ms = rr.times[-1] if len(rr) else 0.0
        for k in range(int(total_ms // window_ms)):
            w = rr.window(k * window_ms, (k + 1) * window_ms)
            if len(w) < 20:
                continue
            f = compute_features(w)
            row = {
                "t0_s": k * HRV_WINDOW_S,
                "t1_s": (k + 1) * HRV_WINDOW_S,
                **{name: getattr(f, name) for name in FEATURE_NAMES},
            }
            if model is not None:
                score, stressed = svm_predict(model, normalize(f, params))
                row["score"] = score
                row["stressed"] = int(stressed)
            rows.append(row)
        if not rows:
            raise RehabLoopError("no full feature window in the RR series")
        header = list(rows[0].keys())
        out_fh = open(out_path, "w", newline="") if out_path else sys.stdout
        try:
            writer = csv.DictWriter(out_fh, fieldnames=header)
            writer.writeheader()
            writer.writerows(rows)
        finally:
            if out_path:
                out_fh.close()
    except RehabLoopError as exc:
        _fail(exc)


def _read_log(path: str):
    try:
        with open(path, "rb") as fh:
            return [decode(line) for line in fh if line.strip()]
    except OSError as exc:
        raise RehabLoopError(str(exc)) from exc


def _log_config(messages) -> AppConfig:
    for msg in messages:
        if msg.type == "SESSION_CTRL" and msg.fields["command"] == "config":
            return AppConfig.from_dict(msg.fields.get("config", {}))
    return default_config()


@main.command()
@click.option("--log", "log_path", type=click.Path(), required=True)
def score(log_path) -> None:
    """Recompute session metrics from the HANDLE samples of a log."""
    try:
        messages = _load_score_input(log_path)
    except RehabLoopError as exc:
        _fail(exc)
    cfg, sessions = messages
    if not sessions:
        raise click.ClickException("log contains no scoreable session")
    for idx, (t, dev, dist) in sessions:
        m = metrics_from_arrays(
            t, dev, dist, cfg.plan.exercise, cfg.scoring, session_index=idx
        )
        click.echo(
            f"session {m.session_index}: pdi {m.pdi:.6f} "
            f"mean_dev_m {m.mean_deviation_m:.6g} max_dev_m {m.max_deviation_m:.6g} "
            f"distance_m {m.distance_traveled_m:.6g} elapsed_s {m.elapsed_time_s:.3f}"
        )


def _load_score_input(log_path: str):
    messages = _read_log(log_path)
    cfg = _log_config(messages)
    spec = cfg.plan.exercise
    sessions = []
    t: list[float] = []
    xs: list[float] = []
    ys: list[float] = []

    def finish(index: int) -> None:
        # Same vectorized arc-length reduction as the live engine, so a
        # replayed log reproduces the distance bit-for-bit.
        if len(t) < 2:
            return
        dev = [project(spec, (x, y))[1] for x, y in zip(xs, ys)]
        dist = float(np.sum(np.hypot(np.diff(xs), np.diff(ys))))
        sessions.append((index, (list(t), dev, dist)))

    for msg in messages:
        if msg.type == "HANDLE":
            t.append(msg.ts_ms)
            xs.append(msg.fields["x"])
            ys.append(msg.fields["y"])
        elif msg.type == "METRICS":
            finish(int(msg.fields["session"]))
            t, xs, ys = [], [], []
    finish(len(sessions) + 1)
    return cfg, sessions


@main.command()
@click.option("--log", "log_path", type=click.Path(), required=True)
def replay(log_path) -> None:
    """Re-drive the coach from a log and print the action transcript."""
    try:
        messages = _read_log(log_path)
        cfg = _log_config(messages)
    except RehabLoopError as exc:
        _fail(exc)
    state = CoachState(plan=cfg.plan, seed=cfg.seed)
    transcript = []
    for msg in messages:
        inputs = []
        if msg.type == "SESSION_CTRL":
            cmd = msg.fields["command"]
            if cmd == "start":
                inputs.append(Start(msg.ts_ms))
            elif cmd == "ack":
                inputs.append(UserAck(msg.ts_ms))
        elif msg.type == "EVENT":
            inputs.append(
                AffectEvent(
                    AffectKind(msg.fields["kind"]), msg.ts_ms, msg.fields["evidence"]
                )
            )
        elif msg.type == "METRICS":
            inputs.append(SessionMetrics.from_dict(msg.fields))
        else:
            inputs.append(Tick(msg.ts_ms))
        for inp in inputs:
            state, acts = advance(state, inp)
            for a in acts:
                transcript.append((msg.ts_ms, a))
    for ts, a in transcript:
        click.echo(f"{ts:>12.1f}  {a.cause.value:<16} [{a.expression_tag}/{a.gesture_tag}] {a.utterance}")


if __name__ == "__main__":
    main()
