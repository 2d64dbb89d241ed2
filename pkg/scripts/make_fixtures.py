"""Regenerates every committed test fixture, bit-for-bit.

Usage: python3 scripts/make_fixtures.py
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

import numpy as np

import helpers
from rehabloop.hrv.svm import save_model, svm_train
from rehabloop.wire import WireMessage, encode


def write_stress_model() -> None:
    data = helpers.all_subject_windows()
    X = np.vstack([x for x, _ in data])
    y = np.concatenate([labels for _, labels in data])
    model = svm_train(X, y, gamma=helpers.STRESS_GAMMA, C=10.0)
    save_model(model, helpers.FIXTURES / "stress_model.json")
    print(f"stress_model.json: {len(model.support_vectors)} SVs")


def write_rr_constant() -> None:
    lines = ["t_ms"] + [str(800 * i) for i in range(0, 501)]
    (helpers.FIXTURES / "rr_constant_800.csv").write_text("\n".join(lines) + "\n")
    print("rr_constant_800.csv")


def write_wire_golden() -> None:
    msgs = [
        WireMessage("EVENT", 120000, {"kind": "Stress", "evidence": 0.75}),
        WireMessage("HELLO", 0, {"role": "ui"}),
        WireMessage("HANDLE", 1500.5, {"x": 0.05, "y": -0.1, "vx": 0.0, "vy": 1.25}),
        WireMessage(
            "FORCE",
            1500.5,
            {
                "fx": -1.5,
                "fy": 0.0,
                "ref_s": 0.25,
                "ref_x": 0.0,
                "ref_y": 0.05,
                "error_m": 0.02,
            },
        ),
        WireMessage(
            "METRICS",
            540000,
            {
                "mean_dev_m": 0.008,
                "max_dev_m": 0.021,
                "distance_m": 0.64,
                "elapsed_s": 240.0,
                "pdi": 0.24,
                "session": 1,
            },
        ),
        WireMessage(
            "AGENT_ACTION",
            540000,
            {
                "utterance": "WOW! Great to see you. Let's make today count!",
                "gesture": "wave",
                "expression": "joy",
                "cause": "Greeting",
            },
        ),
        WireMessage("SESSION_CTRL", 0, {"command": "start"}),
        WireMessage("FRAME", 2000, {"pitch_deg": 1.5, "yaw_deg": -30.0}),
        WireMessage("FRAME", 2100, {"on_screen": True, "pain_prob": 0.1}),
    ]
    data = b"".join(encode(m) for m in msgs)
    (helpers.FIXTURES / "wire_golden.ndjson").write_bytes(data)
    print("wire_golden.ndjson")


def write_coach_transcripts() -> None:
    for name in helpers.SCENARIOS:
        path = helpers.FIXTURES / f"coach_{name}.txt"
        path.write_text(helpers.run_scenario(name))
        print(path.name)


def write_score_logs() -> None:
    d = helpers.FIXTURES / "scorelogs"
    d.mkdir(exist_ok=True)
    for k in range(helpers.SCORE_N_LOGS):
        (d / f"trace_{k:02d}.ndjson").write_bytes(helpers.make_score_log(k))
    print(f"scorelogs/: {helpers.SCORE_N_LOGS} logs")


if __name__ == "__main__":
    helpers.FIXTURES.mkdir(exist_ok=True)
    write_rr_constant()
    write_wire_golden()
    write_coach_transcripts()
    write_score_logs()
    write_stress_model()
