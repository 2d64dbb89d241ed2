import pytest

from rehabloop.affect import (
    AffectEvent,
    AffectFrame,
    AffectKind,
    AffectThresholds,
    AttentionMonitor,
    GazeCalibration,
    PainMonitor,
    StressSmoother,
    attention_window,
    classify_gaze,
    off_screen_ratio,
    pain_frame_ratio,
    pain_window,
)
from rehabloop.errors import InputError, SpecificationError

TH = AffectThresholds()


def _gaze(pitch, yaw, ts=0.0):
    return AffectFrame(timestamp_ms=ts, gaze=(pitch, yaw))


def test_frame_validation():
    with pytest.raises(SpecificationError):
        AffectFrame(timestamp_ms=0.0)
    with pytest.raises(SpecificationError):
        AffectFrame(timestamp_ms=0.0, pain_prob=1.5)


def test_calibration_validation():
    with pytest.raises(SpecificationError):
        GazeCalibration(yaw_range_deg=(10.0, -10.0))


def test_classify_gaze_closed_boundaries():
    calib = GazeCalibration()
    assert classify_gaze(_gaze(0.0, 0.0), calib)
    # boundary angles count as on-screen
    assert classify_gaze(_gaze(25.0, -25.0), calib)
    assert classify_gaze(_gaze(-25.0, 25.0), calib)
    assert not classify_gaze(_gaze(25.0001, 0.0), calib)
    assert not classify_gaze(_gaze(0.0, -25.0001), calib)


def test_classify_gaze_requires_angles():
    with pytest.raises(InputError):
        classify_gaze(AffectFrame(timestamp_ms=0.0, on_screen=True), GazeCalibration())


def test_ratios():
    assert off_screen_ratio([True, False, False, True]) == 0.5
    assert pain_frame_ratio([0.4, 0.6, 0.7, 0.2], 0.5) == 0.5
    # strict cutoff: exactly 0.5 is no-pain
    assert pain_frame_ratio([0.5, 0.5], 0.5) == 0.0
    with pytest.raises(InputError):
        off_screen_ratio([])
    with pytest.raises(InputError):
        pain_frame_ratio([], 0.5)


def test_thresholds_validation():
    with pytest.raises(SpecificationError):
        AffectThresholds(distraction_ratio=1.0)
    with pytest.raises(SpecificationError):
        AffectThresholds(stress_k=5, stress_n=4)
    with pytest.raises(SpecificationError):
        AffectThresholds(cooldown_s=-1.0)


def test_thresholds_round_trip():
    th = AffectThresholds(distraction_ratio=0.7, stress_k=2, stress_n=3)
    assert AffectThresholds.from_dict(th.to_dict()) == th


def test_attention_monitor_fires_and_cools_down():
    mon = AttentionMonitor(TH)
    events = []
    # 30 Hz for 12 s, fully off-screen after 2 s
    for i in range(360):
        ts = i * (1000.0 / 30.0)
        on = ts < 2000.0
        ev = mon.push(AffectFrame(timestamp_ms=ts, on_screen=on))
        if ev:
            events.append(ev)
    assert len(events) == 1  # cooldown 60 s blocks repeats
    assert events[0].kind is AffectKind.DISTRACTION
    assert events[0].evidence > TH.distraction_ratio


def test_attention_monitor_refires_after_cooldown():
    mon = AttentionMonitor(TH)
    events = []
    for i in range(30 * 130):  # 130 s fully off-screen
        ts = i * (1000.0 / 30.0)
        ev = mon.push(AffectFrame(timestamp_ms=ts, on_screen=False))
        if ev:
            events.append(ev)
    assert len(events) == 3  # t ~ 0, 60, 120 s
    assert events[1].onset_ms - events[0].onset_ms >= 60_000.0


def test_attention_monitor_classifies_raw_gaze():
    mon = AttentionMonitor(TH)
    ev = None
    for i in range(300):
        ev = ev or mon.push(_gaze(0.0, 80.0, ts=i * 33.0))
    assert ev is not None and ev.kind is AffectKind.DISTRACTION


def test_attention_steady_on_screen_never_fires():
    mon = AttentionMonitor(TH)
    for i in range(600):
        assert mon.push(AffectFrame(timestamp_ms=i * 33.0, on_screen=True)) is None


def test_pain_monitor_fires_above_ratio():
    mon = PainMonitor(TH)
    events = []
    for i in range(200):
        ts = i * 50.0
        p = 0.9 if ts >= 3000.0 else 0.1
        ev = mon.push(AffectFrame(timestamp_ms=ts, pain_prob=p))
        if ev:
            events.append(ev)
    assert len(events) == 1
    assert events[0].kind is AffectKind.PAIN


def test_pain_monitor_ignores_gaze_only_frames():
    mon = PainMonitor(TH)
    assert mon.push(_gaze(0.0, 0.0)) is None


def test_stress_smoother_k_of_n():
    th = AffectThresholds(stress_k=3, stress_n=4)
    sm = StressSmoother(th)
    assert sm.push(True, 0.0) is None  # history not yet full
    assert sm.push(True, 60_000.0) is None
    assert sm.push(False, 120_000.0) is None
    ev = sm.push(True, 180_000.0)  # window full: 3 of 4
    assert ev is not None and ev.kind is AffectKind.STRESS
    assert ev.evidence == 3.0


def test_stress_smoother_cooldown():
    sm = StressSmoother(AffectThresholds(stress_k=1, stress_n=1, cooldown_s=60.0))
    assert sm.push(True, 0.0) is not None
    assert sm.push(True, 30_000.0) is None  # inside the cooldown
    assert sm.push(True, 60_000.0) is not None


def test_stress_smoother_below_k_never_fires():
    sm = StressSmoother(AffectThresholds(stress_k=3, stress_n=4, cooldown_s=0.0))
    for i in range(50):
        verdict = i % 2 == 0  # at most 2 of any 4 consecutive
        assert sm.push(verdict, i * 1000.0) is None


def test_one_shot_windows():
    ratio, ev = attention_window([False] * 7 + [True] * 3, TH)
    assert ratio == 0.7 and ev is not None
    ratio, ev = attention_window([True] * 10, TH)
    assert ratio == 0.0 and ev is None
    ratio, ev = pain_window([0.9] * 8 + [0.1] * 2, TH)
    assert ratio == 0.8 and ev is not None
    ratio, ev = pain_window([0.1] * 10, TH)
    assert ev is None


def test_event_is_value_object():
    a = AffectEvent(AffectKind.PAIN, 10.0, 0.8)
    b = AffectEvent(AffectKind.PAIN, 10.0, 0.8)
    assert a == b
