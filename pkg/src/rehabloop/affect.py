"""Affect channel fusion: gaze-based attention, per-frame pain
probabilities, and per-window stress verdicts are smoothed, thresholded,
and debounced into the events that drive the coach.

Boundary conventions are deliberate and pinned by tests: the calibrated
gaze interval is closed (a boundary angle counts as on-screen) and the
pain cutoff is strict (exactly 0.5 counts as no-pain).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

from .errors import InputError, SpecificationError


@dataclass(frozen=True)
class AffectFrame:
    timestamp_ms: float
    gaze: Optional[tuple[float, float]] = None  # (pitch deg, yaw deg)
    on_screen: Optional[bool] = None
    pain_prob: Optional[float] = None

    def __post_init__(self) -> None:
        if self.gaze is None and self.on_screen is None and self.pain_prob is None:
            raise SpecificationError("frame must carry at least one channel")
        if self.pain_prob is not None and not 0.0 <= self.pain_prob <= 1.0:
            raise SpecificationError("pain_prob must be in [0, 1]")


@dataclass(frozen=True)
class GazeCalibration:
    yaw_range_deg: tuple[float, float] = (-25.0, 25.0)
    pitch_range_deg: tuple[float, float] = (-25.0, 25.0)

    def __post_init__(self) -> None:
        for lo, hi in (self.yaw_range_deg, self.pitch_range_deg):
            if not lo < hi:
                raise SpecificationError("calibration range must have min < max")


@dataclass(frozen=True)
class AffectThresholds:
    distraction_ratio: float = 0.6
    attention_window_s: float = 5.0
    pain_ratio: float = 0.6
    pain_prob_cutoff: float = 0.5
    pain_window_s: float = 3.0
    stress_k: int = 3
    stress_n: int = 4
    cooldown_s: float = 60.0

    def __post_init__(self) -> None:
        for name in ("distraction_ratio", "pain_ratio"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise SpecificationError(f"{name} must be in (0, 1)")
        if self.stress_k > self.stress_n:
            raise SpecificationError("stress rule requires k <= n")
        if self.cooldown_s < 0:
            raise SpecificationError("cooldown must be >= 0")

    def to_dict(self) -> dict:
        return {
            "distraction_ratio": self.distraction_ratio,
            "attention_window_s": self.attention_window_s,
            "pain_ratio": self.pain_ratio,
            "pain_prob_cutoff": self.pain_prob_cutoff,
            "pain_window_s": self.pain_window_s,
            "stress_k": self.stress_k,
            "stress_n": self.stress_n,
            "cooldown_s": self.cooldown_s,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AffectThresholds":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})


class AffectKind(str, Enum):
    DISTRACTION = "Distraction"
    PAIN = "Pain"
    STRESS = "Stress"


@dataclass(frozen=True)
class AffectEvent:
    kind: AffectKind
    onset_ms: float
    evidence: float


def classify_gaze(frame: AffectFrame, calib: GazeCalibration) -> bool:
    """On-screen iff pitch and yaw both lie in their calibrated closed ranges."""
    if frame.gaze is None:
        raise InputError("frame has no gaze angles")
    pitch, yaw = frame.gaze
    return (
        calib.pitch_range_deg[0] <= pitch <= calib.pitch_range_deg[1]
        and calib.yaw_range_deg[0] <= yaw <= calib.yaw_range_deg[1]
    )


def off_screen_ratio(on_screen_flags: Sequence[bool]) -> float:
    if not on_screen_flags:
        raise InputError("empty attention window")
    return sum(1 for v in on_screen_flags if not v) / len(on_screen_flags)


def pain_frame_ratio(pain_probs: Sequence[float], cutoff: float) -> float:
    if not pain_probs:
        raise InputError("empty pain window")
    return sum(1 for p in pain_probs if p > cutoff) / len(pain_probs)


class _Cooldown:
    def __init__(self, cooldown_s: float):
        self.cooldown_ms = cooldown_s * 1000.0
        self.last_ms: float | None = None

    def ready(self, now_ms: float) -> bool:
        return self.last_ms is None or now_ms - self.last_ms >= self.cooldown_ms

    def fire(self, now_ms: float) -> None:
        self.last_ms = now_ms


class AttentionMonitor:
    """Sliding-window distraction detector over on-screen flags."""

    def __init__(self, th: AffectThresholds, calib: GazeCalibration | None = None):
        self.th = th
        self.calib = calib or GazeCalibration()
        self.window: deque[tuple[float, bool]] = deque()
        self.cooldown = _Cooldown(th.cooldown_s)

    def push(self, frame: AffectFrame) -> Optional[AffectEvent]:
        if frame.on_screen is not None:
            on = frame.on_screen
        elif frame.gaze is not None:
            on = classify_gaze(frame, self.calib)
        else:
            return None
        now = frame.timestamp_ms
        self.window.append((now, on))
        horizon = now - self.th.attention_window_s * 1000.0
        while self.window and self.window[0][0] <= horizon:
            self.window.popleft()
        ratio = off_screen_ratio([v for _, v in self.window])
        if ratio > self.th.distraction_ratio and self.cooldown.ready(now):
            self.cooldown.fire(now)
            return AffectEvent(AffectKind.DISTRACTION, now, ratio)
        return None


class PainMonitor:
    """Sliding-window pain detector over per-frame probabilities."""

    def __init__(self, th: AffectThresholds):
        self.th = th
        self.window: deque[tuple[float, float]] = deque()
        self.cooldown = _Cooldown(th.cooldown_s)

    def push(self, frame: AffectFrame) -> Optional[AffectEvent]:
        if frame.pain_prob is None:
            return None
        now = frame.timestamp_ms
        self.window.append((now, frame.pain_prob))
        horizon = now - self.th.pain_window_s * 1000.0
        while self.window and self.window[0][0] <= horizon:
            self.window.popleft()
        ratio = pain_frame_ratio(
            [p for _, p in self.window], self.th.pain_prob_cutoff
        )
        if ratio > self.th.pain_ratio and self.cooldown.ready(now):
            self.cooldown.fire(now)
            return AffectEvent(AffectKind.PAIN, now, ratio)
        return None


class StressSmoother:
    """k-of-n majority over per-window stress verdicts with cooldown."""

    def __init__(self, th: AffectThresholds):
        self.th = th
        self.history: deque[bool] = deque(maxlen=th.stress_n)
        self.cooldown = _Cooldown(th.cooldown_s)

    def push(self, stressed: bool, now_ms: float) -> Optional[AffectEvent]:
        self.history.append(stressed)
        positives = sum(self.history)
        if (
            len(self.history) == self.th.stress_n
            and positives >= self.th.stress_k
            and self.cooldown.ready(now_ms)
        ):
            self.cooldown.fire(now_ms)
            return AffectEvent(AffectKind.STRESS, now_ms, float(positives))
        return None


def attention_window(
    frames: Iterable[bool], th: AffectThresholds, now_ms: float = 0.0
) -> tuple[float, Optional[AffectEvent]]:
    """One-shot window evaluation (no cooldown state)."""
    flags = list(frames)
    ratio = off_screen_ratio(flags)
    if ratio > th.distraction_ratio:
        return ratio, AffectEvent(AffectKind.DISTRACTION, now_ms, ratio)
    return ratio, None


def pain_window(
    probs: Iterable[float], th: AffectThresholds, now_ms: float = 0.0
) -> tuple[float, Optional[AffectEvent]]:
    """One-shot window evaluation (no cooldown state)."""
    vals = list(probs)
    ratio = pain_frame_ratio(vals, th.pain_prob_cutoff)
    if ratio > th.pain_ratio:
        return ratio, AffectEvent(AffectKind.PAIN, now_ms, ratio)
    return ratio, None
