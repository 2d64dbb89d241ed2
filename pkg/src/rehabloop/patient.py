"""Synthetic patient: noisy path-tracking hand motion, stress-modulated
RR/ECG generation, and gaze excursions.

Everything here is a pure function of (profile, seed, time), so headless
closed-loop runs replay identically on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._rng import SplitMix64
from .errors import InsufficientDataError, SpecificationError
from .trajectory import PathPoint

# PD pursuit gains for the simulated hand.
PURSUIT_KP = 50.0  # N/m
PURSUIT_KD = 10.0  # N s/m

# Correlation time of the wander (Ornstein-Uhlenbeck) offset, seconds.
NOISE_TAU = 0.5

# RR modulation defaults, milliseconds.
LF_AMP_MS = 30.0  # Mayer wave, 0.1 Hz
HF_AMP_MS = 25.0  # respiratory, 0.25 Hz
RR_JITTER_MS = 5.0


@dataclass(frozen=True)
class PatientProfile:
    skill_sigma: float = 0.02  # m, motion noise amplitude
    lag_tau: float = 0.3  # s, first-order tracking lag
    tremor_amp: float = 0.0  # m
    tremor_freq: float = 5.0  # Hz
    learning_rate: float = 0.7  # per-session sigma decay
    hr_base: float = 70.0  # bpm
    stress_hr_delta: float = 20.0  # bpm
    stress_hrv_scale: float = 0.5
    distraction_rate: float = 2.0  # excursions / minute
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("skill_sigma", "lag_tau", "tremor_amp", "tremor_freq",
                     "stress_hr_delta", "distraction_rate"):
            if getattr(self, name) < 0:
                raise SpecificationError(f"{name} must be >= 0")
        if not 0 < self.learning_rate <= 1:
            raise SpecificationError("learning_rate must be in (0, 1]")
        if not 40 <= self.hr_base <= 120:
            raise SpecificationError("hr_base must be in [40, 120] bpm")
        if not 0 < self.stress_hrv_scale <= 1:
            raise SpecificationError("stress_hrv_scale must be in (0, 1]")

    def session_sigma(self, session_index: int) -> float:
        """Motion noise for a given 1-based session (learning decay)."""
        return self.skill_sigma * self.learning_rate ** (session_index - 1)

    def with_seed(self, seed: int) -> "PatientProfile":
        return replace(self, seed=seed)

    def to_dict(self) -> dict:
        return {
            "skill_sigma": self.skill_sigma,
            "lag_tau": self.lag_tau,
            "tremor_amp": self.tremor_amp,
            "tremor_freq": self.tremor_freq,
            "learning_rate": self.learning_rate,
            "hr_base": self.hr_base,
            "stress_hr_delta": self.stress_hr_delta,
            "stress_hrv_scale": self.stress_hrv_scale,
            "distraction_rate": self.distraction_rate,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PatientProfile":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})


@dataclass
class MotionState:
    """Mutable per-session pursuit state owned by the loop driver."""

    ou: tuple[float, float] = (0.0, 0.0)
    filtered_target: tuple[float, float] | None = None


def motion_step(
    profile: PatientProfile,
    ref: PathPoint,
    position: tuple[float, float],
    velocity: tuple[float, float],
    t_s: float,
    dt: float,
    sigma: float,
    motion: MotionState,
    rng: SplitMix64,
) -> tuple[float, float]:
    """PD pursuit of a noisy, lagged target around the pacing reference.

    The target wanders around ref.position with an OU offset of stationary
    std sigma plus a tremor sinusoid, then passes through a first-order lag
    modeling reaction delay.  Returns the user force in newtons.
    """
    ox, oy = motion.ou
    decay = dt / NOISE_TAU
    kick = sigma * math.sqrt(2.0 * dt / NOISE_TAU)
    ox += -ox * decay + kick * rng.gauss()
    oy += -oy * decay + kick * rng.gauss()
    motion.ou = (ox, oy)
    phase = 2.0 * math.pi * profile.tremor_freq * t_s
    tx = ref.position[0] + ox + profile.tremor_amp * math.sin(phase)
    ty = ref.position[1] + oy + profile.tremor_amp * math.cos(phase)
    if motion.filtered_target is None or profile.lag_tau <= 0:
        fx, fy = tx, ty
    else:
        px, py = motion.filtered_target
        alpha = dt / profile.lag_tau
        fx = px + alpha * (tx - px)
        fy = py + alpha * (ty - py)
    motion.filtered_target = (fx, fy)
    return (
        PURSUIT_KP * (fx - position[0]) - PURSUIT_KD * velocity[0],
        PURSUIT_KP * (fy - position[1]) - PURSUIT_KD * velocity[1],
    )


def generate_rr(
    profile: PatientProfile,
    duration_s: float,
    stressed: bool,
    seed: int,
    lf_amp_ms: float = LF_AMP_MS,
    hf_amp_ms: float = HF_AMP_MS,
    jitter_ms: float = RR_JITTER_MS,
) -> list[float]:
    """Ground-truth R-peak times (ms) over the requested span.

    Stress raises heart rate by stress_hr_delta and scales both the
    LF/HF modulation and the beat jitter down by stress_hrv_scale.
    """
    hr = profile.hr_base + (profile.stress_hr_delta if stressed else 0.0)
    scale = profile.stress_hrv_scale if stressed else 1.0
    a_lf = lf_amp_ms * scale
    a_hf = hf_amp_ms * scale
    jit = jitter_ms * scale
    rng = SplitMix64(seed)
    t = 0.0
    times = [0.0]
    while t < duration_s:
        rr_ms = (
            60000.0 / hr
            + a_lf * math.sin(2.0 * math.pi * 0.1 * t)
            + a_hf * math.sin(2.0 * math.pi * 0.25 * t)
            + jit * rng.gauss()
        )
        rr_ms = min(2000.0, max(300.0, rr_ms))
        t += rr_ms / 1000.0
        times.append(t * 1000.0)
    return times


def _qrs_template(dt_s: np.ndarray) -> np.ndarray:
    """Stylized QRS-plus-T complex, millivolts, centered on the R peak."""
    r = 1.2 * np.exp(-((dt_s / 0.012) ** 2))
    q = -0.25 * np.exp(-(((dt_s + 0.028) / 0.014) ** 2))
    s = -0.30 * np.exp(-(((dt_s - 0.028) / 0.014) ** 2))
    t_wave = 0.22 * np.exp(-(((dt_s - 0.26) / 0.07) ** 2))
    return r + q + s + t_wave


@dataclass(frozen=True)
class EcgStream:
    sampling_rate: float  # Hz
    t_ms: np.ndarray
    mv: np.ndarray

    def __post_init__(self) -> None:
        if self.sampling_rate < 100:
            raise SpecificationError("sampling_rate must be >= 100 Hz")

    @property
    def duration_s(self) -> float:
        return len(self.mv) / self.sampling_rate


def ecg_generate(
    profile: PatientProfile,
    duration_s: float,
    stressed: bool,
    seed: int,
    sampling_rate: float = 130.0,
    noise_mv: float = 0.02,
    **rr_kwargs,
) -> tuple[EcgStream, list[float]]:
    """Synthetic single-lead ECG plus its ground-truth R-peak times."""
    if duration_s < 10:
        raise InsufficientDataError("duration must be >= 10 s")
    peak_times = generate_rr(profile, duration_s, stressed, seed, **rr_kwargs)
    n = int(round(duration_s * sampling_rate))
    t_s = np.arange(n) / sampling_rate
    signal = np.zeros(n)
    half = 0.45  # template support, seconds either side of the peak
    for pt_ms in peak_times:
        pt = pt_ms / 1000.0
        lo = max(0, int((pt - half) * sampling_rate))
        hi = min(n, int((pt + half) * sampling_rate) + 1)
        if lo < hi:
            signal[lo:hi] += _qrs_template(t_s[lo:hi] - pt)
    if noise_mv > 0:
        noise_rng = np.random.default_rng(seed ^ 0xECCE5)
        signal += noise_mv * noise_rng.standard_normal(n)
    stream = EcgStream(sampling_rate, t_ms=t_s * 1000.0, mv=signal)
    in_range = [p for p in peak_times if p < duration_s * 1000.0]
    return stream, in_range


def gaze_generate(
    profile: PatientProfile,
    duration_s: float,
    seed: int,
    fps: float = 10.0,
) -> tuple[list[tuple[float, float, float]], list[float]]:
    """Frame stream of (t_ms, pitch_deg, yaw_deg) plus excursion start times (s).

    On-screen gaze jitters around center; off-screen excursions arrive as a
    Poisson process at distraction_rate per minute, each lasting 2-8 s
    (overlapping excursions simply extend the off-screen run).
    """
    rng = SplitMix64(seed)
    rate_per_s = profile.distraction_rate / 60.0
    starts: list[float] = []
    off_until = -1.0
    if rate_per_s > 0:
        t = -math.log(1.0 - rng.uniform()) / rate_per_s
        while t < duration_s:
            starts.append(t)
            t += -math.log(1.0 - rng.uniform()) / rate_per_s
    lengths = [2.0 + 6.0 * rng.uniform() for _ in starts]
    frames = []
    dt = 1.0 / fps
    t = 0.0
    idx = 0
    while t < duration_s:
        while idx < len(starts) and starts[idx] <= t:
            off_until = max(off_until, starts[idx] + lengths[idx])
            idx += 1
        if t < off_until:
            yaw = 45.0 + 10.0 * rng.gauss()
            pitch = 5.0 * rng.gauss()
        else:
            yaw = 3.0 * rng.gauss()
            pitch = 3.0 * rng.gauss()
        frames.append((t * 1000.0, pitch, yaw))
        t += dt
    return frames, starts
