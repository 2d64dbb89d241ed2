"""The 22 HRV features (time domain, frequency domain, Poincaré) plus
per-user baseline MinMax normalization.

Frequency features come from a 4 Hz uniformly resampled tachogram,
mean-removed, with a Welch-averaged periodogram (32 s Hann segments,
50% overlap) integrated over the standard VLF/LF/HF bands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import welch

from ..errors import InsufficientDataError, SpecificationError
from .ecg import RrSeries

RESAMPLE_HZ = 4.0
WELCH_SEGMENT_S = 32.0
VLF_BAND = (0.003, 0.04)
LF_BAND = (0.04, 0.15)
HF_BAND = (0.15, 0.40)

MIN_WINDOW_INTERVALS = 20
BASELINE_DURATION_S = 300.0


@dataclass(frozen=True)
class HrvFeatures:
    # time domain
    mean_rr: float  # ms
    median_rr: float  # ms
    sdnn: float  # ms
    rmssd: float  # ms
    sdsd: float  # ms
    nn50: float
    pnn50: float  # %
    nn20: float
    pnn20: float  # %
    mean_hr: float  # bpm
    # frequency domain
    vlf_power: float  # ms^2
    lf_power: float  # ms^2
    hf_power: float  # ms^2
    total_power: float  # ms^2
    lf_norm: float  # %
    hf_norm: float  # %
    lf_hf_ratio: float
    peak_hf_freq: float  # Hz
    # Poincaré
    sd1: float  # ms
    sd2: float  # ms
    sd1_sd2_ratio: float
    ellipse_area: float  # ms^2
    # quality flag, not part of the feature vector
    degenerate_spectrum: bool = False

    def to_vector(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in FEATURE_NAMES], dtype=float)


FEATURE_NAMES = [
    f.name for f in fields(HrvFeatures) if f.name != "degenerate_spectrum"
]
N_FEATURES = len(FEATURE_NAMES)  # 22


def _band_power(f: np.ndarray, psd: np.ndarray, band: tuple[float, float]) -> float:
    mask = (f >= band[0]) & (f <= band[1])
    if mask.sum() < 2:
        return 0.0
    return float(trapezoid(psd[mask], f[mask]))


def compute_features(rr: RrSeries) -> HrvFeatures:
    """All 22 features of one (already windowed) RR series."""
    if len(rr) < MIN_WINDOW_INTERVALS:
        raise InsufficientDataError(
            f"need >= {MIN_WINDOW_INTERVALS} intervals, got {len(rr)}"
        )
    x = rr.intervals
    diffs = np.diff(x)

    mean_rr = float(np.mean(x))
    sdnn = float(np.std(x))
    rmssd = float(np.sqrt(np.mean(diffs * diffs))) if len(diffs) else 0.0
    sdsd = float(np.std(diffs)) if len(diffs) else 0.0
    # Closed thresholds: a difference of exactly 20 ms counts for nn20.
    nn50 = int(np.sum(np.abs(diffs) >= 50.0))
    nn20 = int(np.sum(np.abs(diffs) >= 20.0))
    ndiff = max(1, len(diffs))

    # Spectral features on the 4 Hz resampled, mean-removed tachogram.
    # Anchoring the time axis to the interval sums (not absolute peak
    # times) makes the features exactly shift-invariant.
    t = np.cumsum(x)
    step_ms = 1000.0 / RESAMPLE_HZ
    grid = np.arange(t[0], t[-1], step_ms)
    resampled = np.interp(grid, t, x)
    resampled = resampled - np.mean(resampled)
    nperseg = min(len(resampled), int(WELCH_SEGMENT_S * RESAMPLE_HZ))
    f, psd = welch(
        resampled,
        fs=RESAMPLE_HZ,
        window="hann",
        nperseg=nperseg,
        noverlap=nperseg // 2,
        detrend="constant",
    )
    vlf = _band_power(f, psd, VLF_BAND)
    lf = _band_power(f, psd, LF_BAND)
    hf = _band_power(f, psd, HF_BAND)
    total = vlf + lf + hf
    if lf + hf > 0:
        lf_norm = 100.0 * lf / (lf + hf)
        hf_norm = 100.0 * hf / (lf + hf)
    else:
        lf_norm = hf_norm = 0.0
    degenerate = hf < 1e-12
    lf_hf = 0.0 if degenerate else lf / hf
    hf_mask = (f >= HF_BAND[0]) & (f <= HF_BAND[1])
    peak_hf = float(f[hf_mask][np.argmax(psd[hf_mask])]) if hf_mask.any() else 0.0

    sd1 = rmssd / math.sqrt(2.0)
    sd2 = math.sqrt(max(0.0, 2.0 * sdnn * sdnn - sd1 * sd1))
    return HrvFeatures(
        mean_rr=mean_rr,
        median_rr=float(np.median(x)),
        sdnn=sdnn,
        rmssd=rmssd,
        sdsd=sdsd,
        nn50=nn50,
        pnn50=100.0 * nn50 / ndiff,
        nn20=nn20,
        pnn20=100.0 * nn20 / ndiff,
        mean_hr=60000.0 / mean_rr,
        vlf_power=vlf,
        lf_power=lf,
        hf_power=hf,
        total_power=total,
        lf_norm=lf_norm,
        hf_norm=hf_norm,
        lf_hf_ratio=lf_hf,
        peak_hf_freq=peak_hf,
        sd1=sd1,
        sd2=sd2,
        sd1_sd2_ratio=(sd1 / sd2) if sd2 > 0 else 0.0,
        ellipse_area=math.pi * sd1 * sd2,
        degenerate_spectrum=degenerate,
    )


@dataclass(frozen=True)
class NormalizationParams:
    minima: np.ndarray
    maxima: np.ndarray
    baseline_duration_s: float = BASELINE_DURATION_S

    def __post_init__(self) -> None:
        if len(self.minima) != N_FEATURES or len(self.maxima) != N_FEATURES:
            raise SpecificationError(f"expected {N_FEATURES} feature bounds")
        if np.any(self.minima > self.maxima):
            raise SpecificationError("min must be <= max per feature")

    def to_dict(self) -> dict:
        return {
            "minima": self.minima.tolist(),
            "maxima": self.maxima.tolist(),
            "baseline_duration_s": self.baseline_duration_s,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormalizationParams":
        return cls(
            minima=np.asarray(d["minima"], dtype=float),
            maxima=np.asarray(d["maxima"], dtype=float),
            baseline_duration_s=float(d.get("baseline_duration_s", BASELINE_DURATION_S)),
        )


def fit_baseline(
    baseline_features: list[HrvFeatures],
    baseline_duration_s: float = BASELINE_DURATION_S,
) -> NormalizationParams:
    """Per-feature min/max over the baseline (rest) windows."""
    if len(baseline_features) < 3:
        raise InsufficientDataError("need >= 3 baseline windows")
    mat = np.stack([f.to_vector() for f in baseline_features])
    return NormalizationParams(
        minima=mat.min(axis=0),
        maxima=mat.max(axis=0),
        baseline_duration_s=baseline_duration_s,
    )


def normalize(f: HrvFeatures, p: NormalizationParams) -> np.ndarray:
    """MinMax normalize against the user's baseline; not clamped.

    A degenerate baseline feature (max == min) maps to 0.5 by convention.
    """
    x = f.to_vector()
    span = p.maxima - p.minima
    out = np.empty(N_FEATURES)
    for i in range(N_FEATURES):
        if span[i] == 0:
            out[i] = 0.5
        else:
            out[i] = (x[i] - p.minima[i]) / span[i]
    return out
