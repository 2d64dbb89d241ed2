"""R-peak detection and RR artifact filtering.

The detector is a Pan-Tompkins style pipeline: 5-15 Hz band-pass,
differencing, squaring, 150 ms moving-window integration, adaptive
threshold over candidate peaks, 200 ms refractory period, and final
localization on the raw amplitude maximum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter1d
from scipy.signal import butter, filtfilt, find_peaks

from ..errors import InsufficientDataError, SpecificationError
from ..patient import EcgStream

REFRACTORY_MS = 200.0
INTEGRATION_MS = 150.0
# Minimum interval quality bounds, ms.
RR_MIN_MS = 300.0
RR_MAX_MS = 2000.0
# Integrated signal must be this peaky (max/mean) to count as QRS-bearing.
_SALIENCE_RATIO = 3.0


@dataclass(frozen=True)
class RrSeries:
    """RR tachogram: each interval with the time of its ending peak."""

    times: np.ndarray  # ms
    intervals: np.ndarray  # ms

    def __post_init__(self) -> None:
        if len(self.times) != len(self.intervals):
            raise SpecificationError("times and intervals must align")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise SpecificationError("times must be strictly increasing")

    @classmethod
    def from_peak_times(cls, peak_times) -> "RrSeries":
        peaks = np.asarray(peak_times, dtype=float)
        if len(peaks) > 1 and not np.all(np.diff(peaks) > 0):
            raise SpecificationError("peak times must be strictly increasing")
        return cls(times=peaks[1:], intervals=np.diff(peaks))

    def __len__(self) -> int:
        return len(self.intervals)

    def window(self, t0_ms: float, t1_ms: float) -> "RrSeries":
        """Intervals whose ending peak falls in (t0, t1]."""
        mask = (self.times > t0_ms) & (self.times <= t1_ms)
        return RrSeries(times=self.times[mask], intervals=self.intervals[mask])

    def shifted(self, offset_ms: float) -> "RrSeries":
        return RrSeries(times=self.times + offset_ms, intervals=self.intervals)


def _empty_series() -> RrSeries:
    return RrSeries(times=np.empty(0), intervals=np.empty(0))


def detect_rpeaks(ecg: EcgStream) -> RrSeries:
    """Detect R-peaks; returns the RR series derived from them.

    A stream without QRS morphology (e.g. a clean sinusoid) yields an
    empty series rather than a dense false-peak train.
    """
    if ecg.duration_s < 10.0:
        raise InsufficientDataError("need >= 10 s of ECG")
    fs = ecg.sampling_rate
    x = np.asarray(ecg.mv, dtype=float)

    nyq = fs / 2.0
    b, a = butter(2, [5.0 / nyq, 15.0 / nyq], btype="band")
    band = filtfilt(b, a, x)
    deriv = np.gradient(band)
    squared = deriv * deriv
    win = max(1, int(round(INTEGRATION_MS / 1000.0 * fs)))
    integrated = uniform_filter1d(squared, size=win)

    mean_level = float(np.mean(integrated))
    if mean_level <= 0 or float(np.max(integrated)) / mean_level < _SALIENCE_RATIO:
        return _empty_series()

    refractory_n = int(round(REFRACTORY_MS / 1000.0 * fs))
    cand_idx, _ = find_peaks(integrated, distance=refractory_n)
    if len(cand_idx) == 0:
        return _empty_series()

    # Adaptive signal/noise threshold over the candidate peaks.
    head = integrated[: int(2 * fs)]
    spki = float(np.max(head)) * 0.5 if len(head) else float(integrated[cand_idx[0]])
    npki = mean_level
    accepted = []
    for i in cand_idx:
        v = integrated[i]
        threshold = npki + 0.25 * (spki - npki)
        if v > threshold:
            accepted.append(i)
            spki = 0.125 * v + 0.875 * spki
        else:
            npki = 0.125 * v + 0.875 * npki

    if not accepted:
        return _empty_series()

    # Localize on the raw amplitude maximum near each accepted candidate.
    half = int(round(0.10 * fs))
    peak_idx = []
    for i in accepted:
        lo = max(0, i - half)
        hi = min(len(x), i + half + 1)
        peak_idx.append(lo + int(np.argmax(x[lo:hi])))

    # Enforce the refractory period after localization (keep the taller peak).
    final: list[int] = []
    for i in peak_idx:
        if final and (i - final[-1]) < refractory_n:
            if x[i] > x[final[-1]]:
                final[-1] = i
        else:
            final.append(i)

    peak_times = ecg.t_ms[np.asarray(final, dtype=int)]
    return RrSeries.from_peak_times(peak_times)


def filter_artifacts(rr: RrSeries) -> RrSeries:
    """Drop physiologically implausible intervals.

    Range rule first ([300, 2000] ms), then a running-median rule: an
    interval deviating more than 30% from the median of the surrounding
    11 intervals is removed.  May return an empty series.
    """
    mask = (rr.intervals >= RR_MIN_MS) & (rr.intervals <= RR_MAX_MS)
    times = rr.times[mask]
    ivals = rr.intervals[mask]
    n = len(ivals)
    if n == 0:
        return _empty_series()
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        lo = max(0, min(i - 5, n - 11))
        hi = min(n, lo + 11)
        neighbors = np.delete(ivals[lo:hi], i - lo)
        if len(neighbors) == 0:
            continue
        med = float(np.median(neighbors))
        if med > 0 and abs(ivals[i] - med) > 0.30 * med:
            keep[i] = False
    return RrSeries(times=times[keep], intervals=ivals[keep])
