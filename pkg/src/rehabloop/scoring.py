"""Session scoring: per-sample tracking error and the performance
deviation index (PDI).

The PDI is a weighted sum of three normalized terms -- path deviation,
distance overshoot, and time overshoot -- with the weights strictly
ordered so path accuracy dominates.  Lower is better; a perfect trace
that covers exactly one loop inside the target time scores 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .assist import HandleState
from .errors import InputError, SpecificationError
from .trajectory import TrajectorySpec, path_length, project

DEFAULT_WEIGHTS = (0.6, 0.25, 0.15)


@dataclass(frozen=True)
class ScoringConfig:
    w_err: float = DEFAULT_WEIGHTS[0]
    w_dist: float = DEFAULT_WEIGHTS[1]
    w_time: float = DEFAULT_WEIGHTS[2]

    def __post_init__(self) -> None:
        if min(self.w_err, self.w_dist, self.w_time) < 0:
            raise SpecificationError("weights must be >= 0")
        if abs(self.w_err + self.w_dist + self.w_time - 1.0) > 1e-12:
            raise SpecificationError("weights must sum to 1")
        if not (self.w_err > self.w_dist > self.w_time):
            raise SpecificationError("weights must satisfy w_err > w_dist > w_time")


@dataclass(frozen=True)
class SessionMetrics:
    mean_deviation_m: float
    max_deviation_m: float
    distance_traveled_m: float
    elapsed_time_s: float
    pdi: float
    session_index: int

    def to_dict(self) -> dict:
        return {
            "mean_dev_m": self.mean_deviation_m,
            "max_dev_m": self.max_deviation_m,
            "distance_m": self.distance_traveled_m,
            "elapsed_s": self.elapsed_time_s,
            "pdi": self.pdi,
            "session": self.session_index,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SessionMetrics":
        return cls(
            mean_deviation_m=float(d["mean_dev_m"]),
            max_deviation_m=float(d["max_dev_m"]),
            distance_traveled_m=float(d["distance_m"]),
            elapsed_time_s=float(d["elapsed_s"]),
            pdi=float(d["pdi"]),
            session_index=int(d["session"]),
        )


@dataclass(frozen=True)
class TrendReport:
    best_session: int
    improving: bool
    pdi_list: tuple[float, ...]


def sample_error(spec: TrajectorySpec, state: HandleState) -> float:
    """Distance from the handle to the nearest point of the ideal path."""
    _, deviation = project(spec, state.position)
    return deviation


def pdi_from_terms(
    mean_deviation: float,
    distance: float,
    elapsed_s: float,
    spec: TrajectorySpec,
    cfg: ScoringConfig,
) -> float:
    """Weighted one-sided PDI.

    Distance and time only penalize overshoot: moving less than one loop
    or finishing early is never punished.
    """
    err_term = mean_deviation / spec.tolerance_band_m
    dist_term = max(0.0, distance / path_length(spec) - 1.0)
    time_term = max(0.0, elapsed_s / spec.target_duration_s - 1.0)
    return cfg.w_err * err_term + cfg.w_dist * dist_term + cfg.w_time * time_term


def metrics_from_arrays(
    t_ms: Sequence[float],
    deviations: Sequence[float],
    distance_traveled: float,
    spec: TrajectorySpec,
    cfg: ScoringConfig,
    session_index: int = 1,
) -> SessionMetrics:
    """Aggregate precomputed per-sample deviations into session metrics.

    Mean deviation is time-weighted (trapezoidal) so irregular sampling
    does not bias the score.
    """
    t = np.asarray(t_ms, dtype=float)
    dev = np.asarray(deviations, dtype=float)
    n = len(t)
    if n < 2 or len(dev) != n:
        raise InputError("need >= 2 samples with matching deviations")
    dt = np.diff(t)
    if not np.all(dt > 0):
        raise InputError("timestamps must be strictly increasing")
    total = float(np.sum(0.5 * (dev[:-1] + dev[1:]) * dt))
    elapsed_ms = float(t[-1] - t[0])
    mean_dev = total / elapsed_ms
    max_dev = float(dev.max())
    elapsed_s = elapsed_ms / 1000.0
    return SessionMetrics(
        mean_deviation_m=mean_dev,
        max_deviation_m=max_dev,
        distance_traveled_m=distance_traveled,
        elapsed_time_s=elapsed_s,
        pdi=pdi_from_terms(mean_dev, distance_traveled, elapsed_s, spec, cfg),
        session_index=session_index,
    )


def compute_metrics(
    samples: Sequence[HandleState],
    spec: TrajectorySpec,
    cfg: ScoringConfig,
    session_index: int = 1,
) -> SessionMetrics:
    """Score a recorded sequence of handle states against the ideal path."""
    if len(samples) < 2:
        raise InputError("need >= 2 samples")
    t_ms = [s.timestamp_ms for s in samples]
    deviations = [sample_error(spec, s) for s in samples]
    distance = 0.0
    for a, b in zip(samples, samples[1:]):
        dx = b.position[0] - a.position[0]
        dy = b.position[1] - a.position[1]
        distance += (dx * dx + dy * dy) ** 0.5
    return metrics_from_arrays(t_ms, deviations, distance, spec, cfg, session_index)


def compare_sessions(metrics: Sequence[SessionMetrics]) -> TrendReport:
    """Rank three sessions by PDI; ties go to the latest session."""
    if len(metrics) != 3 or [m.session_index for m in metrics] != [1, 2, 3]:
        raise InputError("expected exactly 3 metrics with session_index 1, 2, 3")
    pdis = tuple(m.pdi for m in metrics)
    best = 1
    for i in (2, 3):
        if pdis[i - 1] <= pdis[best - 1]:
            best = i
    improving = pdis[0] > pdis[1] > pdis[2]
    return TrendReport(best_session=best, improving=improving, pdi_list=pdis)
