"""Exercise path geometry: circle, out-and-back line, and figure-eight.

All three exercises are exposed through one periodic interface: the path
parameter s lives on [0, 1) and every curve is a closed loop of period 1
(the line is folded into an out-and-back sweep).  The scalar math here is
deliberately kept in plain floats and tuples so the compiled loop kernel
can mirror it operation-for-operation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .errors import InputError, SpecificationError

# Half-extent of the square workspace, meters (0.30 m x 0.30 m total).
WORKSPACE_HALF = 0.15

# Coarse samples used by the nearest-point search before refinement.
COARSE_SAMPLES = 720
# Golden-section refinement stops when the bracket is narrower than this.
# Tight enough that a point on the path projects to deviation < 1e-9 m.
REFINE_TOL_S = 1e-10

_TWO_PI = 2.0 * math.pi
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class PathKind(str, Enum):
    CIRCLE = "circle"
    LINE = "line"
    LEMNISCATE = "lemniscate"


@dataclass(frozen=True)
class TrajectorySpec:
    """One exercise path.

    size is the circle radius or the lemniscate half-width; endpoints are
    only meaningful for the line exercise.
    """

    kind: PathKind
    center: tuple[float, float] = (0.0, 0.0)
    size: float = 0.10
    endpoints: tuple[tuple[float, float], tuple[float, float]] = (
        (-0.10, 0.0),
        (0.10, 0.0),
    )
    target_duration_s: float = 240.0
    tolerance_band_m: float = 0.02

    def __post_init__(self) -> None:
        if self.kind in (PathKind.CIRCLE, PathKind.LEMNISCATE) and not self.size > 0:
            raise SpecificationError(f"size must be > 0, got {self.size}")
        if self.kind is PathKind.LINE:
            a, b = self.endpoints
            if a == b:
                raise SpecificationError("line endpoints must be distinct")
        if not self.tolerance_band_m > 0:
            raise SpecificationError("tolerance_band_m must be > 0")
        if not self.target_duration_s > 0:
            raise SpecificationError("target_duration_s must be > 0")

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind.value,
            "center": list(self.center),
            "size": self.size,
            "target_duration_s": self.target_duration_s,
            "tolerance_band_m": self.tolerance_band_m,
        }
        if self.kind is PathKind.LINE:
            d["endpoints"] = [list(self.endpoints[0]), list(self.endpoints[1])]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrajectorySpec":
        kw = {
            "kind": PathKind(d["kind"]),
            "center": tuple(d.get("center", (0.0, 0.0))),
            "size": float(d.get("size", 0.10)),
            "target_duration_s": float(d.get("target_duration_s", 240.0)),
            "tolerance_band_m": float(d.get("tolerance_band_m", 0.02)),
        }
        if "endpoints" in d:
            a, b = d["endpoints"]
            kw["endpoints"] = (tuple(a), tuple(b))
        return cls(**kw)


@dataclass(frozen=True)
class PathPoint:
    s: float
    position: tuple[float, float]
    tangent: tuple[float, float]


def wrap_s(s: float) -> float:
    """Map any real parameter onto [0, 1)."""
    return s - math.floor(s)


def eval_at(spec: TrajectorySpec, s: float) -> PathPoint:
    """Evaluate position and unit tangent at path parameter s.

    s outside [0, 1) wraps modulo 1; every exercise is a period-1 loop.
    """
    s = wrap_s(s)
    cx, cy = spec.center
    if spec.kind is PathKind.CIRCLE:
        th = _TWO_PI * s
        r = spec.size
        return PathPoint(
            s,
            (cx + r * math.cos(th), cy + r * math.sin(th)),
            (-math.sin(th), math.cos(th)),
        )
    if spec.kind is PathKind.LEMNISCATE:
        # Gerono form: x = A cos(th), y = A sin(th) cos(th).
        th = _TWO_PI * s
        a = spec.size
        sth = math.sin(th)
        cth = math.cos(th)
        dx = -a * sth
        dy = a * math.cos(2.0 * th)
        norm = math.sqrt(dx * dx + dy * dy)
        return PathPoint(
            s,
            (cx + a * cth, cy + a * sth * cth),
            (dx / norm, dy / norm),
        )
    # Line: out-and-back sweep, forward on [0, 0.5], backward after.
    (ax, ay), (bx, by) = spec.endpoints
    if s <= 0.5:
        u = 2.0 * s
        sign = 1.0
    else:
        u = 2.0 - 2.0 * s
        sign = -1.0
    dx = bx - ax
    dy = by - ay
    norm = math.sqrt(dx * dx + dy * dy)
    return PathPoint(
        s,
        (ax + dx * u, ay + dy * u),
        (sign * dx / norm, sign * dy / norm),
    )


@lru_cache(maxsize=16)
def _coarse_table(spec: TrajectorySpec) -> tuple[tuple[float, float], ...]:
    return tuple(
        eval_at(spec, i / COARSE_SAMPLES).position for i in range(COARSE_SAMPLES)
    )


def _dist_sq(spec: TrajectorySpec, s: float, px: float, py: float) -> float:
    x, y = eval_at(spec, s).position
    return (x - px) * (x - px) + (y - py) * (y - py)


def _refine(
    spec: TrajectorySpec, lo: float, hi: float, px: float, py: float
) -> float:
    """Golden-section minimum of the squared distance on [lo, hi]."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = _dist_sq(spec, c, px, py)
    fd = _dist_sq(spec, d, px, py)
    while b - a > REFINE_TOL_S:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = _dist_sq(spec, c, px, py)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = _dist_sq(spec, d, px, py)
    return 0.5 * (a + b)


def project(spec: TrajectorySpec, p: tuple[float, float]) -> tuple[PathPoint, float]:
    """Nearest path point to p and the distance to it.

    Coarse scan over COARSE_SAMPLES uniform parameters, then golden-section
    refinement of the bracketing interval; robust for the non-convex
    figure-eight distance function.
    """
    px, py = float(p[0]), float(p[1])
    if not (math.isfinite(px) and math.isfinite(py)):
        raise InputError(f"non-finite point {p!r}")
    table = _coarse_table(spec)
    best_i = 0
    best = math.inf
    for i, (x, y) in enumerate(table):
        d2 = (x - px) * (x - px) + (y - py) * (y - py)
        if d2 < best:
            best = d2
            best_i = i
    lo = (best_i - 1) / COARSE_SAMPLES
    hi = (best_i + 1) / COARSE_SAMPLES
    s_star = wrap_s(_refine(spec, lo, hi, px, py))
    point = eval_at(spec, s_star)
    x, y = point.position
    d2 = (x - px) * (x - px) + (y - py) * (y - py)
    # Keep the coarse candidate when refinement cannot beat it; an exact
    # table hit then projects to deviation exactly 0.
    if best < d2:
        point = eval_at(spec, best_i / COARSE_SAMPLES)
        d2 = best
    return point, math.sqrt(d2)


def project_windowed(
    spec: TrajectorySpec, prev_s: float, p: tuple[float, float], window: float
) -> PathPoint:
    """Nearest path point restricted to the forward arc [prev_s, prev_s + window].

    Guarantees monotone forward progress of a tracking reference: the
    returned parameter never falls behind prev_s and never jumps further
    than window ahead.
    """
    px, py = float(p[0]), float(p[1])
    n = max(2, int(math.ceil(window * COARSE_SAMPLES)))
    best_i = 0
    best = math.inf
    for i in range(n + 1):
        s = prev_s + window * i / n
        d2 = _dist_sq(spec, s, px, py)
        if d2 < best:
            best = d2
            best_i = i
    lo = prev_s + window * max(best_i - 1, 0) / n
    hi = prev_s + window * min(best_i + 1, n) / n
    s_star = _refine(spec, lo, hi, px, py)
    if s_star < prev_s:
        s_star = prev_s
    elif s_star > prev_s + window:
        s_star = prev_s + window
    return eval_at(spec, s_star)


def path_length(spec: TrajectorySpec) -> float:
    """Arc length of one full loop (line: out and back)."""
    if spec.kind is PathKind.CIRCLE:
        return _TWO_PI * spec.size
    if spec.kind is PathKind.LINE:
        (ax, ay), (bx, by) = spec.endpoints
        return 2.0 * math.hypot(bx - ax, by - ay)
    from scipy.integrate import quad

    a = spec.size

    def speed(s: float) -> float:
        th = _TWO_PI * s
        return _TWO_PI * a * math.sqrt(
            math.sin(th) ** 2 + math.cos(2.0 * th) ** 2
        )

    length, _ = quad(speed, 0.0, 1.0, limit=200, epsabs=1e-10, epsrel=1e-10)
    return length
