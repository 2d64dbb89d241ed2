"""Assist-as-needed force law and the simulated handle dynamics.

The controller pulls the handle toward a reference point on the exercise
path, but only once the error leaves a deadband: inside the band the user
works unassisted, which preserves the deliberate error budget that active
training needs.  The handle itself is a planar mass-damper integrated with
semi-implicit Euler, standing in for the physical device.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InputError, SpecificationError
from .trajectory import (
    WORKSPACE_HALF,
    PathPoint,
    TrajectorySpec,
    project_windowed,
)

# How far (in path parameter) the reference may advance per update.
REFERENCE_WINDOW = 0.05


class AssistLevel(str, Enum):
    OFF = "off"
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


# level -> (stiffness N/m, deadband m)
_LEVEL_GAINS = {
    AssistLevel.OFF: (0.0, 0.0),
    AssistLevel.LOW: (50.0, 0.015),
    AssistLevel.MEDIUM: (100.0, 0.010),
    AssistLevel.HIGH: (200.0, 0.005),
}

DEFAULT_FORCE_CAP = 20.0


@dataclass(frozen=True)
class AssistConfig:
    stiffness: float  # N/m
    deadband: float  # m
    force_cap: float = DEFAULT_FORCE_CAP

    def __post_init__(self) -> None:
        if self.deadband < 0:
            raise SpecificationError("deadband must be >= 0")
        if self.stiffness < 0:
            raise SpecificationError("stiffness must be >= 0")
        if not self.force_cap > 0:
            raise SpecificationError("force_cap must be > 0")

    @classmethod
    def from_level(cls, level: AssistLevel | str) -> "AssistConfig":
        k, d = _LEVEL_GAINS[AssistLevel(level)]
        return cls(stiffness=k, deadband=d)

    @property
    def level(self) -> AssistLevel | None:
        """The named level matching this config, if any."""
        for lvl, (k, d) in _LEVEL_GAINS.items():
            if k == self.stiffness and d == self.deadband:
                return lvl
        return None


@dataclass(frozen=True)
class HandleState:
    position: tuple[float, float]  # m
    velocity: tuple[float, float]  # m/s
    timestamp_ms: float


@dataclass(frozen=True)
class ForceCommand:
    force: tuple[float, float]  # N
    reference: PathPoint
    error_m: float


@dataclass(frozen=True)
class HandleDynamicsConfig:
    mass: float = 1.0  # kg
    damping: float = 5.0  # N s/m
    dt: float = 0.01  # s

    def __post_init__(self) -> None:
        if not self.mass > 0:
            raise SpecificationError("mass must be > 0")
        if self.damping < 0:
            raise SpecificationError("damping must be >= 0")
        if not 0 < self.dt <= 0.02:
            raise SpecificationError("dt must be in (0, 0.02]")


def advance_reference(
    spec: TrajectorySpec,
    prev_s: float,
    handle_pos: tuple[float, float],
    window: float = REFERENCE_WINDOW,
) -> PathPoint:
    """Move the tracking reference toward the handle, forward only.

    Projection of the handle restricted to the arc [prev_s, prev_s+window]
    so the reference never jumps backward or shortcuts across the
    figure-eight crossing.
    """
    return project_windowed(spec, prev_s, handle_pos, window)


def compute_force(
    state: HandleState, ref: PathPoint, cfg: AssistConfig
) -> ForceCommand:
    """Deadband restoring force: zero inside the band, linear past it, capped."""
    ex = state.position[0] - ref.position[0]
    ey = state.position[1] - ref.position[1]
    e = math.sqrt(ex * ex + ey * ey)
    if e <= cfg.deadband or cfg.stiffness == 0.0:
        return ForceCommand((0.0, 0.0), ref, e)
    magnitude = cfg.stiffness * (e - cfg.deadband)
    if magnitude > cfg.force_cap:
        magnitude = cfg.force_cap
    # Directed from the handle toward the reference.
    scale = magnitude / e
    return ForceCommand((-ex * scale, -ey * scale), ref, e)


def step_dynamics(
    state: HandleState,
    user_force: tuple[float, float],
    assist_force: tuple[float, float],
    dyn: HandleDynamicsConfig,
) -> HandleState:
    """Semi-implicit Euler step of the mass-damper handle.

    Position is clamped to the workspace square; velocity along a clamped
    axis is zeroed.
    """
    fx = user_force[0] + assist_force[0]
    fy = user_force[1] + assist_force[1]
    if not (math.isfinite(fx) and math.isfinite(fy)):
        raise InputError("non-finite force input")
    vx = state.velocity[0] + dyn.dt * (fx - dyn.damping * state.velocity[0]) / dyn.mass
    vy = state.velocity[1] + dyn.dt * (fy - dyn.damping * state.velocity[1]) / dyn.mass
    x = state.position[0] + dyn.dt * vx
    y = state.position[1] + dyn.dt * vy
    if x > WORKSPACE_HALF:
        x = WORKSPACE_HALF
        vx = 0.0
    elif x < -WORKSPACE_HALF:
        x = -WORKSPACE_HALF
        vx = 0.0
    if y > WORKSPACE_HALF:
        y = WORKSPACE_HALF
        vy = 0.0
    elif y < -WORKSPACE_HALF:
        y = -WORKSPACE_HALF
        vy = 0.0
    return HandleState((x, y), (vx, vy), state.timestamp_ms + dyn.dt * 1000.0)
