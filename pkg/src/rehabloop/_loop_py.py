"""Pure-Python closed-loop tick driver.

Fallback for the compiled kernel in ``_kernel.pyx``: same tick procedure,
same draw sequence, bit-identical trajectories.  Used when the extension
is unavailable, and as the reference in backend-equivalence tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import SplitMix64
from .assist import (
    AssistConfig,
    HandleDynamicsConfig,
    HandleState,
    advance_reference,
    compute_force,
    step_dynamics,
)
from .patient import MotionState, PatientProfile, motion_step
from .trajectory import TrajectorySpec, eval_at, project

BACKEND_NAME = "python"


@dataclass
class LoopResult:
    t_ms: np.ndarray
    x: np.ndarray
    y: np.ndarray
    deviation: np.ndarray
    force_x: np.ndarray
    force_y: np.ndarray
    ref_s: np.ndarray
    error_m: np.ndarray
    distance_m: float
    final_state: HandleState
    final_ref_s: float
    final_pace_s: float


def run_motion_loop(
    spec: TrajectorySpec,
    assist_cfg: AssistConfig,
    dyn: HandleDynamicsConfig,
    profile: PatientProfile,
    sigma: float,
    n_ticks: int,
    seed: int,
    init: HandleState | None = None,
    s_ref0: float = 0.0,
    s_pace0: float = 0.0,
    passive: bool = False,
) -> LoopResult:
    """Run the patient + controller + dynamics loop for n_ticks.

    The pacing parameter advances at one loop per target_duration; the
    simulated patient pursues it while the controller's own reference
    chases the handle through the windowed forward projection.  With
    passive=True the patient applies no force (pure assist response).
    """
    if init is None:
        init = HandleState(eval_at(spec, s_pace0).position, (0.0, 0.0), 0.0)
    pace = 1.0 / spec.target_duration_s
    rng = SplitMix64(seed)
    motion = MotionState()
    state = init
    s_ref = s_ref0
    s_pace = s_pace0
    t_arr = np.empty(n_ticks)
    x_arr = np.empty(n_ticks)
    y_arr = np.empty(n_ticks)
    dev_arr = np.empty(n_ticks)
    fx_arr = np.empty(n_ticks)
    fy_arr = np.empty(n_ticks)
    refs_arr = np.empty(n_ticks)
    err_arr = np.empty(n_ticks)
    distance = 0.0
    for i in range(n_ticks):
        s_pace = s_pace + pace * dyn.dt
        if passive:
            user = (0.0, 0.0)
        else:
            pace_point = eval_at(spec, s_pace)
            user = motion_step(
                profile,
                pace_point,
                state.position,
                state.velocity,
                state.timestamp_ms / 1000.0,
                dyn.dt,
                sigma,
                motion,
                rng,
            )
        ref = advance_reference(spec, s_ref, state.position)
        s_ref = ref.s
        cmd = compute_force(state, ref, assist_cfg)
        prev_pos = state.position
        state = step_dynamics(state, user, cmd.force, dyn)
        dx = state.position[0] - prev_pos[0]
        dy = state.position[1] - prev_pos[1]
        distance += math.sqrt(dx * dx + dy * dy)
        _, dev = project(spec, state.position)
        t_arr[i] = state.timestamp_ms
        x_arr[i] = state.position[0]
        y_arr[i] = state.position[1]
        dev_arr[i] = dev
        fx_arr[i] = cmd.force[0]
        fy_arr[i] = cmd.force[1]
        refs_arr[i] = ref.s
        err_arr[i] = cmd.error_m
    return LoopResult(
        t_ms=t_arr,
        x=x_arr,
        y=y_arr,
        deviation=dev_arr,
        force_x=fx_arr,
        force_y=fy_arr,
        ref_s=refs_arr,
        error_m=err_arr,
        distance_m=distance,
        final_state=state,
        final_ref_s=s_ref,
        final_pace_s=s_pace,
    )
