"""Loop-kernel backend selection.

The compiled extension is preferred; the pure-Python mirror is the
fallback.  ``run_motion_loop`` has the same contract either way and the
two produce bit-identical trajectories (covered by tests).
"""

from __future__ import annotations

from . import _loop_py
from .assist import AssistConfig, HandleDynamicsConfig, HandleState
from .patient import NOISE_TAU, PURSUIT_KD, PURSUIT_KP, PatientProfile
from .trajectory import WORKSPACE_HALF, PathKind, TrajectorySpec, eval_at
from .assist import REFERENCE_WINDOW
from ._loop_py import LoopResult

try:
    from . import _kernel

    HAVE_COMPILED = True
except ImportError:
    _kernel = None
    HAVE_COMPILED = False

_KIND_CODE = {PathKind.CIRCLE: 0, PathKind.LINE: 1, PathKind.LEMNISCATE: 2}


def _run_compiled(
    spec: TrajectorySpec,
    assist_cfg: AssistConfig,
    dyn: HandleDynamicsConfig,
    profile: PatientProfile,
    sigma: float,
    n_ticks: int,
    seed: int,
    init: HandleState | None,
    s_ref0: float,
    s_pace0: float,
    passive: bool,
) -> LoopResult:
    if init is None:
        init = HandleState(eval_at(spec, s_pace0).position, (0.0, 0.0), 0.0)
    (ax, ay), (bx, by) = spec.endpoints
    out = _kernel.run_motion_loop_c(
        _KIND_CODE[spec.kind], spec.center[0], spec.center[1], spec.size,
        ax, ay, bx, by,
        spec.target_duration_s,
        assist_cfg.stiffness, assist_cfg.deadband, assist_cfg.force_cap,
        dyn.mass, dyn.damping, dyn.dt,
        WORKSPACE_HALF, REFERENCE_WINDOW,
        PURSUIT_KP, PURSUIT_KD, sigma, profile.lag_tau, NOISE_TAU,
        profile.tremor_amp, profile.tremor_freq,
        n_ticks, seed,
        init.position[0], init.position[1],
        init.velocity[0], init.velocity[1], init.timestamp_ms,
        s_ref0, s_pace0, passive,
    )
    (t, x, y, dev, fx, fy, refs, err,
     distance, fx_, fy_, vx_, vy_, t_ms_, s_ref, s_pace) = out
    return LoopResult(
        t_ms=t, x=x, y=y, deviation=dev, force_x=fx, force_y=fy,
        ref_s=refs, error_m=err, distance_m=distance,
        final_state=HandleState((fx_, fy_), (vx_, vy_), t_ms_),
        final_ref_s=s_ref, final_pace_s=s_pace,
    )


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
    force_backend: str | None = None,
) -> LoopResult:
    backend = force_backend or ("compiled" if HAVE_COMPILED else "python")
    if backend == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel not available")
        return _run_compiled(
            spec, assist_cfg, dyn, profile, sigma, n_ticks, seed,
            init, s_ref0, s_pace0, passive,
        )
    return _loop_py.run_motion_loop(
        spec, assist_cfg, dyn, profile, sigma, n_ticks, seed,
        init, s_ref0, s_pace0, passive,
    )


def backend_name() -> str:
    return "compiled" if HAVE_COMPILED else "python"
