import math

import numpy as np
import pytest

from rehabloop._rng import SplitMix64
from rehabloop.assist import (
    AssistConfig,
    AssistLevel,
    ForceCommand,
    HandleDynamicsConfig,
    HandleState,
    advance_reference,
    compute_force,
    step_dynamics,
)
from rehabloop.errors import InputError, SpecificationError
from rehabloop.trajectory import PathKind, PathPoint, TrajectorySpec, eval_at

CIRCLE = TrajectorySpec(kind=PathKind.CIRCLE, size=0.1)
MEDIUM = AssistConfig.from_level(AssistLevel.MEDIUM)
DYN = HandleDynamicsConfig()


def _state(pos, vel=(0.0, 0.0)):
    return HandleState(pos, vel, 0.0)


def _ref(pos):
    return PathPoint(0.0, pos, (0.0, 1.0))


def test_level_mapping():
    assert AssistConfig.from_level("off").stiffness == 0.0
    assert AssistConfig.from_level("low") == AssistConfig(50.0, 0.015)
    assert MEDIUM == AssistConfig(100.0, 0.010)
    assert AssistConfig.from_level("high") == AssistConfig(200.0, 0.005)
    assert MEDIUM.level is AssistLevel.MEDIUM
    assert AssistConfig(73.0, 0.012).level is None


def test_config_validation():
    with pytest.raises(SpecificationError):
        AssistConfig(stiffness=-1.0, deadband=0.01)
    with pytest.raises(SpecificationError):
        AssistConfig(stiffness=10.0, deadband=-0.01)
    with pytest.raises(SpecificationError):
        AssistConfig(stiffness=10.0, deadband=0.01, force_cap=0.0)


def test_deadband_exactness_100k():
    """Inside the deadband the force is the exact zero vector."""
    rng = SplitMix64(99)
    ref = _ref((0.0, 0.0))
    for _ in range(100_000):
        angle = rng.uniform() * 2 * math.pi
        e = rng.uniform() * MEDIUM.deadband
        pos = (e * math.cos(angle), e * math.sin(angle))
        cmd = compute_force(_state(pos), ref, MEDIUM)
        assert cmd.force == (0.0, 0.0)


def test_force_formula_and_direction():
    cmd = compute_force(_state((0.02, 0.0)), _ref((0.0, 0.0)), MEDIUM)
    assert cmd.force == pytest.approx((-1.0, 0.0), abs=1e-12)
    assert cmd.error_m == pytest.approx(0.02)


def test_force_cap_exact():
    cmd = compute_force(_state((1.0, 0.0)), _ref((0.0, 0.0)), MEDIUM)
    assert math.hypot(*cmd.force) == pytest.approx(20.0, abs=1e-9)


def test_continuity_at_threshold():
    """|force| <= k * eps just past the deadband."""
    for eps in (1e-12, 1e-9, 1e-6, 1e-3):
        pos = (MEDIUM.deadband + eps, 0.0)
        cmd = compute_force(_state(pos), _ref((0.0, 0.0)), MEDIUM)
        assert math.hypot(*cmd.force) <= MEDIUM.stiffness * eps + 1e-9


def test_passivity():
    """Force never pushes the handle away from the reference."""
    rng = np.random.default_rng(5)
    for _ in range(10_000):
        pos = tuple(rng.uniform(-0.2, 0.2, size=2))
        refpos = tuple(rng.uniform(-0.1, 0.1, size=2))
        cmd = compute_force(_state(pos), _ref(refpos), MEDIUM)
        dot = cmd.force[0] * (pos[0] - refpos[0]) + cmd.force[1] * (pos[1] - refpos[1])
        assert dot <= 1e-15


def test_off_level_never_pushes():
    off = AssistConfig.from_level(AssistLevel.OFF)
    cmd = compute_force(_state((0.2, 0.1)), _ref((0.0, 0.0)), off)
    assert cmd.force == (0.0, 0.0)


def test_step_dynamics_arithmetic():
    dyn = HandleDynamicsConfig(mass=1.0, damping=0.0, dt=0.01)
    s1 = step_dynamics(_state((0.0, 0.0)), (1.0, 0.0), (0.0, 0.0), dyn)
    assert s1.velocity == pytest.approx((0.01, 0.0), abs=1e-15)
    assert s1.position == pytest.approx((1e-4, 0.0), abs=1e-15)
    assert s1.timestamp_ms == pytest.approx(10.0)


def test_uniform_motion_without_damping():
    dyn = HandleDynamicsConfig(mass=1.0, damping=0.0, dt=0.01)
    s = _state((0.0, 0.0), (0.05, -0.02))
    for _ in range(100):
        s = step_dynamics(s, (0.0, 0.0), (0.0, 0.0), dyn)
    assert s.velocity == pytest.approx((0.05, -0.02), abs=1e-15)


def test_energy_dissipation():
    """No user force, no assist, c > 0: kinetic energy never grows."""
    s = _state((0.0, 0.0), (0.3, -0.4))
    energy = 0.5 * (0.3**2 + 0.4**2)
    for _ in range(500):
        s = step_dynamics(s, (0.0, 0.0), (0.0, 0.0), DYN)
        e = 0.5 * (s.velocity[0] ** 2 + s.velocity[1] ** 2)
        assert e <= energy + 1e-15
        energy = e


def test_workspace_clamp():
    dyn = HandleDynamicsConfig(mass=1.0, damping=0.0, dt=0.02)
    s = _state((0.149, 0.0), (10.0, 0.0))
    s = step_dynamics(s, (0.0, 0.0), (0.0, 0.0), dyn)
    assert s.position[0] == 0.15
    assert s.velocity[0] == 0.0


def test_nonfinite_force_rejected():
    with pytest.raises(InputError):
        step_dynamics(_state((0, 0)), (math.inf, 0.0), (0.0, 0.0), DYN)


def test_dt_bounds():
    with pytest.raises(SpecificationError):
        HandleDynamicsConfig(dt=0.05)
    with pytest.raises(SpecificationError):
        HandleDynamicsConfig(dt=0.0)


def test_advance_reference_fixed_point():
    p0 = eval_at(CIRCLE, 0.3)
    ref = advance_reference(CIRCLE, 0.3, p0.position)
    assert ref.s == pytest.approx(0.3, abs=1e-9)


def test_advance_reference_tracks_small_lead():
    lead = eval_at(CIRCLE, 0.31).position
    ref = advance_reference(CIRCLE, 0.30, lead)
    assert ref.s == pytest.approx(0.31, abs=1e-6)


def test_advance_reference_never_retreats():
    behind = eval_at(CIRCLE, 0.25).position
    ref = advance_reference(CIRCLE, 0.30, behind)
    assert 0.30 - 1e-12 <= ref.s <= 0.35 + 1e-12


def test_passive_convergence_within_5s():
    """Passive handle 0.05 m off-path converges into the deadband."""
    start = eval_at(CIRCLE, 0.0).position
    s = _state((start[0] + 0.05, start[1]))
    s_ref = 0.0
    t_hit = None
    for i in range(500):  # 5 s at 100 Hz
        ref = advance_reference(CIRCLE, s_ref, s.position)
        s_ref = ref.s
        cmd = compute_force(s, ref, MEDIUM)
        s = step_dynamics(s, (0.0, 0.0), cmd.force, DYN)
        if cmd.error_m < MEDIUM.deadband:
            t_hit = (i + 1) * DYN.dt
            break
    assert t_hit is not None and t_hit <= 5.0


def test_determinism():
    def run():
        s = _state((0.12, 0.03), (0.0, 0.0))
        s_ref = 0.0
        out = []
        for _ in range(200):
            ref = advance_reference(CIRCLE, s_ref, s.position)
            s_ref = ref.s
            cmd = compute_force(s, ref, MEDIUM)
            s = step_dynamics(s, (0.001, -0.002), cmd.force, DYN)
            out.append(s)
        return out

    a, b = run(), run()
    assert all(x == y for x, y in zip(a, b))
