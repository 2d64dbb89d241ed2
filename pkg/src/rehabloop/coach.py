"""Therapy manager: the deterministic state machine that runs calibration,
the three-session exercise protocol, empathic reactions to affect events,
difficulty adaptation, and performance summaries.

Utterances balance two social registers -- warm affirmation and
capability-signaling language -- alternating between them for consecutive
actions of the same cause.  Template choice uses a seeded linear
congruential generator so scripted scenarios replay byte-identically on
any platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .affect import AffectEvent, AffectKind
from .assist import AssistConfig, AssistLevel
from .errors import InputError, ProtocolError, SpecificationError
from .scoring import SessionMetrics, compare_sessions
from .trajectory import TrajectorySpec

SUMMARY_ALLOWANCE_S = 60.0
HARD_PDI_THRESHOLD = 1.0
EASY_PDI_THRESHOLD = 0.2

GESTURES = (
    "wave",
    "nod",
    "open_palms",
    "thumbs_up",
    "clap",
    "lean_in",
    "point_screen",
    "hand_on_heart",
    "calm_down",
    "stretch_arms",
    "head_tilt",
    "applaud",
)

EXPRESSIONS = ("joy", "admiration", "happy-for", "neutral", "concern")


class Phase(str, Enum):
    IDLE = "Idle"
    CALIBRATION = "Calibration"
    INSTRUCTION = "Instruction"
    EXERCISE = "ExerciseRunning"
    BREAK_SUGGESTED = "BreakSuggested"
    INTER_SESSION_SUMMARY = "InterSessionSummary"
    FINAL_SUMMARY = "FinalSummary"
    DONE = "Done"


class Cause(str, Enum):
    GREETING = "Greeting"
    INSTRUCTION = "Instruction"
    DISTRACTION = "Distraction"
    PAIN = "Pain"
    STRESS = "Stress"
    SESSION_SUMMARY = "SessionSummary"
    FINAL_SUMMARY = "FinalSummary"
    DIFFICULTY_CHANGE = "DifficultyChange"


@dataclass(frozen=True)
class AgentAction:
    utterance: str
    gesture_tag: str
    expression_tag: str
    cause: Cause

    def __post_init__(self) -> None:
        if not self.utterance:
            raise SpecificationError("utterance must be non-empty")
        if self.gesture_tag not in GESTURES:
            raise SpecificationError(f"unknown gesture {self.gesture_tag!r}")
        if self.expression_tag not in EXPRESSIONS:
            raise SpecificationError(f"unknown expression {self.expression_tag!r}")

    def to_dict(self) -> dict:
        return {
            "utterance": self.utterance,
            "gesture": self.gesture_tag,
            "expression": self.expression_tag,
            "cause": self.cause.value,
        }


@dataclass(frozen=True)
class SessionPlan:
    exercise: TrajectorySpec
    assist: AssistConfig
    sessions: int = 3
    per_session_duration_s: float = 240.0
    baseline_duration_s: float = 300.0

    def __post_init__(self) -> None:
        if not 1 <= self.sessions <= 10:
            raise SpecificationError("sessions must be in 1..10")
        if not self.per_session_duration_s > 0 or not self.baseline_duration_s > 0:
            raise SpecificationError("durations must be > 0")

    def planned_duration_s(self) -> float:
        """Scheduled training time: sessions plus post-session summaries."""
        return self.sessions * (self.per_session_duration_s + SUMMARY_ALLOWANCE_S)


# -- Utterance bank ---------------------------------------------------------

WARMTH = "warmth"
COMPETENCE = "competence"

# Each cause carries at least two templates per register.  Placeholders are
# interpolated by summarize()/advance().
UTTERANCE_BANK: dict[Cause, list[tuple[str, str]]] = {
    Cause.GREETING: [
        (WARMTH, "WOW! Great to see you. Let's make today count!"),
        (WARMTH, "Welcome back! I'm so glad you're here."),
        (COMPETENCE, "Hello! I suggest we begin with a short calibration to tailor today's plan."),
        (COMPETENCE, "Good to see you. I recommend we record your resting baseline first."),
    ],
    Cause.INSTRUCTION: [
        (WARMTH, "You've got this! Follow the path on the screen at a comfortable pace."),
        (WARMTH, "Take your time, I'm right here with you."),
        (COMPETENCE, "I suggest tracing the highlighted path steadily; the device will assist when needed."),
        (COMPETENCE, "I recommend keeping the handle close to the line for the best overall accuracy."),
    ],
    Cause.DISTRACTION: [
        (WARMTH, "Hey, I'm here with you. Let's bring our focus back to the screen together."),
        (WARMTH, "You're doing great. Just a gentle nudge to look back at the path."),
        (COMPETENCE, "I noticed your gaze wandering; I suggest refocusing on the trajectory to keep your accuracy up."),
        (COMPETENCE, "Attention to the screen improves tracking. I recommend following the moving marker."),
    ],
    Cause.PAIN: [
        (WARMTH, "I'm sorry, that looks uncomfortable. Please ease off if it hurts."),
        (WARMTH, "Your wellbeing comes first. Let's go gentler for a moment."),
        (COMPETENCE, "I detected signs of discomfort. I suggest smaller, slower movements for now."),
        (COMPETENCE, "If the exercise causes pain, I recommend reducing your range until it settles."),
    ],
    Cause.STRESS: [
        (WARMTH, "You've been working so hard. I recommend taking a break, you've earned it."),
        (WARMTH, "Let's breathe for a moment. I suggest taking a break before we continue."),
        (COMPETENCE, "Your physiological signals indicate stress. I recommend taking a break now."),
        (COMPETENCE, "A short pause helps performance. I suggest taking a break before the next stretch."),
    ],
    Cause.SESSION_SUMMARY: [
        (WARMTH, "I'm impressed by your determination. Session {session} deviation index: {pdi}."),
        (WARMTH, "WOW! Another session done. Your deviation index this time was {pdi}."),
        (COMPETENCE, "Session {session} complete. Overall accuracy gave a deviation index of {pdi}."),
        (COMPETENCE, "Your overall accuracy is reflected in a deviation index of {pdi} for session {session}."),
    ],
    Cause.FINAL_SUMMARY: [
        (WARMTH, "I'm impressed by your determination."),
        (WARMTH, "WOW! What a training! You should be proud of yourself."),
        (COMPETENCE, "Overall accuracy summary: deviation index {pdi_list}; your best result came in session {best}."),
        (COMPETENCE, "Comparing overall accuracy, your deviation index per session was {pdi_list}, with session {best} on top."),
    ],
    Cause.DIFFICULTY_CHANGE: [
        (WARMTH, "No worries at all. I'll lend you a stronger hand for the next session."),
        (WARMTH, "You're flying! Let's make it a touch more challenging."),
        (COMPETENCE, "Based on your deviation index I recommend raising the assistance level."),
        (COMPETENCE, "Your accuracy allows it, so I suggest lowering the assistance to challenge you."),
    ],
}

_CAUSE_EXPRESSION = {
    Cause.GREETING: "joy",
    Cause.INSTRUCTION: "neutral",
    Cause.DISTRACTION: "concern",
    Cause.PAIN: "concern",
    Cause.STRESS: "concern",
    Cause.SESSION_SUMMARY: "happy-for",
    Cause.FINAL_SUMMARY: "admiration",
    Cause.DIFFICULTY_CHANGE: "happy-for",
}

_CAUSE_GESTURES = {
    Cause.GREETING: ("wave", "open_palms"),
    Cause.INSTRUCTION: ("point_screen", "nod"),
    Cause.DISTRACTION: ("lean_in", "point_screen"),
    Cause.PAIN: ("hand_on_heart", "calm_down"),
    Cause.STRESS: ("calm_down", "stretch_arms"),
    Cause.SESSION_SUMMARY: ("thumbs_up", "clap"),
    Cause.FINAL_SUMMARY: ("applaud", "clap"),
    Cause.DIFFICULTY_CHANGE: ("nod", "head_tilt"),
}


class _Lcg:
    """Platform-stable template chooser."""

    def __init__(self, seed: int):
        self.state = seed & 0xFFFFFFFF

    def next(self, bound: int) -> int:
        self.state = (1664525 * self.state + 1013904223) & 0xFFFFFFFF
        return (self.state >> 16) % bound


# -- Coach inputs -----------------------------------------------------------


@dataclass(frozen=True)
class Tick:
    ts_ms: float


@dataclass(frozen=True)
class Start:
    ts_ms: float


@dataclass(frozen=True)
class UserAck:
    ts_ms: float


@dataclass
class CoachState:
    plan: SessionPlan
    seed: int = 0
    phase: Phase = Phase.IDLE
    session: int = 0  # 1-based once exercising
    metrics: list[SessionMetrics] = field(default_factory=list)
    events: list[AffectEvent] = field(default_factory=list)
    assist: AssistConfig | None = None
    calibration_started_ms: float | None = None
    break_started_ms: float | None = None
    paused_ms: float = 0.0
    _rng: _Lcg | None = None
    _last_register: dict[Cause, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.assist is None:
            self.assist = self.plan.assist
        if self._rng is None:
            self._rng = _Lcg(self.seed)


def _fmt_pdi(v: float) -> str:
    return f"{v:.3f}"


def _pick(state: CoachState, cause: Cause, **fmt) -> AgentAction:
    """Choose a template, alternating warmth/competence per cause."""
    bank = UTTERANCE_BANK[cause]
    last = state._last_register.get(cause)
    register = COMPETENCE if last == WARMTH else WARMTH
    pool = [t for tag, t in bank if tag == register]
    template = pool[state._rng.next(len(pool))]
    state._last_register[cause] = register
    gestures = _CAUSE_GESTURES[cause]
    gesture = gestures[state._rng.next(len(gestures))]
    return AgentAction(
        utterance=template.format(**fmt),
        gesture_tag=gesture,
        expression_tag=_CAUSE_EXPRESSION[cause],
        cause=cause,
    )


def summarize(
    metrics: Sequence[SessionMetrics], state: CoachState
) -> AgentAction:
    """Performance summary action over the completed sessions.

    Pairs a competence-register body (the numbers) with a warmth phrase;
    with all three sessions present it names the best one.
    """
    if not metrics:
        raise InputError("need at least one session's metrics")
    pdi_list = ", ".join(_fmt_pdi(m.pdi) for m in metrics)
    bank = UTTERANCE_BANK[Cause.FINAL_SUMMARY]
    warmth_pool = [t for tag, t in bank if tag == WARMTH]
    comp_pool = [t for tag, t in bank if tag == COMPETENCE]
    warmth = warmth_pool[state._rng.next(len(warmth_pool))]
    if len(metrics) == 3:
        best = compare_sessions(list(metrics)).best_session
        body = comp_pool[state._rng.next(len(comp_pool))].format(
            pdi_list=pdi_list, best=best
        )
    else:
        # No comparison clause for a degenerate (non-3-session) run.
        body = (
            f"Overall accuracy gave a deviation index of {pdi_list} "
            f"for your training."
        )
    gestures = _CAUSE_GESTURES[Cause.FINAL_SUMMARY]
    return AgentAction(
        utterance=f"{body} {warmth}",
        gesture_tag=gestures[state._rng.next(len(gestures))],
        expression_tag=_CAUSE_EXPRESSION[Cause.FINAL_SUMMARY],
        cause=Cause.FINAL_SUMMARY,
    )


_LEVEL_ORDER = [AssistLevel.OFF, AssistLevel.LOW, AssistLevel.MEDIUM, AssistLevel.HIGH]


def adapt_difficulty(
    history: Sequence[SessionMetrics],
    current: AssistConfig,
    state: CoachState | None = None,
) -> tuple[AssistConfig, Optional[AgentAction]]:
    """One-level assistance step based on the last session's PDI.

    Too-hard sessions (pdi > 1.0) raise assistance; very easy ones
    (pdi < 0.2) lower it to keep the task challenging.
    """
    if not history:
        raise InputError("need at least one completed session")
    level = current.level
    if level is None:
        return current, None  # custom gains: nothing to step
    idx = _LEVEL_ORDER.index(level)
    pdi = history[-1].pdi
    if pdi > HARD_PDI_THRESHOLD and idx < len(_LEVEL_ORDER) - 1:
        new = AssistConfig.from_level(_LEVEL_ORDER[idx + 1])
        action = None
        if state is not None:
            action = _pick(state, Cause.DIFFICULTY_CHANGE)
        return new, action
    if pdi < EASY_PDI_THRESHOLD and idx > 0:
        new = AssistConfig.from_level(_LEVEL_ORDER[idx - 1])
        action = None
        if state is not None:
            action = _pick(state, Cause.DIFFICULTY_CHANGE)
        return new, action
    return current, None


CoachInput = Tick | Start | UserAck | AffectEvent | SessionMetrics


def advance(
    state: CoachState, inp: CoachInput
) -> tuple[CoachState, list[AgentAction]]:
    """Deterministic transition step; raises ProtocolError on illegal input.

    Affect events are only handled while an exercise is running; in any
    other phase they are ignored without action.
    """
    actions: list[AgentAction] = []
    phase = state.phase

    if isinstance(inp, Start):
        if phase is not Phase.IDLE:
            raise ProtocolError(f"start not legal in {phase.value}")
        state.phase = Phase.CALIBRATION
        state.calibration_started_ms = inp.ts_ms
        actions.append(_pick(state, Cause.GREETING))
        return state, actions

    if isinstance(inp, Tick):
        if (
            phase is Phase.CALIBRATION
            and inp.ts_ms - state.calibration_started_ms
            >= state.plan.baseline_duration_s * 1000.0
        ):
            state.phase = Phase.INSTRUCTION
            actions.append(_pick(state, Cause.INSTRUCTION))
        return state, actions

    if isinstance(inp, AffectEvent):
        if phase is not Phase.EXERCISE:
            return state, actions
        state.events.append(inp)
        if inp.kind is AffectKind.STRESS:
            state.phase = Phase.BREAK_SUGGESTED
            state.break_started_ms = inp.onset_ms
            actions.append(_pick(state, Cause.STRESS))
        elif inp.kind is AffectKind.DISTRACTION:
            actions.append(_pick(state, Cause.DISTRACTION))
        else:
            actions.append(_pick(state, Cause.PAIN))
        return state, actions

    if isinstance(inp, SessionMetrics):
        if phase is not Phase.EXERCISE:
            raise ProtocolError(f"metrics not legal in {phase.value}")
        state.metrics.append(inp)
        state.phase = Phase.INTER_SESSION_SUMMARY
        actions.append(
            _pick(
                state,
                Cause.SESSION_SUMMARY,
                session=inp.session_index,
                pdi=_fmt_pdi(inp.pdi),
            )
        )
        new_assist, diff_action = adapt_difficulty(state.metrics, state.assist, state)
        state.assist = new_assist
        if diff_action is not None:
            actions.append(diff_action)
        return state, actions

    if isinstance(inp, UserAck):
        if phase is Phase.INSTRUCTION:
            state.phase = Phase.EXERCISE
            state.session = 1
            return state, actions
        if phase is Phase.BREAK_SUGGESTED:
            state.phase = Phase.EXERCISE
            if state.break_started_ms is not None:
                state.paused_ms += inp.ts_ms - state.break_started_ms
                state.break_started_ms = None
            actions.append(_pick(state, Cause.INSTRUCTION))
            return state, actions
        if phase is Phase.INTER_SESSION_SUMMARY:
            if state.session < state.plan.sessions:
                state.session += 1
                state.phase = Phase.EXERCISE
            else:
                state.phase = Phase.FINAL_SUMMARY
                actions.append(summarize(state.metrics, state))
            return state, actions
        if phase is Phase.FINAL_SUMMARY:
            state.phase = Phase.DONE
            return state, actions
        raise ProtocolError(f"ack not legal in {phase.value}")

    raise InputError(f"unknown coach input {inp!r}")
