"""Line-oriented wire protocol shared by datagram feeds, the stream
transport, and the session log.

One UTF-8 JSON object per datagram/line, keys in lexicographic order,
newline-terminated, floats in shortest round-trip form -- so every message
value has exactly one canonical byte encoding and golden fixtures stay
stable across languages.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .affect import AffectEvent, AffectFrame, AffectKind
from .assist import ForceCommand, HandleState
from .coach import AgentAction, Cause
from .errors import DecodeError, EncodeError
from .scoring import SessionMetrics

PROTOCOL_VERSION = 1
MAX_ENCODED_BYTES = 1200

# type -> (required payload fields, optional payload fields)
_SCHEMA: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "HELLO": (("role",), ()),
    "FRAME": ((), ("pitch_deg", "yaw_deg", "on_screen", "pain_prob")),
    "HANDLE": (("x", "y", "vx", "vy"), ()),
    "FORCE": (("fx", "fy", "ref_s", "ref_x", "ref_y", "error_m"), ()),
    "EVENT": (("kind", "evidence"), ()),
    "METRICS": (
        ("mean_dev_m", "max_dev_m", "distance_m", "elapsed_s", "pdi", "session"),
        (),
    ),
    "AGENT_ACTION": (("utterance", "gesture", "expression", "cause"), ()),
    "SESSION_CTRL": (("command",), ("config",)),
}

_CTRL_COMMANDS = ("start", "ack", "abort", "config")


@dataclass(frozen=True)
class WireMessage:
    type: str
    ts_ms: float
    fields: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.type not in _SCHEMA:
            raise EncodeError(f"unknown message type {self.type!r}")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, WireMessage)
            and self.type == other.type
            and self.ts_ms == other.ts_ms
            and self.fields == other.fields
        )

    def __hash__(self):
        return hash((self.type, self.ts_ms))


def encode(msg: WireMessage) -> bytes:
    """Canonical newline-terminated record for one message."""
    obj = dict(msg.fields)
    obj["v"] = PROTOCOL_VERSION
    obj["type"] = msg.type
    obj["ts_ms"] = msg.ts_ms
    try:
        text = json.dumps(
            obj, sort_keys=True, separators=(",", ":"), allow_nan=False
        )
    except (TypeError, ValueError) as exc:
        raise EncodeError(f"unencodable message: {exc}") from exc
    data = text.encode("utf-8") + b"\n"
    if len(data) > MAX_ENCODED_BYTES:
        raise EncodeError(f"encoded message is {len(data)} bytes (max {MAX_ENCODED_BYTES})")
    return data


def decode(data: bytes | str) -> WireMessage:
    """Parse a record in canonical or any key order; tolerant of unknown keys."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DecodeError(f"invalid UTF-8: {exc}") from exc
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise DecodeError(f"malformed record: {exc}") from exc
    if not isinstance(obj, dict):
        raise DecodeError("record must be a JSON object")
    if obj.get("v") != PROTOCOL_VERSION:
        raise DecodeError(f"unsupported protocol version {obj.get('v')!r}")
    mtype = obj.get("type")
    if mtype not in _SCHEMA:
        raise DecodeError(f"unknown message type {mtype!r}")
    if "ts_ms" not in obj:
        raise DecodeError("missing field 'ts_ms'")
    ts = obj["ts_ms"]
    if not isinstance(ts, (int, float)) or isinstance(ts, bool) or ts < 0:
        raise DecodeError("field 'ts_ms' must be a non-negative number")
    required, optional = _SCHEMA[mtype]
    fields = {}
    for name in required:
        if name not in obj:
            raise DecodeError(f"missing field {name!r} for {mtype}")
        fields[name] = obj[name]
    for name in optional:
        if name in obj:
            fields[name] = obj[name]
    _validate(mtype, fields)
    return WireMessage(type=mtype, ts_ms=ts, fields=fields)


def _validate(mtype: str, fields: dict) -> None:
    def number(name):
        v = fields[name]
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            raise DecodeError(f"field {name!r} must be a finite number")

    if mtype in ("HANDLE", "FORCE"):
        for name in _SCHEMA[mtype][0]:
            number(name)
    elif mtype == "EVENT":
        number("evidence")
        try:
            AffectKind(fields["kind"])
        except ValueError:
            raise DecodeError(f"unknown event kind {fields['kind']!r}") from None
    elif mtype == "METRICS":
        for name in _SCHEMA[mtype][0]:
            number(name)
    elif mtype == "SESSION_CTRL":
        if fields["command"] not in _CTRL_COMMANDS:
            raise DecodeError(f"unknown command {fields['command']!r}")
        if "config" in fields and not isinstance(fields["config"], dict):
            raise DecodeError("field 'config' must be an object")
    elif mtype == "AGENT_ACTION":
        for name in _SCHEMA[mtype][0]:
            if not isinstance(fields[name], str) or not fields[name]:
                raise DecodeError(f"field {name!r} must be a non-empty string")
    elif mtype == "FRAME":
        if not fields:
            raise DecodeError("FRAME must carry at least one channel")
        for name in ("pitch_deg", "yaw_deg", "pain_prob"):
            if name in fields:
                number(name)
        if "on_screen" in fields and not isinstance(fields["on_screen"], bool):
            raise DecodeError("field 'on_screen' must be a boolean")


# -- Domain object adapters -------------------------------------------------


def msg_hello(role: str, ts_ms: float) -> WireMessage:
    return WireMessage("HELLO", ts_ms, {"role": role})


def msg_handle(state: HandleState) -> WireMessage:
    return WireMessage(
        "HANDLE",
        state.timestamp_ms,
        {
            "x": state.position[0],
            "y": state.position[1],
            "vx": state.velocity[0],
            "vy": state.velocity[1],
        },
    )


def handle_to_state(msg: WireMessage) -> HandleState:
    f = msg.fields
    return HandleState((f["x"], f["y"]), (f["vx"], f["vy"]), msg.ts_ms)


def msg_force(cmd: ForceCommand, ts_ms: float) -> WireMessage:
    return WireMessage(
        "FORCE",
        ts_ms,
        {
            "fx": cmd.force[0],
            "fy": cmd.force[1],
            "ref_s": cmd.reference.s,
            "ref_x": cmd.reference.position[0],
            "ref_y": cmd.reference.position[1],
            "error_m": cmd.error_m,
        },
    )


def msg_event(ev: AffectEvent) -> WireMessage:
    return WireMessage(
        "EVENT", ev.onset_ms, {"kind": ev.kind.value, "evidence": ev.evidence}
    )


def event_from_msg(msg: WireMessage) -> AffectEvent:
    return AffectEvent(
        AffectKind(msg.fields["kind"]), msg.ts_ms, msg.fields["evidence"]
    )


def msg_metrics(m: SessionMetrics, ts_ms: float) -> WireMessage:
    return WireMessage("METRICS", ts_ms, m.to_dict())


def metrics_from_msg(msg: WireMessage) -> SessionMetrics:
    return SessionMetrics.from_dict(msg.fields)


def msg_agent_action(a: AgentAction, ts_ms: float) -> WireMessage:
    return WireMessage("AGENT_ACTION", ts_ms, a.to_dict())


def action_from_msg(msg: WireMessage) -> AgentAction:
    f = msg.fields
    return AgentAction(
        utterance=f["utterance"],
        gesture_tag=f["gesture"],
        expression_tag=f["expression"],
        cause=Cause(f["cause"]),
    )


def msg_session_ctrl(command: str, ts_ms: float, config: dict | None = None) -> WireMessage:
    fields: dict = {"command": command}
    if config is not None:
        fields["config"] = config
    return WireMessage("SESSION_CTRL", ts_ms, fields)


def msg_frame(frame: AffectFrame) -> WireMessage:
    fields: dict = {}
    if frame.gaze is not None:
        fields["pitch_deg"] = frame.gaze[0]
        fields["yaw_deg"] = frame.gaze[1]
    if frame.on_screen is not None:
        fields["on_screen"] = frame.on_screen
    if frame.pain_prob is not None:
        fields["pain_prob"] = frame.pain_prob
    return WireMessage("FRAME", frame.timestamp_ms, fields)


def frame_from_msg(msg: WireMessage) -> AffectFrame:
    f = msg.fields
    gaze = None
    if "pitch_deg" in f and "yaw_deg" in f:
        gaze = (f["pitch_deg"], f["yaw_deg"])
    return AffectFrame(
        timestamp_ms=msg.ts_ms,
        gaze=gaze,
        on_screen=f.get("on_screen"),
        pain_prob=f.get("pain_prob"),
    )
