// Line-oriented wire protocol: one JSON object per line, keys sorted,
// envelope {v, type, ts_ms}. Mirrors the server's schema; the client
// rejects anything the server would reject so bugs surface locally.

export const PROTOCOL_VERSION = 1;
export const MAX_ENCODED_BYTES = 1200;

export type MessageType =
  | "HELLO"
  | "FRAME"
  | "HANDLE"
  | "FORCE"
  | "EVENT"
  | "METRICS"
  | "AGENT_ACTION"
  | "SESSION_CTRL";

export interface WireMessage {
  type: MessageType;
  ts_ms: number;
  fields: Record<string, unknown>;
}

export class DecodeError extends Error {}
export class EncodeError extends Error {}

// type -> [required payload fields, optional payload fields]
const SCHEMA: Record<MessageType, [string[], string[]]> = {
  HELLO: [["role"], []],
  FRAME: [[], ["pitch_deg", "yaw_deg", "on_screen", "pain_prob"]],
  HANDLE: [["x", "y", "vx", "vy"], []],
  FORCE: [["fx", "fy", "ref_s", "ref_x", "ref_y", "error_m"], []],
  EVENT: [["kind", "evidence"], []],
  METRICS: [
    ["mean_dev_m", "max_dev_m", "distance_m", "elapsed_s", "pdi", "session"],
    [],
  ],
  AGENT_ACTION: [["utterance", "gesture", "expression", "cause"], []],
  SESSION_CTRL: [["command"], ["config"]],
};

const CTRL_COMMANDS = ["start", "ack", "abort", "config"];
const EVENT_KINDS = ["Distraction", "Pain", "Stress"];

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function sortedStringify(value: unknown): string {
  if (value === null || typeof value !== "object") {
    if (typeof value === "number" && !Number.isFinite(value)) {
      throw new EncodeError("non-finite number");
    }
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return "[" + value.map(sortedStringify).join(",") + "]";
  }
  const obj = value as Record<string, unknown>;
  const parts = Object.keys(obj)
    .sort()
    .map((k) => JSON.stringify(k) + ":" + sortedStringify(obj[k]));
  return "{" + parts.join(",") + "}";
}

export function encode(msg: WireMessage): string {
  if (!(msg.type in SCHEMA)) {
    throw new EncodeError(`unknown message type ${msg.type}`);
  }
  const obj: Record<string, unknown> = { ...msg.fields };
  obj.v = PROTOCOL_VERSION;
  obj.type = msg.type;
  obj.ts_ms = msg.ts_ms;
  const line = sortedStringify(obj) + "\n";
  if (new TextEncoder().encode(line).length > MAX_ENCODED_BYTES) {
    throw new EncodeError(`encoded message exceeds ${MAX_ENCODED_BYTES} bytes`);
  }
  return line;
}

export function decode(line: string): WireMessage {
  let obj: unknown;
  try {
    obj = JSON.parse(line);
  } catch (err) {
    throw new DecodeError(`malformed record: ${err}`);
  }
  if (obj === null || typeof obj !== "object" || Array.isArray(obj)) {
    throw new DecodeError("record must be a JSON object");
  }
  const rec = obj as Record<string, unknown>;
  if (rec.v !== PROTOCOL_VERSION) {
    throw new DecodeError(`unsupported protocol version ${rec.v}`);
  }
  const mtype = rec.type;
  if (typeof mtype !== "string" || !(mtype in SCHEMA)) {
    throw new DecodeError(`unknown message type ${mtype}`);
  }
  const ts = rec.ts_ms;
  if (!isFiniteNumber(ts) || ts < 0) {
    throw new DecodeError("field 'ts_ms' must be a non-negative number");
  }
  const [required, optional] = SCHEMA[mtype as MessageType];
  const fields: Record<string, unknown> = {};
  for (const name of required) {
    if (!(name in rec)) {
      throw new DecodeError(`missing field '${name}' for ${mtype}`);
    }
    fields[name] = rec[name];
  }
  for (const name of optional) {
    if (name in rec) fields[name] = rec[name];
  }
  validate(mtype as MessageType, fields);
  return { type: mtype as MessageType, ts_ms: ts, fields };
}

function validate(mtype: MessageType, fields: Record<string, unknown>): void {
  const number = (name: string) => {
    if (!isFiniteNumber(fields[name])) {
      throw new DecodeError(`field '${name}' must be a finite number`);
    }
  };
  if (mtype === "HANDLE" || mtype === "FORCE" || mtype === "METRICS") {
    for (const name of SCHEMA[mtype][0]) number(name);
  } else if (mtype === "EVENT") {
    number("evidence");
    if (!EVENT_KINDS.includes(fields.kind as string)) {
      throw new DecodeError(`unknown event kind ${fields.kind}`);
    }
  } else if (mtype === "SESSION_CTRL") {
    if (!CTRL_COMMANDS.includes(fields.command as string)) {
      throw new DecodeError(`unknown command ${fields.command}`);
    }
    if (
      "config" in fields &&
      (fields.config === null ||
        typeof fields.config !== "object" ||
        Array.isArray(fields.config))
    ) {
      throw new DecodeError("field 'config' must be an object");
    }
  } else if (mtype === "AGENT_ACTION") {
    for (const name of SCHEMA[mtype][0]) {
      if (typeof fields[name] !== "string" || fields[name] === "") {
        throw new DecodeError(`field '${name}' must be a non-empty string`);
      }
    }
  } else if (mtype === "FRAME") {
    if (Object.keys(fields).length === 0) {
      throw new DecodeError("FRAME must carry at least one channel");
    }
    for (const name of ["pitch_deg", "yaw_deg", "pain_prob"]) {
      if (name in fields) number(name);
    }
    if ("on_screen" in fields && typeof fields.on_screen !== "boolean") {
      throw new DecodeError("field 'on_screen' must be a boolean");
    }
  }
}

// -- builders for everything the UI sends ------------------------------------

export function msgHello(ts_ms: number): WireMessage {
  return { type: "HELLO", ts_ms, fields: { role: "ui" } };
}

export function msgHandle(
  ts_ms: number,
  x: number,
  y: number,
  vx: number,
  vy: number,
): WireMessage {
  return { type: "HANDLE", ts_ms, fields: { x, y, vx, vy } };
}

export function msgSessionCtrl(
  command: "start" | "ack" | "abort" | "config",
  ts_ms: number,
  config?: Record<string, unknown>,
): WireMessage {
  const fields: Record<string, unknown> = { command };
  if (config !== undefined) fields.config = config;
  return { type: "SESSION_CTRL", ts_ms, fields };
}
