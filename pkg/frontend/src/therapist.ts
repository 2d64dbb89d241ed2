// Therapist panel actions. Each control maps to exactly one SESSION_CTRL
// message; which controls are enabled for a given phase is decided here so
// the DOM layer stays declarative (the server still rejects anything sent
// out of turn).

import { defaultSpec, type PathKind } from "./geometry.js";
import { msgSessionCtrl, type WireMessage } from "./wire.js";
import type { Phase } from "./view.js";

export type AssistLevel = "off" | "low" | "medium" | "high";

export interface TherapistChoice {
  exercise: PathKind;
  assist: AssistLevel;
  sessions?: number;
  perSessionS?: number;
  baselineS?: number;
}

export function buildConfigMessage(
  choice: TherapistChoice,
  ts_ms: number,
): WireMessage {
  const spec = defaultSpec(choice.exercise);
  const config: Record<string, unknown> = {
    exercise: {
      kind: spec.kind,
      center: spec.center,
      size: spec.size,
      ...(spec.kind === "line" ? { endpoints: spec.endpoints } : {}),
    },
    assist: { level: choice.assist },
  };
  if (choice.sessions !== undefined) config.sessions = choice.sessions;
  if (choice.perSessionS !== undefined)
    config.per_session_duration_s = choice.perSessionS;
  if (choice.baselineS !== undefined)
    config.baseline_duration_s = choice.baselineS;
  return msgSessionCtrl("config", ts_ms, config);
}

export function buildStart(ts_ms: number): WireMessage {
  return msgSessionCtrl("start", ts_ms);
}

export function buildAck(ts_ms: number): WireMessage {
  return msgSessionCtrl("ack", ts_ms);
}

export function buildAbort(ts_ms: number): WireMessage {
  return msgSessionCtrl("abort", ts_ms);
}

export function enabledControls(phase: Phase): {
  config: boolean;
  start: boolean;
  ack: boolean;
  abort: boolean;
} {
  return {
    config: phase === "Idle",
    start: phase === "Idle",
    ack: [
      "Instruction",
      "BreakSuggested",
      "InterSessionSummary",
      "FinalSummary",
    ].includes(phase),
    abort: phase !== "Done",
  };
}
