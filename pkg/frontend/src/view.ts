// Session view state, reconstructed purely from wire traffic. The UI does
// no scoring math: every number here is a verbatim echo of a server
// message, so killing and reopening the client mid-session rebuilds the
// same view from the replayed stream.

import type { WireMessage } from "./wire.js";

export type ConnectionState = "connecting" | "connected" | "disconnected";

export type Phase =
  | "Idle"
  | "Calibration"
  | "Instruction"
  | "ExerciseRunning"
  | "BreakSuggested"
  | "InterSessionSummary"
  | "FinalSummary"
  | "Done";

export interface AgentActionView {
  utterance: string;
  gesture: string;
  expression: string;
  cause: string;
  receivedAtMs: number; // local clock, for render-latency accounting
}

export interface MetricsView {
  mean_dev_m: number;
  max_dev_m: number;
  distance_m: number;
  elapsed_s: number;
  pdi: number;
  session: number;
}

export interface SessionView {
  connection: ConnectionState;
  phase: Phase;
  cursor: [number, number] | null;
  deviation: number | null; // error_m echoed from the last FORCE
  force: [number, number] | null;
  refPoint: [number, number] | null;
  lastAction: AgentActionView | null;
  lastEvent: { kind: string; evidence: number } | null;
  metrics: MetricsView[];
}

export function initialView(): SessionView {
  return {
    connection: "connecting",
    phase: "Idle",
    cursor: null,
    deviation: null,
    force: null,
    refPoint: null,
    lastAction: null,
    lastEvent: null,
    metrics: [],
  };
}

// Observable phase transitions, keyed by the cause of the agent action
// that announces them. The coach owns the real state machine; the view
// only tracks what it can see on the wire.
const CAUSE_PHASE: Record<string, Phase> = {
  Greeting: "Calibration",
  Instruction: "Instruction",
  SessionSummary: "InterSessionSummary",
  FinalSummary: "FinalSummary",
};

const BREAK_CAUSES = ["Stress", "Pain"];

/** Apply one message (inbound or an echo of our own) to the view. */
export function applyMessage(
  view: SessionView,
  msg: WireMessage,
  nowMs: number = Date.now(),
): SessionView {
  const next = { ...view };
  switch (msg.type) {
    case "HANDLE":
      next.cursor = [msg.fields.x as number, msg.fields.y as number];
      break;
    case "FORCE":
      next.deviation = msg.fields.error_m as number;
      next.force = [msg.fields.fx as number, msg.fields.fy as number];
      next.refPoint = [msg.fields.ref_x as number, msg.fields.ref_y as number];
      break;
    case "METRICS":
      next.metrics = [...view.metrics, msg.fields as unknown as MetricsView];
      break;
    case "EVENT":
      next.lastEvent = {
        kind: msg.fields.kind as string,
        evidence: msg.fields.evidence as number,
      };
      break;
    case "AGENT_ACTION": {
      const cause = msg.fields.cause as string;
      next.lastAction = {
        utterance: msg.fields.utterance as string,
        gesture: msg.fields.gesture as string,
        expression: msg.fields.expression as string,
        cause,
        receivedAtMs: nowMs,
      };
      if (cause in CAUSE_PHASE) next.phase = CAUSE_PHASE[cause];
      else if (BREAK_CAUSES.includes(cause) && view.phase === "ExerciseRunning") {
        next.phase = "BreakSuggested";
      }
      break;
    }
    case "SESSION_CTRL": {
      const cmd = msg.fields.command as string;
      if (cmd === "start") next.phase = "Calibration";
      else if (cmd === "abort") next.phase = "Done";
      else if (cmd === "ack") {
        if (view.phase === "Instruction" || view.phase === "InterSessionSummary")
          next.phase = "ExerciseRunning";
        else if (view.phase === "BreakSuggested") next.phase = "ExerciseRunning";
        else if (view.phase === "FinalSummary") next.phase = "Done";
      }
      break;
    }
    case "HELLO":
    case "FRAME":
      break; // liveness / sensor chatter carries no view state
  }
  return next;
}
