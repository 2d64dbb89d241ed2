// Browser entry point: wires the client, pointer pipeline, renderer, HUD,
// coach panel, and therapist controls to the DOM. All session logic lives
// in the imported modules; this file only moves values between them and
// the page.

import { UiClient } from "./client.js";
import { defaultSpec, Viewport, type PathKind } from "./geometry.js";
import { HANDLE_PERIOD_MS, PointerSampler } from "./pointer.js";
import { drawScene, expressionGlyph } from "./render.js";
import {
  buildAbort,
  buildAck,
  buildConfigMessage,
  buildStart,
  enabledControls,
  type AssistLevel,
} from "./therapist.js";
import { WebSocketTransport } from "./transport.js";
import type { SessionView } from "./view.js";

const canvas = document.getElementById("exercise") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const viewport = new Viewport(canvas.width, canvas.height);
const sampler = new PointerSampler(viewport);

const el = (id: string) => document.getElementById(id)!;
const exerciseSelect = el("exercise-kind") as HTMLSelectElement;
const assistSelect = el("assist-level") as HTMLSelectElement;

let spec = defaultSpec("circle");

const url = new URLSearchParams(location.search).get("server") ?? "ws://127.0.0.1:47811";
const client = new UiClient(() => new WebSocketTransport(url));

function renderHud(view: SessionView): void {
  el("banner").textContent = view.connection;
  el("banner").className = `banner ${view.connection}`;
  el("phase").textContent = view.phase;
  // HUD numbers are verbatim wire values; no formatting math beyond display
  el("deviation").textContent =
    view.deviation === null ? "-" : String(view.deviation);
  const last = view.metrics[view.metrics.length - 1];
  el("pdi").textContent = last === undefined ? "-" : String(last.pdi);
  el("history").textContent = view.metrics
    .map((m) => `session ${m.session}: pdi ${m.pdi}`)
    .join("\n");
  if (view.lastAction !== null) {
    el("utterance").textContent = view.lastAction.utterance;
    el("avatar").textContent = expressionGlyph(view.lastAction.expression);
  }
  if (view.lastEvent !== null) {
    el("event").textContent = `${view.lastEvent.kind} (${view.lastEvent.evidence})`;
  }
  const controls = enabledControls(view.phase);
  (el("btn-start") as HTMLButtonElement).disabled = !controls.start;
  (el("btn-ack") as HTMLButtonElement).disabled = !controls.ack;
  (el("btn-abort") as HTMLButtonElement).disabled = !controls.abort;
  exerciseSelect.disabled = !controls.config;
  assistSelect.disabled = !controls.config;
}

client.onView = (view) => {
  renderHud(view);
  drawScene(ctx, viewport, spec, view);
};

canvas.addEventListener("pointermove", (ev) => {
  const rect = canvas.getBoundingClientRect();
  sampler.push(performance.now(), ev.clientX - rect.left, ev.clientY - rect.top);
});

setInterval(() => {
  if (client.view.phase !== "ExerciseRunning") return;
  const msg = sampler.sample(performance.now());
  if (msg !== null) client.send(msg);
}, HANDLE_PERIOD_MS);

el("btn-start").addEventListener("click", () => {
  spec = defaultSpec(exerciseSelect.value as PathKind);
  client.send(
    buildConfigMessage(
      {
        exercise: exerciseSelect.value as PathKind,
        assist: assistSelect.value as AssistLevel,
      },
      performance.now(),
    ),
  );
  client.send(buildStart(performance.now()));
});
el("btn-ack").addEventListener("click", () => client.send(buildAck(performance.now())));
el("btn-abort").addEventListener("click", () => client.send(buildAbort(performance.now())));

client.connect();
