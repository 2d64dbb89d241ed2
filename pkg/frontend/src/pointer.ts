// Pointer-to-handle pipeline: raw pointer events arrive at whatever rate
// the browser delivers them; HANDLE messages leave at a fixed 50 Hz with
// linear interpolation between the two samples that bracket each tick.

import { Viewport } from "./geometry.js";
import { msgHandle, type WireMessage } from "./wire.js";

export const HANDLE_RATE_HZ = 50;
export const HANDLE_PERIOD_MS = 1000 / HANDLE_RATE_HZ;

interface Sample {
  tMs: number;
  x: number;
  y: number;
}

export class PointerSampler {
  private prev: Sample | null = null;
  private last: Sample | null = null;
  private lastEmit: Sample | null = null;

  constructor(private readonly viewport: Viewport) {}

  /** Record one pointer event in canvas pixel coordinates. */
  push(tMs: number, px: number, py: number): void {
    const [x, y] = this.viewport.clampToWorkspace(...this.viewport.pxToM(px, py));
    this.prev = this.last;
    this.last = { tMs, x, y };
  }

  /** HANDLE message for one 50 Hz tick, or null before any pointer input. */
  sample(tickMs: number): WireMessage | null {
    if (this.last === null) return null;
    let x = this.last.x;
    let y = this.last.y;
    const a = this.prev;
    const b = this.last;
    if (a !== null && b.tMs > a.tMs && tickMs < b.tMs) {
      // interpolate inside the bracketing pointer interval
      const u = Math.max(0, (tickMs - a.tMs) / (b.tMs - a.tMs));
      x = a.x + (b.x - a.x) * Math.min(1, u);
      y = a.y + (b.y - a.y) * Math.min(1, u);
    }
    let vx = 0;
    let vy = 0;
    const e = this.lastEmit;
    if (e !== null && tickMs > e.tMs) {
      const dt = (tickMs - e.tMs) / 1000;
      vx = (x - e.x) / dt;
      vy = (y - e.y) / dt;
    }
    this.lastEmit = { tMs: tickMs, x, y };
    return msgHandle(tickMs, x, y, vx, vy);
  }
}
