import { describe, expect, it } from "vitest";

import { Viewport } from "../src/geometry.js";
import { HANDLE_PERIOD_MS, PointerSampler } from "../src/pointer.js";

const viewport = new Viewport(600, 600);

describe("pointer sampler", () => {
  it("emits nothing before any pointer input", () => {
    const sampler = new PointerSampler(viewport);
    expect(sampler.sample(0)).toBeNull();
  });

  it("maps the canvas center to the workspace origin within half a pixel", () => {
    const sampler = new PointerSampler(viewport);
    sampler.push(0, 300, 300);
    const msg = sampler.sample(HANDLE_PERIOD_MS)!;
    const halfPxM = 0.5 / viewport.scale;
    expect(Math.abs(msg.fields.x as number)).toBeLessThan(halfPxM);
    expect(Math.abs(msg.fields.y as number)).toBeLessThan(halfPxM);
  });

  it("a stationary pointer yields constant positions and zero velocity", () => {
    const sampler = new PointerSampler(viewport);
    sampler.push(0, 450, 300);
    const first = sampler.sample(HANDLE_PERIOD_MS)!;
    for (let k = 2; k <= 10; k++) {
      const msg = sampler.sample(k * HANDLE_PERIOD_MS)!;
      expect(msg.fields.x).toBe(first.fields.x);
      expect(msg.fields.y).toBe(first.fields.y);
      expect(msg.fields.vx).toBe(0);
      expect(msg.fields.vy).toBe(0);
    }
  });

  it("interpolates between bracketing pointer events", () => {
    const sampler = new PointerSampler(viewport);
    sampler.push(0, 300, 300);
    sampler.sample(10);
    sampler.push(40, 340, 300); // moving right
    const msg = sampler.sample(20)!; // tick inside [0, 40]
    const [xAt20] = viewport.pxToM(320, 300);
    expect(msg.fields.x as number).toBeCloseTo(xAt20, 10);
    expect(msg.fields.vx as number).toBeGreaterThan(0);
  });

  it("clamps off-canvas pointers to the workspace edge", () => {
    const sampler = new PointerSampler(viewport);
    sampler.push(0, 10_000, 300);
    const msg = sampler.sample(HANDLE_PERIOD_MS)!;
    expect(msg.fields.x).toBe(0.15);
  });

  it("runs at 50 Hz", () => {
    expect(HANDLE_PERIOD_MS).toBe(20);
  });
});
