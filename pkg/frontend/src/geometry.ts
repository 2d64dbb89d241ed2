// Workspace geometry: the exercise paths the server knows, rendered as
// polylines, plus the canvas-pixels <-> workspace-meters mapping used by
// both the renderer and the pointer pipeline.

export const WORKSPACE_HALF_M = 0.15;

export type PathKind = "circle" | "line" | "lemniscate";

export interface TrajectorySpec {
  kind: PathKind;
  center: [number, number];
  size: number;
  endpoints: [[number, number], [number, number]];
  tolerance_band_m: number;
}

export function defaultSpec(kind: PathKind): TrajectorySpec {
  return {
    kind,
    center: [0, 0],
    size: 0.1,
    endpoints: [
      [-0.1, 0],
      [0.1, 0],
    ],
    tolerance_band_m: 0.02,
  };
}

/** Position on the path at parameter s in [0, 1); same formulas as the server. */
export function evalAt(spec: TrajectorySpec, s: number): [number, number] {
  s = s - Math.floor(s);
  const [cx, cy] = spec.center;
  if (spec.kind === "circle") {
    const th = 2 * Math.PI * s;
    return [cx + spec.size * Math.cos(th), cy + spec.size * Math.sin(th)];
  }
  if (spec.kind === "lemniscate") {
    const th = 2 * Math.PI * s;
    return [
      cx + spec.size * Math.cos(th),
      cy + spec.size * Math.sin(th) * Math.cos(th),
    ];
  }
  // line: out and back
  const u = s <= 0.5 ? 2 * s : 2 - 2 * s;
  const [[ax, ay], [bx, by]] = spec.endpoints;
  return [ax + (bx - ax) * u, ay + (by - ay) * u];
}

export function samplePolyline(
  spec: TrajectorySpec,
  n = 256,
): Array<[number, number]> {
  const pts: Array<[number, number]> = [];
  for (let i = 0; i <= n; i++) pts.push(evalAt(spec, i / n));
  return pts;
}

/** Square canvas viewport centered on the workspace. */
export class Viewport {
  readonly scale: number; // px per meter

  constructor(readonly widthPx: number, readonly heightPx: number) {
    this.scale = Math.min(widthPx, heightPx) / (2 * WORKSPACE_HALF_M);
  }

  mToPx(x: number, y: number): [number, number] {
    // canvas y grows downward
    return [this.widthPx / 2 + x * this.scale, this.heightPx / 2 - y * this.scale];
  }

  pxToM(px: number, py: number): [number, number] {
    return [
      (px - this.widthPx / 2) / this.scale,
      (this.heightPx / 2 - py) / this.scale,
    ];
  }

  /** Pointer outside the canvas clamps to the workspace edge. */
  clampToWorkspace(x: number, y: number): [number, number] {
    const h = WORKSPACE_HALF_M;
    return [Math.min(h, Math.max(-h, x)), Math.min(h, Math.max(-h, y))];
  }
}
