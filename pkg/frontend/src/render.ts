// Canvas renderer: trajectory polyline, tolerance band, cursor, reference
// point, and the assist force vector. Pure drawing; all values come from
// the view.

import { samplePolyline, Viewport, type TrajectorySpec } from "./geometry.js";
import type { SessionView } from "./view.js";

// Expression tags arrive on the wire; the avatar is a glyph, not a rig.
export const EXPRESSION_GLYPHS: Record<string, string> = {
  joy: "\u{1F600}",
  warm: "\u{1F60A}",
  calm: "\u{1F642}",
  concern: "\u{1F615}",
  proud: "\u{1F973}",
  neutral: "\u{1F610}",
};

export function expressionGlyph(tag: string): string {
  return EXPRESSION_GLYPHS[tag] ?? EXPRESSION_GLYPHS.neutral;
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  viewport: Viewport,
  spec: TrajectorySpec,
  view: SessionView,
): void {
  ctx.clearRect(0, 0, viewport.widthPx, viewport.heightPx);

  // tolerance band, then the path itself
  const pts = samplePolyline(spec).map(([x, y]) => viewport.mToPx(x, y));
  ctx.lineJoin = "round";
  ctx.strokeStyle = "#dbeafe";
  ctx.lineWidth = 2 * spec.tolerance_band_m * viewport.scale;
  tracePath(ctx, pts);
  ctx.stroke();
  ctx.strokeStyle = "#1d4ed8";
  ctx.lineWidth = 2;
  tracePath(ctx, pts);
  ctx.stroke();

  if (view.refPoint !== null) {
    const [rx, ry] = viewport.mToPx(...view.refPoint);
    dot(ctx, rx, ry, 4, "#16a34a");
  }
  if (view.cursor !== null) {
    const [cx, cy] = viewport.mToPx(...view.cursor);
    dot(ctx, cx, cy, 6, "#dc2626");
    if (view.force !== null) {
      // force arrow, scaled so the cap spans ~60 px
      const [fx, fy] = view.force;
      ctx.strokeStyle = "#f59e0b";
      ctx.lineWidth = 3;
      ctx.beginPath();
      ctx.moveTo(cx, cy);
      ctx.lineTo(cx + fx * 3, cy - fy * 3);
      ctx.stroke();
    }
  }
}

function tracePath(ctx: CanvasRenderingContext2D, pts: Array<[number, number]>): void {
  ctx.beginPath();
  ctx.moveTo(pts[0][0], pts[0][1]);
  for (const [x, y] of pts.slice(1)) ctx.lineTo(x, y);
}

function dot(
  ctx: CanvasRenderingContext2D,
  x: number,
  y: number,
  r: number,
  color: string,
): void {
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(x, y, r, 0, 2 * Math.PI);
  ctx.fill();
}
