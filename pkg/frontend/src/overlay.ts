// Display-space geometry for the fit overlay. Everything here is a pure
// mapping of service payloads through the view transform; the only
// liberty taken is a half-pixel snap so 1 px strokes stay crisp.

import type { CircleShape, Point, ViewTransform } from "./geometry.js";
import { imageToScreen } from "./geometry.js";

export type DisplayCircle = { cx: number; cy: number; r: number };

export type GlyphSegment = { x0: number; y0: number; x1: number; y1: number };

function snapHalf(v: number): number {
  return Math.round(v * 2) / 2;
}

export function displayCircle(c: CircleShape, view: ViewTransform): DisplayCircle {
  const center = imageToScreen({ x: c.cx, y: c.cy }, view);
  return {
    cx: snapHalf(center.x),
    cy: snapHalf(center.y),
    r: snapHalf(c.r * view.zoom),
  };
}

// Exact (unsnapped) mapping, for tests that bound the snap error.
export function displayCircleExact(c: CircleShape, view: ViewTransform): DisplayCircle {
  const center = imageToScreen({ x: c.cx, y: c.cy }, view);
  return { cx: center.x, cy: center.y, r: c.r * view.zoom };
}

// Tick marks along the rim hinting at the sampled surface normals: short
// outward segments at evenly spaced angles, derived from the service
// circle alone.
export function normalGlyphs(
  c: CircleShape,
  view: ViewTransform,
  count = 24,
  lengthPx = 6,
): GlyphSegment[] {
  const segments: GlyphSegment[] = [];
  for (let k = 0; k < count; k++) {
    const angle = (2 * Math.PI * k) / count;
    const ux = Math.cos(angle);
    const uy = Math.sin(angle);
    const rim: Point = { x: c.cx + c.r * ux, y: c.cy + c.r * uy };
    const p0 = imageToScreen(rim, view);
    segments.push({
      x0: p0.x,
      y0: p0.y,
      x1: p0.x + ux * lengthPx,
      y1: p0.y + uy * lengthPx,
    });
  }
  return segments;
}

export function overlayDistance(a: DisplayCircle, b: DisplayCircle): number {
  return Math.max(
    Math.hypot(a.cx - b.cx, a.cy - b.cy),
    Math.abs(a.r - b.r),
  );
}
