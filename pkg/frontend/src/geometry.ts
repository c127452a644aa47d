// View transform and the annotate gesture. Annotations live in image
// space; screen coordinates exist only at the event boundary.

export type Point = { x: number; y: number };

export type ViewTransform = { zoom: number; panX: number; panY: number };

export type CircleShape = { cx: number; cy: number; r: number };

export type CanvasAnnotation = {
  cx: number;
  cy: number;
  r: number;
  view: ViewTransform;
};

export type AnnotationPayload = {
  imageId: string;
  approx: { cx: number; cy: number; r: number };
  cropBox?: { x: number; y: number; w: number; h: number };
};

export const MIN_RADIUS_PX = 3;

export const identityView: ViewTransform = { zoom: 1, panX: 0, panY: 0 };

export function imageToScreen(p: Point, view: ViewTransform): Point {
  return { x: p.x * view.zoom + view.panX, y: p.y * view.zoom + view.panY };
}

export function screenToImage(p: Point, view: ViewTransform): Point {
  return {
    x: (p.x - view.panX) / view.zoom,
    y: (p.y - view.panY) / view.zoom,
  };
}

export function zoomAt(view: ViewTransform, factor: number, anchor: Point): ViewTransform {
  // keep the screen point `anchor` fixed while scaling
  const zoom = view.zoom * factor;
  return {
    zoom,
    panX: anchor.x - (anchor.x - view.panX) * factor,
    panY: anchor.y - (anchor.y - view.panY) * factor,
  };
}

export function panBy(view: ViewTransform, dx: number, dy: number): ViewTransform {
  return { zoom: view.zoom, panX: view.panX + dx, panY: view.panY + dy };
}

export type GestureResult =
  | { ok: true; annotation: CanvasAnnotation }
  | { ok: false; reason: string };

export function annotateCircle(
  click: Point,
  drag: Point,
  view: ViewTransform,
): GestureResult {
  const center = screenToImage(click, view);
  const edge = screenToImage(drag, view);
  const r = Math.hypot(edge.x - center.x, edge.y - center.y);
  if (r < MIN_RADIUS_PX) {
    return {
      ok: false,
      reason: `radius ${r.toFixed(1)} px is below the ${MIN_RADIUS_PX} px minimum; drag further from the center`,
    };
  }
  return { ok: true, annotation: { cx: center.x, cy: center.y, r, view } };
}

export function toAnnotationPayload(
  recordId: string,
  ann: CanvasAnnotation,
  cropBox?: { x: number; y: number; w: number; h: number },
): AnnotationPayload {
  const payload: AnnotationPayload = {
    imageId: recordId,
    approx: { cx: ann.cx, cy: ann.cy, r: ann.r },
  };
  if (cropBox) payload.cropBox = cropBox;
  return payload;
}
