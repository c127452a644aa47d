// DOM wiring. All geometry and statistics arrive from the service; this
// file only routes events into the pure modules and paints the results.

import { ApiClient, ApiError } from "./api.js";
import type { CatalogEntry, WithinReport } from "./api.js";
import {
  annotateCircle,
  identityView,
  panBy,
  toAnnotationPayload,
  zoomAt,
} from "./geometry.js";
import type { Point, ViewTransform } from "./geometry.js";
import { displayCircle, normalGlyphs } from "./overlay.js";
import { coefficientBars, scatterLayout, COEFF_LABELS } from "./chart.js";
import {
  canAccept,
  canFit,
  initialReview,
  onAnnotated,
  onFitFailed,
  onFitStarted,
  onFitSucceeded,
  showOutdated,
  showWarning,
} from "./state.js";
import type { RecordReview } from "./state.js";

// the service base defaults to the page origin; a static-server setup
// points elsewhere with ?api=http://127.0.0.1:8472
const apiBase = new URLSearchParams(window.location.search).get("api") ?? "";
const api = new ApiClient(apiBase);

type AppState = {
  catalog: CatalogEntry[];
  recordId: string | null;
  image: HTMLImageElement | null;
  view: ViewTransform;
  review: RecordReview;
  dragStart: Point | null;
  dragNow: Point | null;
  panning: boolean;
  hint: string;
};

const state: AppState = {
  catalog: [],
  recordId: null,
  image: null,
  view: { ...identityView },
  review: { ...initialReview },
  dragStart: null,
  dragNow: null,
  panning: false,
  hint: "pick an image, then click the sphere center and drag to its rim",
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const canvas = el<HTMLCanvasElement>("canvas");
const ctx = canvas.getContext("2d")!;

// ------------------------------------------------------------ catalog

async function loadCatalog(): Promise<void> {
  state.catalog = await api.listImages();
  const list = el<HTMLUListElement>("image-list");
  list.innerHTML = "";
  for (const entry of state.catalog) {
    for (const rec of entry.records) {
      const li = document.createElement("li");
      const mark = rec.fitted ? " [fit]" : rec.annotated ? " [ann]" : "";
      li.textContent = `${rec.recordId}${mark}`;
      li.onclick = () => selectRecord(rec.recordId);
      list.append(li);
    }
  }
}

function selectRecord(recordId: string): void {
  state.recordId = recordId;
  state.review = { ...initialReview };
  state.view = { ...identityView };
  state.hint = "click the sphere center and drag to its rim";
  const img = new Image();
  img.onload = () => {
    state.image = img;
    draw();
  };
  img.src = api.rawImageUrl(recordId);
  api.getLighting(recordId).then(
    (lighting) => {
      // a stored fit resumes the session for this record
      state.review = onFitSucceeded(state.review, lighting);
      refreshSidePanels();
      draw();
    },
    () => {
      refreshSidePanels();
      draw();
    },
  );
}

// ------------------------------------------------------------- canvas

function draw(): void {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (state.image) {
    ctx.save();
    ctx.translate(state.view.panX, state.view.panY);
    ctx.scale(state.view.zoom, state.view.zoom);
    ctx.drawImage(state.image, 0, 0);
    ctx.restore();
  }

  // in-progress gesture feedback
  if (state.dragStart && state.dragNow) {
    const r = Math.hypot(
      state.dragNow.x - state.dragStart.x,
      state.dragNow.y - state.dragStart.y,
    );
    ctx.strokeStyle = "#e9b44c";
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.arc(state.dragStart.x, state.dragStart.y, r, 0, 2 * Math.PI);
    ctx.stroke();
  }

  const fit = state.review.fit;
  if (fit) {
    const c = displayCircle(fit.fit.circle, state.view);
    ctx.strokeStyle = showOutdated(state.review) ? "#888888" : "#3fb950";
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.arc(c.cx, c.cy, c.r, 0, 2 * Math.PI);
    ctx.stroke();
    for (const g of normalGlyphs(fit.fit.circle, state.view)) {
      ctx.beginPath();
      ctx.moveTo(g.x0, g.y0);
      ctx.lineTo(g.x1, g.y1);
      ctx.stroke();
    }
  }
  el<HTMLDivElement>("hint").textContent = state.hint;
}

canvas.addEventListener("mousedown", (ev) => {
  const p = eventPoint(ev);
  if (ev.button === 1 || ev.shiftKey) {
    state.panning = true;
    state.dragStart = p;
    return;
  }
  state.dragStart = p;
  state.dragNow = p;
});

canvas.addEventListener("mousemove", (ev) => {
  if (!state.dragStart) return;
  const p = eventPoint(ev);
  if (state.panning) {
    state.view = panBy(state.view, p.x - state.dragStart.x, p.y - state.dragStart.y);
    state.dragStart = p;
  } else {
    state.dragNow = p;
  }
  draw();
});

canvas.addEventListener("mouseup", (ev) => {
  const start = state.dragStart;
  state.dragStart = null;
  state.dragNow = null;
  if (state.panning) {
    state.panning = false;
    return;
  }
  if (!start || !state.recordId) return;
  const gesture = annotateCircle(start, eventPoint(ev), state.view);
  if (!gesture.ok) {
    state.hint = gesture.reason;
    draw();
    return;
  }
  state.review = onAnnotated(state.review, gesture.annotation);
  state.hint = `annotated (${gesture.annotation.cx.toFixed(1)}, ` +
    `${gesture.annotation.cy.toFixed(1)}) r=${gesture.annotation.r.toFixed(1)}; ` +
    "submit the fit when ready";
  void api
    .putAnnotation(state.recordId, toAnnotationPayload(state.recordId, gesture.annotation))
    .catch((err: unknown) => {
      state.hint = err instanceof ApiError ? err.message : String(err);
      draw();
    });
  refreshSidePanels();
  draw();
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  const factor = ev.deltaY < 0 ? 1.25 : 0.8;
  state.view = zoomAt(state.view, factor, eventPoint(ev));
  draw();
});

function eventPoint(ev: MouseEvent): Point {
  const rect = canvas.getBoundingClientRect();
  return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
}

// -------------------------------------------------------------- panel

el<HTMLButtonElement>("fit-button").onclick = async () => {
  if (!state.recordId || !canFit(state.review)) return;
  state.review = onFitStarted(state.review);
  refreshSidePanels();
  try {
    const fit = await api.postFit(state.recordId);
    state.review = onFitSucceeded(state.review, fit);
    state.hint = fit.fit.converged
      ? `fit converged in ${fit.fit.iterations} iterations`
      : "fit did not converge; adjust the annotation and retry";
  } catch (err) {
    state.review = onFitFailed(state.review, err instanceof ApiError ? err.message : String(err));
    state.hint = state.review.error ?? "fit failed";
  }
  refreshSidePanels();
  draw();
};

function refreshSidePanels(): void {
  el<HTMLDivElement>("warning").hidden = !showWarning(state.review);
  el<HTMLDivElement>("outdated").hidden = !showOutdated(state.review);
  el<HTMLButtonElement>("fit-button").disabled = !canFit(state.review);
  el<HTMLButtonElement>("accept-button").disabled = !canAccept(state.review);
  const fit = state.review.fit;
  drawCoefficients(fit ? fit.channels.gray : null);
  const preview = el<HTMLImageElement>("render-preview");
  if (fit && state.recordId) {
    preview.src = api.renderUrl(state.recordId) + `&v=${Date.now()}`;
    preview.hidden = false;
  } else {
    preview.hidden = true;
  }
}

function drawCoefficients(gray: number[] | null): void {
  const chart = el<HTMLCanvasElement>("coeff-chart");
  const c2 = chart.getContext("2d")!;
  c2.clearRect(0, 0, chart.width, chart.height);
  if (!gray) return;
  c2.strokeStyle = "#666";
  c2.beginPath();
  c2.moveTo(0, chart.height / 2);
  c2.lineTo(chart.width, chart.height / 2);
  c2.stroke();
  c2.fillStyle = "#4c9be9";
  c2.font = "10px sans-serif";
  for (const bar of coefficientBars(gray, chart.width, chart.height - 14)) {
    c2.fillRect(bar.x, bar.y, bar.w, bar.h);
    c2.fillText(bar.label, bar.x, chart.height - 2);
  }
}

el<HTMLButtonElement>("within-button").onclick = async () => {
  try {
    drawScatter(await api.reportWithin());
  } catch (err) {
    state.hint = err instanceof ApiError ? err.message : String(err);
    draw();
  }
};

function drawScatter(report: WithinReport): void {
  const chart = el<HTMLCanvasElement>("scatter-chart");
  const c2 = chart.getContext("2d")!;
  c2.clearRect(0, 0, chart.width, chart.height);
  const size = chart.height;
  const orders = Object.keys(report.orders).sort();
  orders.forEach((order, idx) => {
    const data = report.orders[order];
    if (!data) return;
    const layout = scatterLayout(data.points, size);
    const ox = idx * size;
    c2.strokeStyle = "#666";
    c2.beginPath();
    c2.moveTo(ox + layout.identity.x0, layout.identity.y0);
    c2.lineTo(ox + layout.identity.x1, layout.identity.y1);
    c2.stroke();
    c2.fillStyle = "#e9574c";
    for (const p of layout.points) {
      c2.beginPath();
      c2.arc(ox + p.x, p.y, 2.5, 0, 2 * Math.PI);
      c2.fill();
    }
    c2.fillStyle = "#ccc";
    c2.font = "11px sans-serif";
    c2.fillText(`order ${order}  r2=${data.r2.toFixed(3)}`, ox + 6, 14);
  });
}

el<HTMLButtonElement>("accept-button").onclick = () => {
  // the accepted fit already lives server-side; this just moves on
  state.hint = "fit accepted; pick the next record";
  draw();
};

void loadCatalog().then(
  () => draw(),
  (err: unknown) => {
    state.hint = `cannot reach the service: ${String(err)}`;
    draw();
  },
);

// exported for the console; handy while reviewing
export { state, COEFF_LABELS };
