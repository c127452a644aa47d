// Review state for one record: what the canvas shows and which actions
// are live. The latest successful fit is retained until a newer fit
// replaces it, even while a re-annotation marks the view outdated.

import type { CanvasAnnotation } from "./geometry.js";
import type { LightingResponse } from "./api.js";

export type Phase = "empty" | "annotated" | "fitting" | "fitted";

export type RecordReview = {
  phase: Phase;
  annotation: CanvasAnnotation | null;
  // fresh fits carry an annotation hash, restored ones do not; the
  // review logic only needs the shared fields
  fit: LightingResponse | null;
  // true when the annotation changed after `fit` was computed
  stale: boolean;
  error: string | null;
};

export const initialReview: RecordReview = {
  phase: "empty",
  annotation: null,
  fit: null,
  stale: false,
  error: null,
};

export function onAnnotated(state: RecordReview, annotation: CanvasAnnotation): RecordReview {
  return {
    ...state,
    phase: state.fit ? "fitted" : "annotated",
    annotation,
    stale: state.fit !== null,
    error: null,
  };
}

export function onFitStarted(state: RecordReview): RecordReview {
  return { ...state, phase: "fitting", error: null };
}

export function onFitSucceeded(state: RecordReview, fit: LightingResponse): RecordReview {
  return { ...state, phase: "fitted", fit, stale: false, error: null };
}

export function onFitFailed(state: RecordReview, message: string): RecordReview {
  // keep the previous fit visible; the failure only blocks acceptance
  return {
    ...state,
    phase: state.fit ? "fitted" : "annotated",
    stale: state.fit !== null,
    error: message,
  };
}

export function showWarning(state: RecordReview): boolean {
  return state.phase === "fitted" && state.fit !== null && !state.fit.fit.converged;
}

export function showOutdated(state: RecordReview): boolean {
  return state.stale && state.fit !== null;
}

export function canAccept(state: RecordReview): boolean {
  return (
    state.phase === "fitted" &&
    state.fit !== null &&
    state.fit.fit.converged &&
    !state.stale &&
    state.error === null
  );
}

export function canFit(state: RecordReview): boolean {
  return state.annotation !== null && state.phase !== "fitting";
}
