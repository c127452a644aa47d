// Typed client for the annotation service. Every shape mirrors the
// service's JSON exactly; the UI never computes geometry or statistics
// on its own.

import type { AnnotationPayload, CircleShape } from "./geometry.js";

export type RecordState = {
  recordId: string;
  annotated: boolean;
  fitted: boolean;
};

export type CatalogEntry = {
  id: string;
  width: number;
  height: number;
  records: RecordState[];
};

export type FitPayload = {
  circle: CircleShape;
  iterations: number;
  finalSigma: number;
  converged: boolean;
  inlierMass: number;
};

export type ChannelsPayload = {
  red: number[];
  green: number[];
  blue: number[];
  gray: number[];
};

export type FitResponse = {
  annotationHash: string;
  imageId: string;
  fit: FitPayload;
  channels: ChannelsPayload;
  normalized: number[];
};

export type LightingResponse = Omit<FitResponse, "annotationHash">;

export type QuantileTriple = { q35: number; q50: number; q65: number };

export type CrossReport = {
  r2: number;
  setA: Record<string, QuantileTriple>;
  setB: Record<string, QuantileTriple>;
};

export type WithinReport = {
  orders: Record<string, { points: [number, number][]; r2: number }>;
};

export type ServiceError = { error: string; detail: string };

export class ApiError extends Error {
  readonly kind: string;
  readonly status: number;

  constructor(status: number, body: ServiceError) {
    super(body.detail || body.error);
    this.kind = body.error;
    this.status = status;
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let body: ServiceError = { error: "error", detail: response.statusText };
    try {
      body = (await response.json()) as ServiceError;
    } catch {
      // non-JSON error body; keep the synthetic one
    }
    throw new ApiError(response.status, body);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  // the default wraps fetch in an arrow so browsers never see it invoked
  // with the client instance as `this`
  constructor(
    private readonly base: string = "",
    private readonly fetcher: typeof fetch = (...args) => fetch(...args),
  ) {}

  rawImageUrl(imageId: string): string {
    return `${this.base}/images/${encodeURIComponent(imageId)}/raw`;
  }

  renderUrl(recordId: string, channel = "gray", sharedWith?: string): string {
    const params = new URLSearchParams({ channel });
    if (sharedWith) params.set("shared", sharedWith);
    return `${this.base}/images/${encodeURIComponent(recordId)}/render?${params}`;
  }

  listImages(): Promise<CatalogEntry[]> {
    return this.fetcher(`${this.base}/images`).then((r) => asJson<CatalogEntry[]>(r));
  }

  putAnnotation(recordId: string, payload: AnnotationPayload): Promise<{ stored: AnnotationPayload }> {
    return this.fetcher(`${this.base}/images/${encodeURIComponent(recordId)}/annotation`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    }).then((r) => asJson<{ stored: AnnotationPayload }>(r));
  }

  postFit(recordId: string): Promise<FitResponse> {
    return this.fetcher(`${this.base}/images/${encodeURIComponent(recordId)}/fit`, {
      method: "POST",
    }).then((r) => asJson<FitResponse>(r));
  }

  getLighting(recordId: string): Promise<LightingResponse> {
    return this.fetcher(`${this.base}/images/${encodeURIComponent(recordId)}/lighting`)
      .then((r) => asJson<LightingResponse>(r));
  }

  reportCross(prefixesA: string[], prefixesB: string[], r2Mode = "median"): Promise<CrossReport> {
    const params = new URLSearchParams({
      a: prefixesA.join(","),
      b: prefixesB.join(","),
      r2_mode: r2Mode,
    });
    return this.fetcher(`${this.base}/report/cross?${params}`)
      .then((r) => asJson<CrossReport>(r));
  }

  reportWithin(): Promise<WithinReport> {
    return this.fetcher(`${this.base}/report/within`).then((r) => asJson<WithinReport>(r));
  }
}
