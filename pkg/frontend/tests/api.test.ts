import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import type { CatalogEntry, CrossReport, FitResponse } from "../src/api.js";
import { loadFixture } from "./load.js";

const catalog = loadFixture<CatalogEntry[]>("catalog.json");
const fit = loadFixture<FitResponse>("fit.json");
const cross = loadFixture<CrossReport>("cross.json");

type Call = { url: string; init?: RequestInit };

function clientWith(status: number, payload: unknown): { client: ApiClient; calls: Call[] } {
  const calls: Call[] = [];
  const fetcher = (async (url: RequestInfo | URL, init?: RequestInit) => {
    calls.push({ url: String(url), init });
    return new Response(JSON.stringify(payload), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  }) as typeof fetch;
  return { client: new ApiClient("http://svc", fetcher), calls };
}

describe("api client", () => {
  it("lists the catalog", async () => {
    const { client, calls } = clientWith(200, catalog);
    const entries = await client.listImages();
    expect(calls[0]?.url).toBe("http://svc/images");
    expect(entries.length).toBe(2);
    expect(entries[0]?.records[0]?.recordId).toBe("alpha@0");
    expect(entries[0]?.records.map((r) => r.fitted)).toEqual([true, true]);
  });

  it("stores an annotation with a JSON PUT", async () => {
    const payload = { imageId: "alpha@0", approx: { cx: 718, cy: 391, r: 136 } };
    const { client, calls } = clientWith(200, { stored: payload });
    await client.putAnnotation("alpha@0", payload);
    expect(calls[0]?.url).toBe("http://svc/images/alpha%400/annotation");
    expect(calls[0]?.init?.method).toBe("PUT");
    expect(JSON.parse(String(calls[0]?.init?.body))).toEqual(payload);
  });

  it("requests a fit with POST and returns the typed payload", async () => {
    const { client, calls } = clientWith(200, fit);
    const result = await client.postFit("alpha@0");
    expect(calls[0]?.url).toBe("http://svc/images/alpha%400/fit");
    expect(calls[0]?.init?.method).toBe("POST");
    expect(result.fit.circle.r).toBeCloseTo(fit.fit.circle.r, 12);
    expect(result.channels.gray.length).toBe(9);
    expect(result.normalized.length).toBe(8);
  });

  it("builds report URLs from prefix lists", async () => {
    const { client, calls } = clientWith(200, cross);
    const report = await client.reportCross(["alpha"], ["beta", "gamma"]);
    expect(calls[0]?.url).toBe("http://svc/report/cross?a=alpha&b=beta%2Cgamma&r2_mode=median");
    expect(report.r2).toBeCloseTo(cross.r2, 12);
    expect(Object.keys(report.setA).length).toBe(8);
  });

  it("builds render URLs with optional shared scaling", () => {
    const client = new ApiClient("http://svc");
    expect(client.renderUrl("a@0")).toBe("http://svc/images/a%400/render?channel=gray");
    expect(client.renderUrl("a@0", "red", "b@1")).toBe(
      "http://svc/images/a%400/render?channel=red&shared=b%401",
    );
  });

  it("turns service errors into typed exceptions", async () => {
    const { client } = clientWith(409, { error: "busy", detail: "fit already running" });
    const failure = await client.postFit("alpha@0").catch((e: unknown) => e);
    expect(failure).toBeInstanceOf(ApiError);
    if (!(failure instanceof ApiError)) return;
    expect(failure.kind).toBe("busy");
    expect(failure.status).toBe(409);
    expect(failure.message).toBe("fit already running");
  });

  it("copes with non-JSON error bodies", async () => {
    const fetcher = (async () => new Response("gateway broke", { status: 502 })) as typeof fetch;
    const client = new ApiClient("http://svc", fetcher);
    const failure = await client.listImages().catch((e: unknown) => e);
    expect(failure).toBeInstanceOf(ApiError);
    if (!(failure instanceof ApiError)) return;
    expect(failure.status).toBe(502);
    expect(failure.kind).toBe("error");
  });
});
