/** ApiClient: request construction and error mapping, with a fake fetch. */

import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import type { FetchLike } from "../src/api.js";

interface Call {
  url: string;
  method: string;
  body: unknown;
  contentType: string | null;
}

function client(payload: unknown, status = 200): { api: ApiClient; calls: Call[] } {
  const calls: Call[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    const headers = (init?.headers ?? {}) as Record<string, string>;
    calls.push({
      url,
      method: init?.method ?? "GET",
      body: typeof init?.body === "string" ? JSON.parse(init.body) : init?.body,
      contentType: headers["content-type"] ?? null,
    });
    return new Response(JSON.stringify(payload), {
      status,
      headers: { "content-type": "application/json" },
    });
  };
  return { api: new ApiClient("", fetchFn), calls };
}

describe("request construction", () => {
  it("uploads raw bytes with the name in the query string", async () => {
    const { api, calls } = client({ sha256: "x", size: 3, name: "a b.csv" });
    const bytes = new Uint8Array([1, 2, 3]);
    await api.upload(bytes, "a b.csv");
    const call = calls[0]!;
    expect(call.url).toBe("/api/v1/uploads?name=a%20b.csv");
    expect(call.method).toBe("POST");
    expect(call.body).toBe(bytes);
    expect(call.contentType).toBeNull();
  });

  it("plans with the spec wrapped in a json body", async () => {
    const { api, calls } = client({ plan_id: "p" });
    const spec = { device_type: "scale", pattern: "event_attribute" };
    await api.plan(spec);
    const call = calls[0]!;
    expect(call.url).toBe("/api/v1/integrations/plan");
    expect(call.body).toEqual({ spec });
    expect(call.contentType).toBe("application/json");
  });

  it("escapes path and query parameters", async () => {
    const { api, calls } = client({});
    await api.execute("p/1");
    await api.dfg("Truck & Co");
    expect(calls[0]!.url).toBe("/api/v1/integrations/plans/p%2F1/execute");
    expect(calls[1]!.url).toBe("/api/v1/ocel/dfg?object_type=Truck%20%26%20Co");
  });

  it("prefixes the base url without doubling slashes", async () => {
    const calls: Call[] = [];
    const fetchFn: FetchLike = async (url, init) => {
      calls.push({ url, method: init?.method ?? "GET", body: null, contentType: null });
      return new Response("{}", { status: 200, headers: { "content-type": "application/json" } });
    };
    await new ApiClient("http://127.0.0.1:8000/", fetchFn).stats();
    expect(calls[0]!.url).toBe("http://127.0.0.1:8000/api/v1/ocel/stats");
  });
});

describe("error mapping", () => {
  it("turns an error payload into a typed ApiError", async () => {
    const { api } = client({
      error: { code: "spec", message: "bad pattern", field_path: "pattern" },
    }, 422);
    const err = await api.plan({}).catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    const apiErr = err as ApiError;
    expect(apiErr.status).toBe(422);
    expect(apiErr.code).toBe("spec");
    expect(apiErr.fieldPath).toBe("pattern");
    expect(apiErr.message).toBe("bad pattern");
  });

  it("falls back to a generic error on a non-json body", async () => {
    const fetchFn: FetchLike = async () => new Response("oops", { status: 500 });
    const api = new ApiClient("", fetchFn);
    const err = await api.stats().catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).code).toBe("error");
    expect((err as ApiError).message).toBe("HTTP 500");
  });

  it("resolves with the parsed payload on success", async () => {
    const { api } = client({ status: "ok", version: "1.0" });
    await expect(api.health()).resolves.toEqual({ status: "ok", version: "1.0" });
  });
});
