/** Typed fetch client for the HTTP API. All access goes through here. */

import type {
  DfgPayload,
  ErrorPayload,
  IngestPayload,
  JobPayload,
  MappingPayload,
  PlanPayload,
  RunPayload,
  StatsPayload,
  SummaryPayload,
  UploadPayload,
} from "./model.js";

export class ApiError extends Error {
  readonly code: string;
  readonly fieldPath: string | null;
  readonly status: number;

  constructor(status: number, code: string, message: string, fieldPath: string | null) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.fieldPath = fieldPath;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(base = "", fetchFn: FetchLike = (...args) => globalThis.fetch(...args)) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async request<T>(method: string, path: string, body?: BodyInit, json?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (json !== undefined) {
      init.body = JSON.stringify(json);
      init.headers = { "content-type": "application/json" };
    } else if (body !== undefined) {
      init.body = body;
    }
    const response = await this.fetchFn(`${this.base}${path}`, init);
    if (!response.ok) {
      let payload: ErrorPayload | null = null;
      try {
        payload = (await response.json()) as ErrorPayload;
      } catch {
        payload = null;
      }
      const err = payload?.error;
      throw new ApiError(response.status, err?.code ?? "error",
                         err?.message ?? `HTTP ${response.status}`,
                         err?.field_path ?? null);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string; version: string }> {
    return this.request("GET", "/api/v1/health");
  }

  initWorkspace(): Promise<{ root: string }> {
    return this.request("POST", "/api/v1/workspace");
  }

  workspaceInfo(): Promise<{ root: string; store_attached: boolean }> {
    return this.request("GET", "/api/v1/workspace");
  }

  upload(data: BodyInit, name: string): Promise<UploadPayload> {
    return this.request("POST", `/api/v1/uploads?name=${encodeURIComponent(name)}`, data);
  }

  attachStore(uploadSha: string): Promise<{ store: string; sha256: string; job_id: string }> {
    return this.request("POST", "/api/v1/ocel/attach", undefined, { upload: uploadSha });
  }

  stats(): Promise<StatsPayload> {
    return this.request("GET", "/api/v1/ocel/stats");
  }

  dfg(objectType: string): Promise<DfgPayload> {
    return this.request("GET", `/api/v1/ocel/dfg?object_type=${encodeURIComponent(objectType)}`);
  }

  inferMapping(uploadSha: string): Promise<MappingPayload> {
    return this.request("POST", "/api/v1/iot/infer", undefined, { upload: uploadSha });
  }

  ingest(uploadSha: string, name: string, mapping?: MappingPayload["mapping"]): Promise<IngestPayload> {
    const body: Record<string, unknown> = { upload: uploadSha, name };
    if (mapping) body["mapping"] = mapping;
    return this.request("POST", "/api/v1/iot/ingest", undefined, body);
  }

  summary(): Promise<SummaryPayload> {
    return this.request("GET", "/api/v1/iot/summary");
  }

  plan(spec: unknown): Promise<PlanPayload> {
    return this.request("POST", "/api/v1/integrations/plan", undefined, { spec });
  }

  getPlan(planId: string): Promise<PlanPayload> {
    return this.request("GET", `/api/v1/integrations/plans/${encodeURIComponent(planId)}`);
  }

  execute(planId: string): Promise<RunPayload> {
    return this.request("POST", `/api/v1/integrations/plans/${encodeURIComponent(planId)}/execute`);
  }

  jobs(): Promise<{ jobs: JobPayload[] }> {
    return this.request("GET", "/api/v1/jobs");
  }
}
