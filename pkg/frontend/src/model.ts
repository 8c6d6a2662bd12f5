/** Payload shapes of the HTTP API plus client-side spec validation.
 *
 * `validateSpec` re-implements the server's checks in the same order so
 * the form can reject a spec with the same `field_path` the API would
 * return; the fixture tests pin that parity.
 */

export const PATTERNS = ["event_attribute", "object_attribute"] as const;
export const MODES = [
  "explicit_event_key",
  "explicit_object_key",
  "time_window",
  "lifecycle_span",
] as const;
export const AGG_FNS = ["min", "max", "average", "median"] as const;
export const MANIPULATION_KINDS = ["aggregate", "filter_then_aggregate", "raw"] as const;

const RESERVED_ATTRS = ["ocel_id", "ocel_time", "ocel_changed_field"];

export type Pattern = (typeof PATTERNS)[number];
export type Mode = (typeof MODES)[number];
export type AggFn = (typeof AGG_FNS)[number];
export type ManipulationKind = (typeof MANIPULATION_KINDS)[number];

export interface SpecDraft {
  device_type: string;
  pattern: Pattern;
  target: string;
  attribute_name: string;
  correlation: {
    mode: Mode;
    window_before_s?: number | null;
    window_after_s?: number | null;
    object_type_scope?: string | null;
  };
  manipulation: {
    kind: ManipulationKind;
    agg_fn?: AggFn | null;
    range?: { lower?: number | null; upper?: number | null } | null;
  };
  qualifier?: string;
  materialize_devices?: boolean;
}

export interface ErrorPayload {
  error: { code: string; message: string; field_path: string | null };
}

export interface StatsPayload {
  event_count: number;
  object_count: number;
  activity_count: number;
  object_type_count: number;
  e2o_count: number;
  o2o_count: number;
  per_activity_counts: Record<string, number>;
  per_object_type_counts: Record<string, number>;
}

export interface DfgEdge {
  source: string;
  target: string;
  count: number;
}

export interface DfgPayload {
  object_type: string;
  edges: DfgEdge[];
}

export interface MappingPayload {
  mapping: {
    columns: Record<string, string>;
    constants: Record<string, string>;
    timestamp_format: string | null;
    value_types: Record<string, string>;
  };
  unresolved: string[];
  notes: string[];
}

export interface RejectPayload {
  source_row: number;
  reason: string;
  detail: string;
}

export interface PropertyPayload {
  name: string;
  unit: string | null;
  value_kind: string;
  reading_count: number;
  numeric_min: number | null;
  numeric_max: number | null;
}

export interface DevicePayload {
  device_id: string;
  device_type: string;
  device_kind: string;
  location: string | null;
  reading_count: number;
  first_time: string;
  last_time: string;
  properties: PropertyPayload[];
}

export interface SummaryPayload {
  reading_count: number;
  devices: DevicePayload[];
  conflicts: string[];
  notes: string[];
}

export interface IngestPayload {
  upload_sha256: string;
  readings: number;
  rejects: number;
  replayed: boolean;
  job_id: string;
  readings_path: string | null;
  rejects_path: string | null;
  rejects_preview: RejectPayload[];
  summary: SummaryPayload;
}

export interface PlanPayload {
  plan_id: string;
  spec: Record<string, unknown>;
  match_groups: Array<[string, number]>;
  unmatched_target_count: number;
  unmatched_reading_count: number;
  preview_values: Array<[string, unknown]>;
  warnings: string[];
  log_fingerprint: string;
  readings_fingerprint: string;
}

export interface ReportPayload {
  columns_added: number;
  attribute_writes: number;
  objects_added: number;
  e2o_added: number;
  o2o_added: number;
  warnings: string[];
}

export interface RunPayload {
  plan_id: string;
  report: ReportPayload;
  store: string;
  store_sha256: string;
  job_id: string;
}

export interface UploadPayload {
  sha256: string;
  size: number;
  name: string;
}

export interface JobPayload {
  job_id: string;
  kind: string;
  input_hashes: string[];
  output_paths: string[];
  status: string;
  created_at: string;
  updated_at: string;
  extra: Record<string, unknown>;
}

export interface SpecIssue {
  fieldPath: string;
  message: string;
}

const isObject = (v: unknown): v is Record<string, unknown> =>
  typeof v === "object" && v !== null && !Array.isArray(v);

const isFiniteNumber = (v: unknown): v is number =>
  typeof v === "number" && Number.isFinite(v);

function issue(fieldPath: string, message: string): SpecIssue {
  return { fieldPath, message };
}

function unknownKey(
  data: Record<string, unknown>,
  allowed: readonly string[],
  prefix: string,
): SpecIssue | null {
  const extra = Object.keys(data).filter((k) => !allowed.includes(k)).sort();
  if (extra.length) {
    const path = prefix ? `${prefix}.${extra[0]}` : String(extra[0]);
    return issue(path, `unknown field: ${path}`);
  }
  return null;
}

function missing(data: Record<string, unknown>, key: string, path: string): SpecIssue | null {
  if (!(key in data) || data[key] === null || data[key] === undefined) {
    return issue(path, `missing required field: ${path}`);
  }
  return null;
}

function numberOrNull(value: unknown, path: string): SpecIssue | null {
  if (value === null || value === undefined) return null;
  if (typeof value === "boolean" || typeof value !== "number") {
    return issue(path, `${path} must be a number or null`);
  }
  return null;
}

/** First validation problem in server order, or null when the spec parses. */
export function validateSpec(data: unknown): SpecIssue | null {
  if (!isObject(data)) return issue(".", "spec must be an object");
  const topKeys = [
    "device_type", "pattern", "target", "attribute_name",
    "correlation", "manipulation", "qualifier", "materialize_devices",
  ];
  let bad = unknownKey(data, topKeys, "");
  if (bad) return bad;

  // correlation, in server order: presence, keys, mode, window types, rule checks
  bad = missing(data, "correlation", "correlation");
  if (bad) return bad;
  const corr = data["correlation"];
  if (!isObject(corr)) return issue("correlation", "correlation must be an object");
  bad = unknownKey(corr, ["mode", "window_before_s", "window_after_s", "object_type_scope"],
                   "correlation");
  if (bad) return bad;
  bad = missing(corr, "mode", "correlation.mode");
  if (bad) return bad;
  bad = numberOrNull(corr["window_before_s"], "correlation.window_before_s")
    ?? numberOrNull(corr["window_after_s"], "correlation.window_after_s");
  if (bad) return bad;
  const mode = corr["mode"];
  if (!MODES.includes(mode as Mode)) {
    return issue("correlation.mode", `correlation.mode must be one of ${MODES.join(", ")}`);
  }
  if (mode === "time_window") {
    for (const name of ["window_before_s", "window_after_s"] as const) {
      const value = corr[name];
      if (value === null || value === undefined) {
        return issue(`correlation.${name}`, `time_window requires correlation.${name}`);
      }
      if (!isFiniteNumber(value) || value < 0) {
        return issue(`correlation.${name}`, `correlation.${name} must be a number >= 0`);
      }
    }
  } else if (
    (corr["window_before_s"] ?? null) !== null || (corr["window_after_s"] ?? null) !== null
  ) {
    return issue("correlation.window_before_s",
                 "window durations are only valid for time_window");
  }

  // manipulation: presence, keys, range shape, then kind rules
  bad = missing(data, "manipulation", "manipulation");
  if (bad) return bad;
  const man = data["manipulation"];
  if (!isObject(man)) return issue("manipulation", "manipulation must be an object");
  bad = unknownKey(man, ["kind", "agg_fn", "range"], "manipulation");
  if (bad) return bad;
  const range = man["range"];
  if (range !== null && range !== undefined) {
    if (!isObject(range)) return issue("manipulation.range", "range must be an object");
    bad = unknownKey(range, ["lower", "upper"], "manipulation.range");
    if (bad) return bad;
    bad = numberOrNull(range["lower"], "manipulation.range.lower")
      ?? numberOrNull(range["upper"], "manipulation.range.upper");
    if (bad) return bad;
    for (const name of ["lower", "upper"] as const) {
      const bound = range[name] ?? null;
      if (bound !== null && !Number.isFinite(bound)) {
        return issue(`manipulation.range.${name}`, `range.${name} must be finite or null`);
      }
    }
    const lower = range["lower"] ?? null;
    const upper = range["upper"] ?? null;
    if (lower !== null && upper !== null && (lower as number) > (upper as number)) {
      return issue("manipulation.range", "range.lower must be <= range.upper");
    }
  }
  bad = missing(man, "kind", "manipulation.kind");
  if (bad) return bad;
  const kind = man["kind"];
  const aggFn = man["agg_fn"] ?? null;
  const hasRange = range !== null && range !== undefined;
  if (!MANIPULATION_KINDS.includes(kind as ManipulationKind)) {
    return issue("manipulation.kind",
                 `manipulation.kind must be one of ${MANIPULATION_KINDS.join(", ")}`);
  }
  if (kind === "raw") {
    if (aggFn !== null) return issue("manipulation.agg_fn", "raw manipulation takes no agg_fn");
    if (hasRange) return issue("manipulation.range", "raw manipulation takes no range");
  } else {
    if (!AGG_FNS.includes(aggFn as AggFn)) {
      return issue("manipulation.agg_fn",
                   `manipulation.agg_fn must be one of ${AGG_FNS.join(", ")}`);
    }
    if (kind === "filter_then_aggregate" && !hasRange) {
      return issue("manipulation.range", "filter_then_aggregate requires manipulation.range");
    }
    if (kind === "aggregate" && hasRange) {
      return issue("manipulation.range",
                   "plain aggregate takes no range; use filter_then_aggregate");
    }
  }

  const materialize = data["materialize_devices"] ?? true;
  if (typeof materialize !== "boolean") {
    return issue("materialize_devices", "materialize_devices must be a boolean");
  }
  const qualifier = data["qualifier"] ?? "derived-from";
  if (typeof qualifier !== "string") {
    return issue("qualifier", "qualifier must be a string");
  }

  // required scalars in server argument order, then value checks
  for (const key of ["device_type", "pattern", "target", "attribute_name"]) {
    bad = missing(data, key, key);
    if (bad) return bad;
  }
  if (!PATTERNS.includes(data["pattern"] as Pattern)) {
    return issue("pattern", `pattern must be one of ${PATTERNS.join(", ")}`);
  }
  if (typeof data["device_type"] !== "string" || !data["device_type"]) {
    return issue("device_type", "device_type must be a non-empty string");
  }
  if (typeof data["target"] !== "string" || !data["target"]) {
    return issue("target", "target must be a non-empty string");
  }
  const attr = data["attribute_name"];
  if (typeof attr !== "string" || !attr || RESERVED_ATTRS.includes(attr)) {
    return issue("attribute_name", "attribute_name must be non-empty and not reserved");
  }
  if (materialize && !qualifier) {
    return issue("qualifier", "qualifier must be non-empty when materialize_devices is set");
  }
  return null;
}

/** Stable key for "the plan on screen was made from this exact spec". */
export function specKey(spec: unknown): string {
  const canonical = (v: unknown): unknown => {
    if (Array.isArray(v)) return v.map(canonical);
    if (isObject(v)) {
      const out: Record<string, unknown> = {};
      for (const k of Object.keys(v).sort()) out[k] = canonical(v[k]);
      return out;
    }
    return v;
  };
  return JSON.stringify(canonical(spec));
}
