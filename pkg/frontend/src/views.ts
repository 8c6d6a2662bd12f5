/** View models: pure payload-to-table/card transforms, no DOM.
 *
 * Everything shown in the UI is built here from API payloads alone, so
 * tests can assert the screens contain exactly what the server said.
 */

import type {
  IngestPayload,
  JobPayload,
  MappingPayload,
  PlanPayload,
  StatsPayload,
  SummaryPayload,
} from "./model.js";

export interface TableView {
  columns: string[];
  rows: Array<Array<string | number>>;
}

export function formatCell(value: unknown): string {
  if (value === null || value === undefined) return "";
  if (typeof value === "object") return JSON.stringify(value);
  return String(value);
}

export function statsView(stats: StatsPayload): TableView {
  return {
    columns: ["measure", "count"],
    rows: [
      ["events", stats.event_count],
      ["objects", stats.object_count],
      ["activities", stats.activity_count],
      ["object types", stats.object_type_count],
      ["event-object relations", stats.e2o_count],
      ["object-object relations", stats.o2o_count],
    ],
  };
}

export function activityCountsView(stats: StatsPayload): TableView {
  return {
    columns: ["activity", "events"],
    rows: Object.entries(stats.per_activity_counts).map(([a, n]) => [a, n]),
  };
}

export interface MappingRow {
  role: string;
  boundTo: string;
  kind: "column" | "constant" | "unresolved";
}

export function mappingView(payload: MappingPayload): {
  rows: MappingRow[];
  unresolved: string[];
  notes: string[];
} {
  const rows: MappingRow[] = [];
  for (const [role, header] of Object.entries(payload.mapping.columns)) {
    rows.push({ role, boundTo: header, kind: "column" });
  }
  for (const [role, value] of Object.entries(payload.mapping.constants)) {
    rows.push({ role, boundTo: value, kind: "constant" });
  }
  for (const role of payload.unresolved) {
    rows.push({ role, boundTo: "", kind: "unresolved" });
  }
  rows.sort((a, b) => a.role.localeCompare(b.role));
  return { rows, unresolved: [...payload.unresolved], notes: [...payload.notes] };
}

export function ingestView(payload: IngestPayload): {
  headline: string;
  replayed: boolean;
  rejects: TableView;
} {
  const headline = `${payload.readings} readings, ${payload.rejects} rejected` +
    (payload.replayed ? " (replayed earlier run)" : "");
  return {
    headline,
    replayed: payload.replayed,
    rejects: {
      columns: ["source row", "reason", "detail"],
      rows: payload.rejects_preview.map((r) => [r.source_row, r.reason, r.detail]),
    },
  };
}

export function summaryView(payload: SummaryPayload): {
  headline: string;
  devices: Array<{
    title: string;
    location: string;
    properties: TableView;
  }>;
  conflicts: string[];
  notes: string[];
} {
  return {
    headline: `${payload.reading_count} readings across ${payload.devices.length} devices`,
    devices: payload.devices.map((d) => ({
      title: `${d.device_id} (${d.device_type}/${d.device_kind}), ${d.reading_count} readings`,
      location: d.location ?? "",
      properties: {
        columns: ["property", "unit", "kind", "readings", "min", "max"],
        rows: d.properties.map((p) => [
          p.name,
          p.unit ?? "",
          p.value_kind,
          p.reading_count,
          p.numeric_min ?? "",
          p.numeric_max ?? "",
        ]),
      },
    })),
    conflicts: [...payload.conflicts],
    notes: [...payload.notes],
  };
}

/** Preview screen: rows are exactly the plan payload's preview values. */
export function previewView(plan: PlanPayload): {
  planId: string;
  values: Array<[string, unknown]>;
  table: TableView;
  matchGroups: Array<[string, number]>;
  unmatchedTargets: number;
  unmatchedReadings: number;
  warnings: string[];
} {
  return {
    planId: plan.plan_id,
    values: plan.preview_values.map(([tid, v]) => [tid, v]),
    table: {
      columns: ["target", "value"],
      rows: plan.preview_values.map(([tid, v]) => [tid, formatCell(v)]),
    },
    matchGroups: plan.match_groups.map(([tid, n]) => [tid, n]),
    unmatchedTargets: plan.unmatched_target_count,
    unmatchedReadings: plan.unmatched_reading_count,
    warnings: [...plan.warnings],
  };
}

export function jobsView(jobs: JobPayload[]): TableView {
  return {
    columns: ["job", "kind", "status", "updated"],
    rows: jobs.map((j) => [j.job_id, j.kind, j.status, j.updated_at]),
  };
}
