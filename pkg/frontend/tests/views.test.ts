/** View models against recorded payloads.
 *
 * The preview test is the load-bearing one: the table shown before
 * executing must contain exactly the plan payload's preview values,
 * nothing reordered, recomputed or dropped.
 */

import { describe, expect, it } from "vitest";

import type {
  IngestPayload,
  JobPayload,
  MappingPayload,
  PlanPayload,
  StatsPayload,
  SummaryPayload,
} from "../src/model.js";
import {
  activityCountsView,
  formatCell,
  ingestView,
  jobsView,
  mappingView,
  previewView,
  statsView,
  summaryView,
} from "../src/views.js";
import { fixture } from "./helpers.js";

describe("previewView mirrors the plan payload", () => {
  const plan = fixture<PlanPayload>("plan.json");

  it("values are exactly plan.preview_values", () => {
    const view = previewView(plan);
    expect(view.values).toEqual(plan.preview_values);
  });

  it("table rows are the same pairs, formatted only", () => {
    const view = previewView(plan);
    expect(view.table.rows).toEqual(
      plan.preview_values.map(([tid, v]) => [tid, formatCell(v)]));
    expect(view.table.rows.length).toBeGreaterThan(0);
  });

  it("carries the rest of the payload through unchanged", () => {
    const view = previewView(plan);
    expect(view.planId).toBe(plan.plan_id);
    expect(view.matchGroups).toEqual(plan.match_groups);
    expect(view.unmatchedTargets).toBe(plan.unmatched_target_count);
    expect(view.unmatchedReadings).toBe(plan.unmatched_reading_count);
    expect(view.warnings).toEqual(plan.warnings);
  });
});

describe("statsView", () => {
  const stats = fixture<StatsPayload>("stats.json");

  it("lists the six log measures", () => {
    const view = statsView(stats);
    expect(view.rows).toContainEqual(["events", stats.event_count]);
    expect(view.rows).toContainEqual(["objects", stats.object_count]);
    expect(view.rows).toHaveLength(6);
  });

  it("activity counts cover every activity", () => {
    const view = activityCountsView(stats);
    expect(view.rows).toEqual(Object.entries(stats.per_activity_counts));
  });
});

describe("mappingView", () => {
  const mapping = fixture<MappingPayload>("mapping.json");

  it("shows one row per bound role", () => {
    const view = mappingView(mapping);
    const byRole = new Map(view.rows.map((r) => [r.role, r]));
    expect(byRole.get("device_id")).toEqual(
      { role: "device_id", boundTo: "sensor_id", kind: "column" });
    expect(byRole.get("result")).toEqual(
      { role: "result", boundTo: "value", kind: "column" });
    expect(view.unresolved).toEqual([]);
  });
});

describe("ingestView", () => {
  const ingest = fixture<IngestPayload>("ingest.json");

  it("headline carries both counters", () => {
    const view = ingestView(ingest);
    expect(view.headline).toContain(`${ingest.readings} readings`);
    expect(view.headline).toContain(`${ingest.rejects} rejected`);
  });

  it("reject rows mirror the preview payload", () => {
    const view = ingestView(ingest);
    expect(view.rejects.rows).toEqual(
      ingest.rejects_preview.map((r) => [r.source_row, r.reason, r.detail]));
    expect(view.rejects.rows.length).toBeGreaterThan(0);
  });

  it("marks a replayed run", () => {
    const view = ingestView({ ...ingest, replayed: true });
    expect(view.headline).toContain("(replayed earlier run)");
    expect(ingestView(ingest).replayed).toBe(ingest.replayed);
  });
});

describe("summaryView", () => {
  const summary = fixture<SummaryPayload>("summary.json");

  it("one card per device with its properties", () => {
    const view = summaryView(summary);
    expect(view.devices).toHaveLength(summary.devices.length);
    expect(view.headline).toContain(String(summary.reading_count));
    const first = view.devices[0]!;
    expect(first.title).toContain(summary.devices[0]!.device_id);
    expect(first.properties.rows).toHaveLength(summary.devices[0]!.properties.length);
  });
});

describe("jobsView", () => {
  const { jobs } = fixture<{ jobs: JobPayload[] }>("jobs.json");

  it("one row per ledger entry", () => {
    const view = jobsView(jobs);
    expect(view.rows).toHaveLength(jobs.length);
    expect(view.rows[0]![1]).toBe(jobs[0]!.kind);
  });
});

describe("formatCell", () => {
  it("renders missing as empty and structures as JSON", () => {
    expect(formatCell(null)).toBe("");
    expect(formatCell(undefined)).toBe("");
    expect(formatCell([1.5, 2])).toBe("[1.5,2]");
    expect(formatCell(12)).toBe("12");
    expect(formatCell("ok")).toBe("ok");
  });
});
