/** Browser entry: renders the wizard and talks to the API client.
 *
 * All logic lives in the imported modules; this file only builds DOM,
 * reads form controls, and dispatches wizard events.
 */

import { ApiClient, ApiError } from "./api.js";
import { renderDfg } from "./dfg.js";
import {
  AGG_FNS,
  MANIPULATION_KINDS,
  MODES,
  PATTERNS,
  validateSpec,
} from "./model.js";
import type { DfgPayload, StatsPayload } from "./model.js";
import {
  activityCountsView,
  ingestView,
  jobsView,
  mappingView,
  previewView,
  statsView,
  summaryView,
} from "./views.js";
import type { TableView } from "./views.js";
import {
  STEP_ORDER,
  blockedReason,
  canExecute,
  initialState,
  reduce,
} from "./wizard.js";
import type { WizardEvent, WizardState } from "./wizard.js";

const api = new ApiClient("");
let state: WizardState = initialState();

// transient per-session extras the wizard state does not need to track
let statsCache: StatsPayload | null = null;
let dfgCache: DfgPayload | null = null;
let dfgType = "";

function dispatch(event: WizardEvent): void {
  state = reduce(state, event);
  render();
}

function fail(err: unknown): void {
  const message = err instanceof ApiError
    ? `${err.code}${err.fieldPath ? ` at ${err.fieldPath}` : ""}: ${err.message}`
    : String(err);
  dispatch({ type: "failed", message });
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: Array<Node | string> = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  for (const child of children) {
    node.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
  return node;
}

function button(label: string, onClick: () => void, disabled = false): HTMLButtonElement {
  const b = el("button", {}, [label]);
  b.disabled = disabled;
  b.addEventListener("click", onClick);
  return b;
}

function table(view: TableView): HTMLTableElement {
  const t = el("table", { class: "data" });
  t.append(el("thead", {}, [
    el("tr", {}, view.columns.map((c) => el("th", {}, [c]))),
  ]));
  t.append(el("tbody", {}, view.rows.map((row) =>
    el("tr", {}, row.map((cell) => el("td", {}, [String(cell)]))))));
  return t;
}

function fileInput(accept: string, onBytes: (bytes: ArrayBuffer, name: string) => void): HTMLInputElement {
  const input = el("input", { type: "file", accept });
  input.addEventListener("change", () => {
    const file = input.files?.[0];
    if (!file) return;
    file.arrayBuffer().then((bytes) => onBytes(bytes, file.name)).catch(fail);
  });
  return input;
}

// ---------------------------------------------------------------- steps

function renderUpload(root: HTMLElement): void {
  root.append(el("h2", {}, ["1. Upload"]));
  root.append(el("p", {}, ["Attach an OCEL 2.0 SQLite store, then upload a sensor CSV."]));

  const storeRow = el("div", { class: "row" });
  storeRow.append(el("label", {}, ["Event log store: "]));
  storeRow.append(fileInput(".sqlite,.db", (bytes, name) => {
    api.upload(bytes, name)
      .then((up) => {
        dispatch({ type: "store-uploaded", sha: up.sha256 });
        return api.attachStore(up.sha256);
      })
      .then(() => dispatch({ type: "store-attached" }))
      .catch(fail);
  }));
  if (state.storeAttached) storeRow.append(el("span", { class: "ok" }, [" attached"]));
  root.append(storeRow);

  const csvRow = el("div", { class: "row" });
  csvRow.append(el("label", {}, ["Sensor readings (CSV): "]));
  csvRow.append(fileInput(".csv,.txt", (bytes, name) => {
    api.upload(bytes, name)
      .then((up) => dispatch({ type: "readings-uploaded", sha: up.sha256, name }))
      .catch(fail);
  }));
  if (state.readingsSha) {
    csvRow.append(el("span", { class: "ok" }, [` ${state.readingsName ?? ""} uploaded`]));
  }
  root.append(csvRow);
}

function renderMap(root: HTMLElement): void {
  root.append(el("h2", {}, ["2. Map columns"]));
  const sha = state.readingsSha;
  if (!sha) return;

  root.append(button("Suggest mapping", () => {
    api.inferMapping(sha)
      .then((mapping) => dispatch({ type: "mapping-fetched", mapping }))
      .catch(fail);
  }));

  if (state.mapping) {
    const view = mappingView(state.mapping);
    root.append(table({
      columns: ["role", "bound to", "how"],
      rows: view.rows.map((r) => [r.role, r.boundTo, r.kind]),
    }));
    for (const note of view.notes) root.append(el("p", { class: "note" }, [note]));
    if (view.unresolved.length) {
      root.append(el("p", { class: "warn" },
                     [`unresolved required roles: ${view.unresolved.join(", ")}`]));
    }
    root.append(button("Ingest with this mapping", () => {
      api.ingest(sha, state.readingsName ?? "upload.csv", state.mapping?.mapping)
        .then((ingest) => dispatch({ type: "ingested", ingest }))
        .catch(fail);
    }, view.unresolved.length > 0));
  }

  if (state.ingest) {
    const view = ingestView(state.ingest);
    root.append(el("p", { class: "ok" }, [view.headline]));
    if (view.rejects.rows.length) root.append(table(view.rejects));
  }
}

function renderExplore(root: HTMLElement): void {
  root.append(el("h2", {}, ["3. Explore the log"]));
  root.append(button("Load statistics", () => {
    api.stats().then((s) => {
      statsCache = s;
      const first = Object.keys(s.per_object_type_counts)[0];
      if (!dfgType && first) dfgType = first;
      render();
    }).catch(fail);
  }));

  if (statsCache) {
    root.append(table(statsView(statsCache)));
    root.append(table(activityCountsView(statsCache)));

    const select = el("select");
    for (const name of Object.keys(statsCache.per_object_type_counts)) {
      const option = el("option", { value: name }, [name]);
      if (name === dfgType) option.selected = true;
      select.append(option);
    }
    select.addEventListener("change", () => {
      dfgType = select.value;
    });
    root.append(el("div", { class: "row" }, [
      el("label", {}, ["Process map for: "]),
      select,
      button("Draw", () => {
        api.dfg(dfgType).then((d) => {
          dfgCache = d;
          render();
        }).catch(fail);
      }),
    ]));
    if (dfgCache) {
      const host = el("div", { class: "dfg-host" });
      host.innerHTML = renderDfg(dfgCache);
      root.append(host);
    }
  }
}

function field(label: string, control: HTMLElement): HTMLElement {
  return el("div", { class: "field" }, [el("label", {}, [label]), control]);
}

function select(options: readonly string[], value: string): HTMLSelectElement {
  const s = el("select");
  for (const o of options) {
    const option = el("option", { value: o }, [o]);
    if (o === value) option.selected = true;
    s.append(option);
  }
  return s;
}

function renderConfigure(root: HTMLElement): void {
  root.append(el("h2", {}, ["4. Configure the integration"]));
  const current = (state.spec ?? {}) as Record<string, unknown>;
  const corr = (current["correlation"] ?? {}) as Record<string, unknown>;
  const man = (current["manipulation"] ?? {}) as Record<string, unknown>;
  const range = (man["range"] ?? null) as Record<string, unknown> | null;

  const deviceType = el("input", {
    type: "text", value: String(current["device_type"] ?? ""),
    placeholder: "e.g. scale",
  });
  const pattern = select(PATTERNS, String(current["pattern"] ?? "event_attribute"));
  const target = el("input", {
    type: "text", value: String(current["target"] ?? ""),
    placeholder: "activity or object type",
  });
  const attribute = el("input", {
    type: "text", value: String(current["attribute_name"] ?? ""),
  });
  const mode = select(MODES, String(corr["mode"] ?? "explicit_event_key"));
  const before = el("input", {
    type: "number", value: corr["window_before_s"] == null ? "" : String(corr["window_before_s"]),
  });
  const after = el("input", {
    type: "number", value: corr["window_after_s"] == null ? "" : String(corr["window_after_s"]),
  });
  const scope = el("input", {
    type: "text", value: String(corr["object_type_scope"] ?? ""),
  });
  const kind = select(MANIPULATION_KINDS, String(man["kind"] ?? "aggregate"));
  const aggFn = select(AGG_FNS, String(man["agg_fn"] ?? "average"));
  const lower = el("input", {
    type: "number", value: range?.["lower"] == null ? "" : String(range["lower"]),
  });
  const upper = el("input", {
    type: "number", value: range?.["upper"] == null ? "" : String(range["upper"]),
  });
  const qualifier = el("input", {
    type: "text", value: String(current["qualifier"] ?? "derived-from"),
  });
  const materialize = el("input", { type: "checkbox" });
  materialize.checked = current["materialize_devices"] !== false;

  const numberOrNull = (input: HTMLInputElement): number | null =>
    input.value.trim() === "" ? null : Number(input.value);

  const buildSpec = (): Record<string, unknown> => {
    const modeValue = mode.value;
    const kindValue = kind.value;
    const spec: Record<string, unknown> = {
      device_type: deviceType.value,
      pattern: pattern.value,
      target: target.value,
      attribute_name: attribute.value,
      correlation: {
        mode: modeValue,
        window_before_s: modeValue === "time_window" ? numberOrNull(before) : null,
        window_after_s: modeValue === "time_window" ? numberOrNull(after) : null,
        object_type_scope: scope.value.trim() === "" ? null : scope.value,
      },
      manipulation: {
        kind: kindValue,
        agg_fn: kindValue === "raw" ? null : aggFn.value,
        range: kindValue === "filter_then_aggregate"
          ? { lower: numberOrNull(lower), upper: numberOrNull(upper) }
          : null,
      },
      qualifier: qualifier.value,
      materialize_devices: materialize.checked,
    };
    return spec;
  };
  const onChange = () => dispatch({ type: "spec-edited", spec: buildSpec() });
  for (const control of [deviceType, pattern, target, attribute, mode, before,
                         after, scope, kind, aggFn, lower, upper, qualifier,
                         materialize]) {
    control.addEventListener("change", onChange);
  }

  root.append(
    field("Device type", deviceType),
    field("Pattern", pattern),
    field("Target", target),
    field("New attribute", attribute),
    field("Correlation mode", mode),
    field("Window before (s)", before),
    field("Window after (s)", after),
    field("Object type scope", scope),
    field("Manipulation", kind),
    field("Aggregation", aggFn),
    field("Range lower", lower),
    field("Range upper", upper),
    field("Relation qualifier", qualifier),
    field("Materialize devices", materialize),
  );

  if (state.spec) {
    const problem = validateSpec(state.spec);
    root.append(problem
      ? el("p", { class: "warn" }, [`${problem.fieldPath}: ${problem.message}`])
      : el("p", { class: "ok" }, ["spec is valid"]));
  }
}

function renderPreview(root: HTMLElement): void {
  root.append(el("h2", {}, ["5. Preview"]));
  root.append(button("Fetch preview", () => {
    const spec = state.spec;
    if (!spec) return;
    api.plan(spec)
      .then((plan) => dispatch({ type: "plan-fetched", plan, forSpec: spec }))
      .catch(fail);
  }));

  if (state.plan) {
    const view = previewView(state.plan);
    root.append(el("p", {}, [`plan ${view.planId}`]));
    root.append(el("p", {}, [
      `${view.matchGroups.length} target groups, ` +
      `${view.unmatchedTargets} without readings, ` +
      `${view.unmatchedReadings} readings unmatched`,
    ]));
    root.append(table(view.table));
    for (const warning of view.warnings) {
      root.append(el("p", { class: "warn" }, [warning]));
    }
    root.append(button("Execute this plan", () => {
      api.execute(view.planId)
        .then((result) => dispatch({ type: "executed", result }))
        .catch(fail);
    }, !canExecute(state)));
  }
}

function renderExecute(root: HTMLElement): void {
  root.append(el("h2", {}, ["6. Done"]));
  const result = state.result;
  if (!result) return;
  const r = result.report;
  root.append(el("p", { class: "ok" }, [
    `applied plan ${result.plan_id}: ${r.columns_added} new columns, ` +
    `${r.attribute_writes} attribute writes, ${r.objects_added} objects, ` +
    `${r.e2o_added} event links, ${r.o2o_added} object links`,
  ]));
  root.append(el("p", {}, [`store ${result.store} (${result.store_sha256.slice(0, 12)}...)`]));
  for (const warning of r.warnings) root.append(el("p", { class: "warn" }, [warning]));
  root.append(el("p", {}, [
    el("a", { href: "/api/v1/ocel/download" }, ["download the enriched store"]),
  ]));
  root.append(button("Show jobs", () => {
    api.jobs().then(({ jobs }) => {
      const host = document.getElementById("jobs");
      if (host) {
        host.replaceChildren(table(jobsView(jobs)));
      }
    }).catch(fail);
  }));
  root.append(el("div", { id: "jobs" }));
}

// ---------------------------------------------------------------- shell

function render(): void {
  const app = document.getElementById("app");
  if (!app) return;
  app.replaceChildren();

  const crumbs = el("ol", { class: "steps" });
  for (const step of STEP_ORDER) {
    const cls = step === state.step ? "current" : "";
    crumbs.append(el("li", { class: cls }, [step]));
  }
  app.append(crumbs);

  if (state.error) app.append(el("p", { class: "error" }, [state.error]));

  const body = el("section", { class: "step-body" });
  switch (state.step) {
    case "upload": renderUpload(body); break;
    case "map": renderMap(body); break;
    case "explore": renderExplore(body); break;
    case "configure": renderConfigure(body); break;
    case "preview": renderPreview(body); break;
    case "execute": renderExecute(body); break;
  }
  app.append(body);

  const nav = el("div", { class: "nav" });
  nav.append(button("Back", () => dispatch({ type: "back" }),
                    state.step === "upload" || state.step === "execute"));
  if (state.step !== "preview" && state.step !== "execute") {
    const reason = blockedReason(state);
    const next = button("Next", () => dispatch({ type: "next" }), reason !== null);
    if (reason) next.title = reason;
    nav.append(next);
  }
  app.append(nav);
}

api.initWorkspace().catch(() => { /* workspace may already exist */ });
render();
