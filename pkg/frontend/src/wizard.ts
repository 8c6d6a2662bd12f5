/** Wizard state machine: upload -> map -> explore -> configure -> preview -> execute.
 *
 * Pure data + reducer, no DOM and no fetch: the UI dispatches events and
 * renders whatever the state says. Two invariants are enforced here and
 * tested directly: you can only move forward once the current step has
 * what it needs, and execute is only reachable while holding a plan
 * fetched for the exact spec on screen (editing the spec drops the plan).
 */

import type { IngestPayload, MappingPayload, PlanPayload, RunPayload } from "./model.js";
import { specKey, validateSpec } from "./model.js";

export const STEP_ORDER = [
  "upload",
  "map",
  "explore",
  "configure",
  "preview",
  "execute",
] as const;

export type StepId = (typeof STEP_ORDER)[number];

export interface WizardState {
  step: StepId;
  storeSha: string | null;
  storeAttached: boolean;
  readingsSha: string | null;
  readingsName: string | null;
  mapping: MappingPayload | null;
  ingest: IngestPayload | null;
  spec: Record<string, unknown> | null;
  plan: PlanPayload | null;
  planSpecKey: string | null;
  result: RunPayload | null;
  error: string | null;
}

export type WizardEvent =
  | { type: "store-uploaded"; sha: string }
  | { type: "store-attached" }
  | { type: "readings-uploaded"; sha: string; name: string }
  | { type: "mapping-fetched"; mapping: MappingPayload }
  | { type: "ingested"; ingest: IngestPayload }
  | { type: "spec-edited"; spec: Record<string, unknown> }
  | { type: "plan-fetched"; plan: PlanPayload; forSpec: Record<string, unknown> }
  | { type: "executed"; result: RunPayload }
  | { type: "failed"; message: string }
  | { type: "next" }
  | { type: "back" };

export function initialState(): WizardState {
  return {
    step: "upload",
    storeSha: null,
    storeAttached: false,
    readingsSha: null,
    readingsName: null,
    mapping: null,
    ingest: null,
    spec: null,
    plan: null,
    planSpecKey: null,
    result: null,
    error: null,
  };
}

/** Why the Next button is disabled, or null when advancing is allowed. */
export function blockedReason(state: WizardState): string | null {
  switch (state.step) {
    case "upload":
      if (!state.storeSha || !state.storeAttached) return "attach an OCEL store first";
      if (!state.readingsSha) return "upload a readings table first";
      return null;
    case "map":
      if (!state.ingest) return "run the ingest with the chosen mapping first";
      return null;
    case "explore":
      return null;
    case "configure": {
      if (!state.spec) return "fill in the integration form first";
      const problem = validateSpec(state.spec);
      return problem ? `${problem.fieldPath}: ${problem.message}` : null;
    }
    case "preview":
      if (!state.plan) return "fetch a preview first";
      if (state.planSpecKey !== specKey(state.spec)) {
        return "spec changed since the preview; fetch it again";
      }
      return null;
    case "execute":
      return "already at the last step";
  }
}

export function canAdvance(state: WizardState): boolean {
  return blockedReason(state) === null;
}

/** Execute is allowed only from preview, holding a plan for this spec. */
export function canExecute(state: WizardState): boolean {
  return state.step === "preview" && state.plan !== null
    && state.planSpecKey === specKey(state.spec);
}

function stepIndex(step: StepId): number {
  return STEP_ORDER.indexOf(step);
}

export function reduce(state: WizardState, event: WizardEvent): WizardState {
  switch (event.type) {
    case "store-uploaded":
      return { ...state, storeSha: event.sha, storeAttached: false, error: null };
    case "store-attached":
      return { ...state, storeAttached: true, error: null };
    case "readings-uploaded":
      return {
        ...state,
        readingsSha: event.sha,
        readingsName: event.name,
        mapping: null,
        ingest: null,
        error: null,
      };
    case "mapping-fetched":
      return { ...state, mapping: event.mapping, error: null };
    case "ingested":
      return { ...state, ingest: event.ingest, error: null };
    case "spec-edited":
      // the on-screen spec is no longer the one any fetched plan was for
      return { ...state, spec: event.spec, plan: null, planSpecKey: null, error: null };
    case "plan-fetched":
      return {
        ...state,
        plan: event.plan,
        planSpecKey: specKey(event.forSpec),
        error: null,
      };
    case "executed":
      if (!canExecute(state)) return { ...state, error: "execute is not available" };
      return { ...state, result: event.result, step: "execute", error: null };
    case "failed":
      return { ...state, error: event.message };
    case "next": {
      if (!canAdvance(state)) return { ...state, error: blockedReason(state) };
      const index = stepIndex(state.step);
      const next = STEP_ORDER[Math.min(index + 1, STEP_ORDER.length - 1)];
      if (next === "execute") {
        // the execute step is entered by the executed event, never by next
        return { ...state, error: blockedReason(state) ?? "use the execute button" };
      }
      return { ...state, step: next ?? state.step, error: null };
    }
    case "back": {
      const index = stepIndex(state.step);
      if (index === 0 || state.step === "execute") return state;
      const prev = STEP_ORDER[index - 1];
      return { ...state, step: prev ?? state.step, error: null };
    }
  }
}
