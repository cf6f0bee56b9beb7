/** View state and its URL serialization.
 *
 * The whole exploration state lives in the query string, so any view can be
 * deep-linked and a reload reproduces it exactly. Filters survive navigation
 * between views; going back to the task level never clears them. */

import type { FilterQuery } from "./api.js";

export type ViewName = "task" | "flow" | "sequence";

export interface ViewState {
  view: ViewName;
  taskId: string | null;
  snapshotId: number | null;
  filters: FilterQuery;
  flowIds: string[];
  metricId: string;
  sequenceId: string | null;
}

export const DEFAULT_METRIC = "time_on_task_ms";

export function emptyFilters(): FilterQuery {
  return { softwareVersions: [], carModels: [], statuses: [], fromMs: null, toMs: null, topN: null };
}

export function defaultState(): ViewState {
  return {
    view: "task",
    taskId: null,
    snapshotId: null,
    filters: emptyFilters(),
    flowIds: [],
    metricId: DEFAULT_METRIC,
    sequenceId: null,
  };
}

/** Downgrade a state whose view lacks its required selection. */
export function normalizeState(state: ViewState): ViewState {
  if (state.view === "sequence" && state.sequenceId === null) {
    return { ...state, view: state.flowIds.length > 0 ? "flow" : "task" };
  }
  if (state.view === "flow" && state.flowIds.length === 0) {
    return { ...state, view: "task" };
  }
  if (state.view !== "task" && state.taskId === null) {
    return { ...state, view: "task" };
  }
  return state;
}

export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  params.set("view", state.view);
  if (state.taskId !== null) params.set("task", state.taskId);
  if (state.snapshotId !== null) params.set("snapshot", String(state.snapshotId));
  for (const v of state.filters.softwareVersions) params.append("sw", v);
  for (const m of state.filters.carModels) params.append("model", m);
  for (const s of state.filters.statuses) params.append("status", s);
  if (state.filters.fromMs !== null) params.set("from", String(state.filters.fromMs));
  if (state.filters.toMs !== null) params.set("to", String(state.filters.toMs));
  if (state.filters.topN !== null) params.set("top", String(state.filters.topN));
  for (const f of state.flowIds) params.append("flow", f);
  if (state.metricId !== DEFAULT_METRIC) params.set("metric", state.metricId);
  if (state.sequenceId !== null) params.set("seq", state.sequenceId);
  return params.toString();
}

function intOrNull(value: string | null): number | null {
  if (value === null || value === "") return null;
  const parsed = Number.parseInt(value, 10);
  return Number.isFinite(parsed) ? parsed : null;
}

export function decodeState(query: string): ViewState {
  const params = new URLSearchParams(query);
  const view = params.get("view");
  const state: ViewState = {
    view: view === "flow" || view === "sequence" ? view : "task",
    taskId: params.get("task"),
    snapshotId: intOrNull(params.get("snapshot")),
    filters: {
      softwareVersions: params.getAll("sw"),
      carModels: params.getAll("model"),
      statuses: params.getAll("status").filter((s) => s === "completed" || s === "aborted"),
      fromMs: intOrNull(params.get("from")),
      toMs: intOrNull(params.get("to")),
      topN: intOrNull(params.get("top")),
    },
    flowIds: params.getAll("flow"),
    metricId: params.get("metric") ?? DEFAULT_METRIC,
    sequenceId: params.get("seq"),
  };
  return normalizeState(state);
}

/** Round-trip helper: the canonical URL for a state. */
export function stateUrl(state: ViewState, pathname = window.location.pathname): string {
  const encoded = encodeState(state);
  return encoded ? `${pathname}?${encoded}` : pathname;
}
