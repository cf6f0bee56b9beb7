/** Typed client for the flowboat HTTP API. Every number the UI shows comes
 * from these response payloads; the client never recomputes analytics. */

export interface TaskDef {
  task_id: string;
  start_element: string;
  end_element: string;
  name: string | null;
}

export interface FlowSummary {
  flow_id: string;
  path: string[];
  status: "completed" | "aborted";
  count: number;
}

export interface FlowsResponse {
  task_id: string;
  snapshot_id: number;
  total_sequences: number;
  flows: FlowSummary[];
}

export interface SankeyNode {
  depth: number;
  element_id: string;
  count: number;
}

export interface SankeyEdge {
  depth: number;
  source: string;
  target: string;
  count: number;
}

export interface SankeyResponse {
  task_id: string;
  snapshot_id: number;
  total_sequences: number;
  nodes: SankeyNode[];
  edges: SankeyEdge[];
}

export interface BoxStats {
  median: number;
  q1: number;
  q3: number;
  whisker_low: number;
  whisker_high: number;
  outliers: number[];
}

export interface DistributionPoint {
  sequence_id: string;
  value: number;
}

export interface DistributionFlow {
  flow_id: string;
  path: string[];
  status: "completed" | "aborted";
  points: DistributionPoint[];
  stats: BoxStats | null;
}

export interface DistributionResponse {
  task_id: string;
  snapshot_id: number;
  metric_id: string;
  flows: DistributionFlow[];
}

export interface EventMarker {
  t_ms: number;
  element_id: string;
  label: string;
  action: string;
  known: boolean;
}

export interface GlanceSpan {
  aoi: "road" | "center_stack" | "other";
  start_ms: number;
  end_ms: number;
}

export interface TracePoint {
  t_ms: number;
  value: number;
}

export interface SequenceDetail {
  sequence_id: string;
  task_id: string;
  vehicle_id: string;
  session_id: string;
  software_version: string;
  car_model: string;
  status: string;
  duration_ms: number;
  markers: EventMarker[];
  glance_track: GlanceSpan[];
  speed_trace: TracePoint[];
  steering_trace: TracePoint[];
  metrics: Record<string, number>;
}

export interface UiElementInfo {
  element_id: string;
  label: string;
  app: string;
  screen_id: string;
  function: string;
  interactive: boolean;
  leads_to_screen: string | null;
}

export interface Screen {
  screen_id: string;
  elements: UiElementInfo[];
}

export interface ScreensResponse {
  home_screen_id: string | null;
  screens: Screen[];
}

export interface SearchResponse {
  query: string;
  results: UiElementInfo[];
}

export interface SnapshotResponse {
  snapshot_id: number;
  counts: Record<string, number>;
}

export interface FilterQuery {
  softwareVersions: string[];
  carModels: string[];
  statuses: string[];
  fromMs: number | null;
  toMs: number | null;
  topN: number | null;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail: string | null,
  ) {
    super(message);
  }
}

export const METRIC_IDS = [
  "time_on_task_ms",
  "n_interactions",
  "tgd_ms",
  "mgd_ms",
  "n_glances",
  "mean_speed_mps",
] as const;

function filterParams(filters: FilterQuery, snapshot: number | null): URLSearchParams {
  const params = new URLSearchParams();
  if (snapshot !== null) params.set("snapshot", String(snapshot));
  for (const v of filters.softwareVersions) params.append("software_version", v);
  for (const m of filters.carModels) params.append("car_model", m);
  for (const s of filters.statuses) params.append("status", s);
  if (filters.fromMs !== null) params.set("from_ms", String(filters.fromMs));
  if (filters.toMs !== null) params.set("to_ms", String(filters.toMs));
  if (filters.topN !== null) params.set("top_n", String(filters.topN));
  return params;
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, init);
    const text = await response.text();
    const body = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const code = body?.code ?? "internal";
      const message = body?.message ?? `request failed with ${response.status}`;
      throw new ApiError(response.status, code, message, body?.detail ?? null);
    }
    return body as T;
  }

  latestSnapshot(signal?: AbortSignal): Promise<SnapshotResponse> {
    return this.request("/api/snapshots/latest", { signal });
  }

  listTasks(signal?: AbortSignal): Promise<{ tasks: TaskDef[] }> {
    return this.request("/api/tasks", { signal });
  }

  getTask(taskId: string, signal?: AbortSignal): Promise<TaskDef> {
    return this.request(`/api/tasks/${encodeURIComponent(taskId)}`, { signal });
  }

  createTask(startElement: string, endElement: string, name?: string): Promise<TaskDef> {
    return this.request("/api/tasks", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ start_element: startElement, end_element: endElement, name: name ?? null }),
    });
  }

  createTaskFromRecording(recording: string): Promise<TaskDef> {
    return this.request("/api/tasks/recording", {
      method: "POST",
      headers: { "content-type": "text/plain; charset=utf-8" },
      body: recording,
    });
  }

  searchConcepts(query: string, limit = 12, signal?: AbortSignal): Promise<SearchResponse> {
    const params = new URLSearchParams({ q: query, limit: String(limit) });
    return this.request(`/api/concepts/search?${params}`, { signal });
  }

  screens(signal?: AbortSignal): Promise<ScreensResponse> {
    return this.request("/api/concepts/screens", { signal });
  }

  flows(taskId: string, filters: FilterQuery, snapshot: number | null, signal?: AbortSignal): Promise<FlowsResponse> {
    const params = filterParams(filters, snapshot);
    return this.request(`/api/tasks/${encodeURIComponent(taskId)}/flows?${params}`, { signal });
  }

  sankey(taskId: string, filters: FilterQuery, snapshot: number | null, signal?: AbortSignal): Promise<SankeyResponse> {
    const params = filterParams(filters, snapshot);
    return this.request(`/api/tasks/${encodeURIComponent(taskId)}/sankey?${params}`, { signal });
  }

  distribution(
    taskId: string,
    metricId: string,
    flowIds: string[],
    filters: FilterQuery,
    snapshot: number | null,
    signal?: AbortSignal,
  ): Promise<DistributionResponse> {
    const params = filterParams(filters, snapshot);
    params.set("metric", metricId);
    for (const id of flowIds) params.append("flows", id);
    return this.request(`/api/tasks/${encodeURIComponent(taskId)}/distribution?${params}`, { signal });
  }

  sequenceDetail(sequenceId: string, signal?: AbortSignal): Promise<SequenceDetail> {
    return this.request(`/api/sequences/${encodeURIComponent(sequenceId)}`, { signal });
  }
}
