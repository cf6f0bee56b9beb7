/** Canned API payloads for DOM tests; shapes mirror the server schemas. */

import type {
  DistributionResponse,
  FlowsResponse,
  SankeyResponse,
  ScreensResponse,
  SequenceDetail,
  TaskDef,
} from "../src/api.js";

export const TASK: TaskDef = {
  task_id: "task-0001",
  start_element: "nav.home",
  end_element: "nav.route_started",
  name: "start guidance",
};

export const FLOWS: FlowsResponse = {
  task_id: TASK.task_id,
  snapshot_id: 2,
  total_sequences: 5,
  flows: [
    {
      flow_id: "flow-aaa",
      path: ["nav.home", "nav.search", "nav.route_started"],
      status: "completed",
      count: 3,
    },
    { flow_id: "flow-bbb", path: ["nav.home", "nav.recents"], status: "aborted", count: 2 },
  ],
};

export const SANKEY: SankeyResponse = {
  task_id: TASK.task_id,
  snapshot_id: 2,
  total_sequences: 5,
  nodes: [
    { depth: 0, element_id: "nav.home", count: 5 },
    { depth: 1, element_id: "nav.recents", count: 2 },
    { depth: 1, element_id: "nav.search", count: 3 },
    { depth: 2, element_id: "nav.route_started", count: 3 },
  ],
  edges: [
    { depth: 0, source: "nav.home", target: "nav.recents", count: 2 },
    { depth: 0, source: "nav.home", target: "nav.search", count: 3 },
    { depth: 1, source: "nav.recents", target: "ABORT", count: 2 },
    { depth: 1, source: "nav.search", target: "nav.route_started", count: 3 },
    { depth: 2, source: "nav.route_started", target: "END", count: 3 },
  ],
};

export const EMPTY_SANKEY: SankeyResponse = {
  task_id: TASK.task_id,
  snapshot_id: 2,
  total_sequences: 0,
  nodes: [],
  edges: [],
};

export const EMPTY_FLOWS: FlowsResponse = {
  task_id: TASK.task_id,
  snapshot_id: 2,
  total_sequences: 0,
  flows: [],
};

// stats computed with the backend's Tukey-hinge convention for [3000, 5000, 9000]
export const DISTRIBUTION: DistributionResponse = {
  task_id: TASK.task_id,
  snapshot_id: 2,
  metric_id: "time_on_task_ms",
  flows: [
    {
      flow_id: "flow-aaa",
      path: ["nav.home", "nav.search", "nav.route_started"],
      status: "completed",
      points: [
        { sequence_id: "seq-1", value: 3000 },
        { sequence_id: "seq-2", value: 5000 },
        { sequence_id: "seq-3", value: 9000 },
      ],
      stats: {
        median: 5000,
        q1: 4000,
        q3: 7000,
        whisker_low: 3000,
        whisker_high: 9000,
        outliers: [],
      },
    },
    {
      flow_id: "flow-bbb",
      path: ["nav.home", "nav.recents"],
      status: "aborted",
      points: [],
      stats: null,
    },
  ],
};

export const DETAIL_SEQ2: SequenceDetail = {
  sequence_id: "seq-2",
  task_id: TASK.task_id,
  vehicle_id: "veh-003",
  session_id: "s-001",
  software_version: "1.0.0",
  car_model: "sedan",
  status: "completed",
  duration_ms: 5000,
  markers: [
    { t_ms: 0, element_id: "nav.home", label: "Navigation", action: "tap", known: true },
    { t_ms: 1800, element_id: "nav.search", label: "Destination Search", action: "tap", known: true },
    { t_ms: 5000, element_id: "nav.route_started", label: "Start Guidance", action: "tap", known: true },
  ],
  glance_track: [
    { aoi: "road", start_ms: -400, end_ms: 900 },
    { aoi: "center_stack", start_ms: 901, end_ms: 2600 },
    { aoi: "road", start_ms: 2601, end_ms: 5600 },
  ],
  speed_trace: Array.from({ length: 31 }, (_, i) => ({ t_ms: -3000 + i * 300, value: 12 + (i % 5) })),
  steering_trace: Array.from({ length: 31 }, (_, i) => ({ t_ms: -3000 + i * 300, value: (i % 7) - 3 })),
  metrics: {
    time_on_task_ms: 5000,
    n_interactions: 3,
    tgd_ms: 1699,
    mgd_ms: 1699,
    n_glances: 1,
    mean_speed_mps: 13.8,
  },
};

export const SCREENS: ScreensResponse = {
  home_screen_id: "home",
  screens: [
    {
      screen_id: "home",
      elements: [
        {
          element_id: "nav.home",
          label: "Navigation",
          app: "navigation",
          screen_id: "home",
          function: "open navigation",
          interactive: true,
          leads_to_screen: "nav_main",
        },
      ],
    },
    {
      screen_id: "nav_main",
      elements: [
        {
          element_id: "nav.search",
          label: "Destination Search",
          app: "navigation",
          screen_id: "nav_main",
          function: "open keyboard",
          interactive: true,
          leads_to_screen: null,
        },
      ],
    },
  ],
};

export type RouteOverrides = Partial<{
  sankey: SankeyResponse;
  flows: FlowsResponse;
  distribution: DistributionResponse;
}>;

/** fetch stub answering the API routes the app uses. */
export function apiFetchStub(overrides: RouteOverrides = {}) {
  const calls: string[] = [];
  const stub = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = typeof input === "string" ? input : input.toString();
    calls.push(url);
    const path = url.split("?")[0]!;
    const ok = (body: unknown, status = 200) =>
      new Response(JSON.stringify(body), { status, headers: { "content-type": "application/json" } });

    if (path === "/api/tasks" && init?.method === "POST") {
      const body = JSON.parse(String(init.body));
      return ok({ ...TASK, start_element: body.start_element, end_element: body.end_element }, 201);
    }
    if (path === "/api/tasks/recording" && init?.method === "POST") {
      const lines = String(init.body).trim().split("\n");
      if (lines.length < 2) {
        return ok({ code: "bad_request", message: "recording too short", detail: "too_short" }, 400);
      }
      return ok({ ...TASK, start_element: lines[0], end_element: lines[lines.length - 1] }, 201);
    }
    switch (path) {
      case "/api/tasks":
        return ok({ tasks: [TASK] });
      case `/api/tasks/${TASK.task_id}`:
        return ok(TASK);
      case `/api/tasks/${TASK.task_id}/sankey`:
        return ok(overrides.sankey ?? SANKEY);
      case `/api/tasks/${TASK.task_id}/flows`:
        return ok(overrides.flows ?? FLOWS);
      case `/api/tasks/${TASK.task_id}/distribution`:
        return ok(overrides.distribution ?? DISTRIBUTION);
      case "/api/sequences/seq-2":
        return ok(DETAIL_SEQ2);
      case "/api/concepts/screens":
        return ok(SCREENS);
      case "/api/concepts/search":
        return ok({ query: "", results: SCREENS.screens[0]!.elements });
      case "/api/snapshots/latest":
        return ok({ snapshot_id: 2, counts: { interactions: 10, glances: 5, signals: 50 } });
      default:
        return ok({ code: "not_found", message: `no route for ${path}`, detail: null }, 404);
    }
  };
  return { stub, calls };
}

export async function waitFor(condition: () => boolean, timeoutMs = 2000): Promise<void> {
  const started = Date.now();
  while (!condition()) {
    if (Date.now() - started > timeoutMs) throw new Error("condition not met in time");
    await new Promise((resolve) => setTimeout(resolve, 5));
  }
}
