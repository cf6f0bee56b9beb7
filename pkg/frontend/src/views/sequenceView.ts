/** Sequence level: synchronized lanes on one shared time axis.
 *
 * Touch markers, the glance AOI band, vehicle speed, and steering angle all
 * share the x scale (ms relative to the first event); hovering moves one
 * cursor line through every lane so the driving situation at any instant can
 * be read off directly. */

import type { SequenceDetail } from "../api.js";
import { clear, h } from "../dom.js";

const WIDTH = 880;
const MARGIN_LEFT = 56;
const MARGIN_RIGHT = 16;
const LANES = {
  markers: { y: 24, height: 52, label: "interactions" },
  glances: { y: 92, height: 40, label: "glances" },
  speed: { y: 150, height: 84, label: "speed m/s" },
  steering: { y: 252, height: 84, label: "steering °" },
} as const;
const TOTAL_HEIGHT = 356;

const AOI_COLORS: Record<string, string> = {
  center_stack: "#d66853",
  road: "#7fb069",
  other: "#b6b6b6",
};

export function renderSequenceView(container: Element, detail: SequenceDetail): void {
  clear(container);

  const times: number[] = [0, detail.duration_ms];
  for (const p of detail.speed_trace) times.push(p.t_ms);
  for (const p of detail.steering_trace) times.push(p.t_ms);
  for (const g of detail.glance_track) times.push(g.start_ms, g.end_ms);
  const t0 = Math.min(...times);
  const t1 = Math.max(...times);
  const span = t1 - t0 || 1;
  const xOf = (t: number) => MARGIN_LEFT + ((t - t0) / span) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
  const tOf = (x: number) => t0 + ((x - MARGIN_LEFT) / (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)) * span;

  const svg = h("svg", {
    class: "sequence-lanes",
    viewBox: `0 0 ${WIDTH} ${TOTAL_HEIGHT}`,
    width: WIDTH,
    height: TOTAL_HEIGHT,
  });

  for (const lane of Object.values(LANES)) {
    svg.append(
      h("text", { x: 4, y: lane.y + 12, "font-size": 10, class: "lane-label" }, lane.label),
      h("line", {
        x1: MARGIN_LEFT,
        x2: WIDTH - MARGIN_RIGHT,
        y1: lane.y + lane.height,
        y2: lane.y + lane.height,
        class: "lane-base",
      }),
    );
  }

  const markerLane = LANES.markers;
  for (const marker of detail.markers) {
    const x = xOf(marker.t_ms);
    svg.append(
      h(
        "g",
        { class: marker.known ? "event-marker" : "event-marker unknown" },
        h("circle", { cx: x, cy: markerLane.y + markerLane.height - 8, r: 5, "data-t": marker.t_ms }),
        h(
          "text",
          { x: x + 6, y: markerLane.y + 14, "font-size": 9, transform: `rotate(28 ${x + 6} ${markerLane.y + 14})` },
          marker.known ? marker.label : `${marker.label} (?)`,
        ),
      ),
    );
  }

  const glanceLane = LANES.glances;
  if (detail.glance_track.length === 0) {
    svg.append(
      h(
        "text",
        { x: MARGIN_LEFT + 8, y: glanceLane.y + 24, "font-size": 11, class: "no-data" },
        "no glance data",
      ),
    );
  } else {
    for (const glance of detail.glance_track) {
      svg.append(
        h("rect", {
          class: `glance-span ${glance.aoi}`,
          x: xOf(glance.start_ms),
          y: glanceLane.y + 8,
          width: Math.max(xOf(glance.end_ms) - xOf(glance.start_ms), 0.5),
          height: glanceLane.height - 16,
          fill: AOI_COLORS[glance.aoi] ?? "#999",
          "data-aoi": glance.aoi,
        }),
      );
    }
  }

  appendTrace(svg, detail.speed_trace, LANES.speed, xOf, "speed-trace");
  appendTrace(svg, detail.steering_trace, LANES.steering, xOf, "steering-trace");

  const cursor = h("line", {
    class: "hover-cursor",
    id: "hover-cursor",
    x1: xOf(0),
    x2: xOf(0),
    y1: 8,
    y2: TOTAL_HEIGHT - 8,
    visibility: "hidden",
  });
  const readout = h("text", { id: "hover-readout", x: WIDTH - 160, y: 14, "font-size": 11 }, "");
  const overlay = h("rect", {
    id: "hover-overlay",
    x: MARGIN_LEFT,
    y: 0,
    width: WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
    height: TOTAL_HEIGHT,
    fill: "transparent",
  });
  overlay.addEventListener("mousemove", (event) => {
    const mouse = event as MouseEvent;
    const bounds = (svg as SVGSVGElement).getBoundingClientRect();
    const x = Math.min(Math.max(mouse.clientX - bounds.left, MARGIN_LEFT), WIDTH - MARGIN_RIGHT);
    cursor.setAttribute("x1", String(x));
    cursor.setAttribute("x2", String(x));
    cursor.setAttribute("visibility", "visible");
    readout.textContent = `t = ${Math.round(tOf(x))} ms`;
  });
  overlay.addEventListener("mouseleave", () => cursor.setAttribute("visibility", "hidden"));
  svg.append(cursor, readout, overlay);

  container.append(
    h(
      "section",
      { class: "sequence-header" },
      h("h3", {}, `Sequence ${detail.sequence_id}`),
      h(
        "p",
        { class: "sequence-meta" },
        `${detail.vehicle_id} / ${detail.session_id} · ${detail.status} · ` +
          `${detail.software_version} · ${detail.car_model}`,
      ),
    ),
    svg,
    renderMetricsTable(detail.metrics),
  );
}

function appendTrace(
  svg: Element,
  trace: { t_ms: number; value: number }[],
  lane: { y: number; height: number },
  xOf: (t: number) => number,
  cls: string,
): void {
  if (trace.length === 0) {
    svg.append(
      h("text", { x: MARGIN_LEFT + 8, y: lane.y + 24, "font-size": 11, class: "no-data" }, "no signal data"),
    );
    return;
  }
  let lo = Math.min(...trace.map((p) => p.value));
  let hi = Math.max(...trace.map((p) => p.value));
  if (hi === lo) {
    hi += 1;
    lo -= 1;
  }
  const yOf = (v: number) => lane.y + lane.height - ((v - lo) / (hi - lo)) * (lane.height - 10) - 5;
  const points = trace.map((p) => `${xOf(p.t_ms)},${yOf(p.value)}`).join(" ");
  svg.append(h("polyline", { class: cls, points, fill: "none" }));
}

function renderMetricsTable(metrics: Record<string, number>): Element {
  const rows = Object.entries(metrics).map(([name, value]) =>
    h(
      "tr",
      {},
      h("td", { class: "metric-name" }, name),
      h("td", { class: "metric-value" }, formatNumber(value)),
    ),
  );
  return h("table", { class: "metrics-table" }, ...rows);
}

function formatNumber(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(2);
}
