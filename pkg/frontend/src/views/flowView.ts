/** Flow level: boxplots of the chosen metric, one group per selected flow,
 * with the raw datapoints jittered beside each box. Every dot is one
 * interaction sequence and clicks through to the sequence level. Stats are
 * drawn exactly as served; the UI never recomputes quartiles. */

import type { DistributionFlow, DistributionResponse } from "../api.js";
import { METRIC_IDS } from "../api.js";
import { clear, h } from "../dom.js";
import { jitterFor } from "../jitter.js";

export interface FlowViewCallbacks {
  onOpenSequence(sequenceId: string): void;
  onMetricChange(metricId: string): void;
}

const PLOT_HEIGHT = 320;
const GROUP_WIDTH = 170;
const TOP_PAD = 16;

export function renderFlowView(
  container: Element,
  distribution: DistributionResponse,
  callbacks: FlowViewCallbacks,
): void {
  clear(container);
  container.append(renderMetricPicker(distribution.metric_id, callbacks));

  const values: number[] = [];
  for (const flow of distribution.flows) {
    for (const point of flow.points) values.push(point.value);
    if (flow.stats) values.push(flow.stats.whisker_low, flow.stats.whisker_high, ...flow.stats.outliers);
  }
  if (values.length === 0) {
    container.append(
      h("p", { class: "empty-state" }, `No sequence has a defined value for ${distribution.metric_id}.`),
    );
    return;
  }
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || 1;
  const yOf = (v: number) => TOP_PAD + (PLOT_HEIGHT - 2 * TOP_PAD) * (1 - (v - lo) / span);

  const width = GROUP_WIDTH * distribution.flows.length;
  const svg = h("svg", {
    class: "boxplots",
    viewBox: `0 0 ${width} ${PLOT_HEIGHT + 70}`,
    width: width,
    height: PLOT_HEIGHT + 70,
  });
  distribution.flows.forEach((flow, index) => {
    svg.append(renderFlowGroup(flow, index, yOf, callbacks));
  });
  container.append(svg);
}

function renderFlowGroup(
  flow: DistributionFlow,
  index: number,
  yOf: (v: number) => number,
  callbacks: FlowViewCallbacks,
): Element {
  const cx = index * GROUP_WIDTH + 60;
  const boxHalf = 22;
  const group = h("g", { class: "flow-group", "data-flow-id": flow.flow_id });

  const caption = `${flow.path[0]} → … (${flow.status}, n=${flow.points.length})`;
  group.append(
    h(
      "text",
      { x: index * GROUP_WIDTH + 10, y: PLOT_HEIGHT + 24, "font-size": 11, class: "flow-caption" },
      caption,
    ),
  );

  if (flow.stats === null) {
    group.append(
      h(
        "text",
        { x: index * GROUP_WIDTH + 10, y: PLOT_HEIGHT / 2, "font-size": 12, class: "no-data" },
        "no data for metric",
      ),
    );
    return group;
  }

  const stats = flow.stats;
  const inliers = new Set(flow.stats.outliers);
  group.append(
    h("line", { x1: cx, x2: cx, y1: yOf(stats.whisker_low), y2: yOf(stats.q1), class: "whisker" }),
    h("line", { x1: cx, x2: cx, y1: yOf(stats.q3), y2: yOf(stats.whisker_high), class: "whisker" }),
    h("line", { x1: cx - boxHalf / 2, x2: cx + boxHalf / 2, y1: yOf(stats.whisker_low), y2: yOf(stats.whisker_low), class: "whisker-cap" }),
    h("line", { x1: cx - boxHalf / 2, x2: cx + boxHalf / 2, y1: yOf(stats.whisker_high), y2: yOf(stats.whisker_high), class: "whisker-cap" }),
    h("rect", {
      class: "box",
      x: cx - boxHalf,
      y: yOf(stats.q3),
      width: 2 * boxHalf,
      height: Math.max(yOf(stats.q1) - yOf(stats.q3), 0.5),
      "data-median": stats.median,
    }),
    h("line", {
      x1: cx - boxHalf,
      x2: cx + boxHalf,
      y1: yOf(stats.median),
      y2: yOf(stats.median),
      class: "median",
    }),
  );

  for (const point of flow.points) {
    const px = cx + 44 + jitterFor(point.sequence_id) * 16;
    const dot = h("circle", {
      class: inliers.has(point.value) ? "seq-point outlier" : "seq-point",
      cx: px,
      cy: yOf(point.value),
      r: 3.2,
      "data-sequence-id": point.sequence_id,
      "data-value": point.value,
      onclick: () => callbacks.onOpenSequence(point.sequence_id),
    });
    dot.append(h("title", {}, `${point.sequence_id}: ${point.value}`));
    group.append(dot);
  }
  return group;
}

function renderMetricPicker(current: string, callbacks: FlowViewCallbacks): Element {
  const select = h("select", { id: "metric-picker" }) as HTMLSelectElement;
  for (const metric of METRIC_IDS) {
    select.append(h("option", { value: metric, selected: metric === current }, metric));
  }
  select.addEventListener("change", () => callbacks.onMetricChange(select.value));
  return h("section", { class: "metric-panel" }, h("label", { for: "metric-picker" }, "Metric "), select);
}
