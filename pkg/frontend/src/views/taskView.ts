/** Task level: the adapted Sankey plus filters and flow selection.
 *
 * This is the entry point and the reference view users return to; selecting
 * flows (by clicking ribbons or the flow list) arms the flow-level drill-down.
 */

import type { FilterQuery, FlowsResponse, SankeyResponse } from "../api.js";
import { clear, h } from "../dom.js";
import { flowsThroughEdge, layoutSankey } from "../sankeyLayout.js";

export interface TaskViewCallbacks {
  onToggleFlows(flowIds: string[]): void;
  onCompare(): void;
  onFiltersChanged(filters: FilterQuery): void;
}

const LINK_COLORS: Record<string, string> = { END: "#7fb069", ABORT: "#d66853" };

export function renderTaskView(
  container: Element,
  sankey: SankeyResponse,
  flows: FlowsResponse,
  selectedFlows: ReadonlySet<string>,
  filters: FilterQuery,
  callbacks: TaskViewCallbacks,
): void {
  clear(container);
  container.append(renderFilterPanel(filters, callbacks));

  if (sankey.total_sequences === 0) {
    container.append(
      h("p", { class: "empty-state" }, "No sequences match the current task and filters."),
    );
    return;
  }

  const width = 860;
  const height = 420;
  const layout = layoutSankey(sankey, width, height - 20);
  const svg = h("svg", {
    class: "sankey",
    viewBox: `0 0 ${width} ${height}`,
    width: width,
    height: height,
    role: "img",
  });

  for (const link of layout.links) {
    const matching = flowsThroughEdge(flows.flows, link.edge);
    const isSelected = matching.some((id) => selectedFlows.has(id));
    const ribbon = h("path", {
      class: `sankey-link${isSelected ? " selected" : ""}`,
      d: link.path,
      fill: LINK_COLORS[link.edge.target] ?? "#8aa2c8",
      "data-source": link.edge.source,
      "data-target": link.edge.target,
      "data-depth": link.edge.depth,
      "data-count": link.edge.count,
      "data-thickness": link.thickness.toFixed(3),
      onclick: () => callbacks.onToggleFlows(matching),
    });
    ribbon.append(
      h("title", {}, `${link.edge.source} → ${link.edge.target}: ${link.edge.count} sequences`),
    );
    svg.append(ribbon);
  }
  for (const node of layout.nodes) {
    svg.append(
      h(
        "g",
        { class: node.isSink ? "sankey-node sink" : "sankey-node" },
        h("rect", {
          x: node.x0,
          y: node.y0,
          width: node.x1 - node.x0,
          height: Math.max(node.y1 - node.y0, 1),
          "data-element": node.elementId,
          "data-depth": node.depth,
          "data-count": node.count,
        }),
        h(
          "text",
          {
            x: node.x1 + 4,
            y: (node.y0 + node.y1) / 2 + 4,
            "font-size": 11,
          },
          `${node.elementId} (${node.count})`,
        ),
      ),
    );
  }
  container.append(svg);
  container.append(renderFlowList(flows, selectedFlows, callbacks));
}

function renderFlowList(
  flows: FlowsResponse,
  selected: ReadonlySet<string>,
  callbacks: TaskViewCallbacks,
): Element {
  const rows = flows.flows.map((flow) =>
    h(
      "li",
      { class: "flow-row", "data-flow-id": flow.flow_id },
      h("input", {
        type: "checkbox",
        id: `pick-${flow.flow_id}`,
        checked: selected.has(flow.flow_id),
        onchange: () => callbacks.onToggleFlows([flow.flow_id]),
      }),
      h(
        "label",
        { for: `pick-${flow.flow_id}`, class: `flow-label ${flow.status}` },
        `${flow.path.join(" → ")}  ·  ${flow.status}  ·  ${flow.count}`,
      ),
    ),
  );
  const compare = h(
    "button",
    { class: "compare-button", disabled: selected.size === 0, onclick: () => callbacks.onCompare() },
    selected.size > 0 ? `Compare ${selected.size} flow(s)` : "Select flows to compare",
  );
  return h(
    "section",
    { class: "flow-list" },
    h("h3", {}, `Flows (${flows.total_sequences} sequences)`),
    h("ul", {}, ...rows),
    compare,
  );
}

function renderFilterPanel(filters: FilterQuery, callbacks: TaskViewCallbacks): Element {
  const versionInput = h("input", {
    type: "text",
    id: "filter-sw",
    value: filters.softwareVersions.join(","),
    placeholder: "software versions, comma separated",
  }) as HTMLInputElement;
  const modelInput = h("input", {
    type: "text",
    id: "filter-model",
    value: filters.carModels.join(","),
    placeholder: "car models, comma separated",
  }) as HTMLInputElement;
  const topInput = h("input", {
    type: "number",
    id: "filter-top",
    min: 1,
    value: filters.topN === null ? "" : String(filters.topN),
    placeholder: "top N flows",
  }) as HTMLInputElement;
  const statusBoxes = (["completed", "aborted"] as const).map((status) =>
    h(
      "label",
      { class: "status-box" },
      h("input", {
        type: "checkbox",
        id: `filter-status-${status}`,
        checked: filters.statuses.length === 0 || filters.statuses.includes(status),
      }),
      status,
    ),
  );

  const apply = () => {
    const statuses: string[] = [];
    for (const status of ["completed", "aborted"]) {
      const box = document.getElementById(`filter-status-${status}`) as HTMLInputElement | null;
      if (box?.checked) statuses.push(status);
    }
    callbacks.onFiltersChanged({
      softwareVersions: splitList(versionInput.value),
      carModels: splitList(modelInput.value),
      // both statuses checked means no status restriction
      statuses: statuses.length === 1 ? statuses : [],
      fromMs: filters.fromMs,
      toMs: filters.toMs,
      topN: topInput.value ? Math.max(1, Number.parseInt(topInput.value, 10)) : null,
    });
  };

  return h(
    "section",
    { class: "filter-panel" },
    h("span", { class: "filter-title" }, "Filters"),
    versionInput,
    modelInput,
    topInput,
    ...statusBoxes,
    h("button", { id: "apply-filters", onclick: apply }, "Apply"),
  );
}

function splitList(raw: string): string[] {
  return raw
    .split(",")
    .map((part) => part.trim())
    .filter((part) => part.length > 0);
}
