/** Pure geometry for the depth-layered Sankey.
 *
 * The server graph is already layered: node identity is (depth, element) and
 * every edge goes from depth d to d+1, with END/ABORT as terminal targets.
 * That makes layout a straight column stack; ribbon thickness is exactly
 * count * scale, so on-screen widths stay proportional to sequence counts. */

import type { SankeyEdge, SankeyResponse } from "./api.js";

export const SINKS = ["END", "ABORT"] as const;

export interface LaidNode {
  key: string;
  depth: number;
  elementId: string;
  count: number;
  isSink: boolean;
  x0: number;
  x1: number;
  y0: number;
  y1: number;
}

export interface LaidLink {
  edge: SankeyEdge;
  sourceKey: string;
  targetKey: string;
  thickness: number;
  x0: number;
  x1: number;
  sy0: number;
  sy1: number;
  ty0: number;
  ty1: number;
  path: string;
}

export interface SankeyLayout {
  nodes: LaidNode[];
  links: LaidLink[];
  scale: number;
}

export interface LayoutOptions {
  nodeWidth?: number;
  nodePadding?: number;
}

const nodeKey = (depth: number, elementId: string) => `${depth}:${elementId}`;

export function layoutSankey(
  graph: Pick<SankeyResponse, "nodes" | "edges" | "total_sequences">,
  width: number,
  height: number,
  options: LayoutOptions = {},
): SankeyLayout {
  const nodeWidth = options.nodeWidth ?? 18;
  const nodePadding = options.nodePadding ?? 10;

  const byKey = new Map<string, LaidNode>();
  for (const node of graph.nodes) {
    byKey.set(nodeKey(node.depth, node.element_id), {
      key: nodeKey(node.depth, node.element_id),
      depth: node.depth,
      elementId: node.element_id,
      count: node.count,
      isSink: false,
      x0: 0,
      x1: 0,
      y0: 0,
      y1: 0,
    });
  }
  for (const edge of graph.edges) {
    if (!(SINKS as readonly string[]).includes(edge.target)) continue;
    const key = nodeKey(edge.depth + 1, edge.target);
    const sink = byKey.get(key);
    if (sink) {
      sink.count += edge.count;
    } else {
      byKey.set(key, {
        key,
        depth: edge.depth + 1,
        elementId: edge.target,
        count: edge.count,
        isSink: true,
        x0: 0,
        x1: 0,
        y0: 0,
        y1: 0,
      });
    }
  }

  const columns = new Map<number, LaidNode[]>();
  for (const node of byKey.values()) {
    const column = columns.get(node.depth);
    if (column) column.push(node);
    else columns.set(node.depth, [node]);
  }
  const depths = [...columns.keys()].sort((a, b) => a - b);
  if (depths.length === 0) {
    return { nodes: [], links: [], scale: 0 };
  }

  // sinks stack below real nodes; otherwise biggest flows float to the top
  for (const depth of depths) {
    columns.get(depth)!.sort((a, b) => {
      if (a.isSink !== b.isSink) return a.isSink ? 1 : -1;
      if (a.isSink && b.isSink) return a.elementId === "END" ? -1 : 1;
      return b.count - a.count || (a.elementId < b.elementId ? -1 : 1);
    });
  }

  let scale = Number.POSITIVE_INFINITY;
  for (const depth of depths) {
    const column = columns.get(depth)!;
    const total = column.reduce((sum, node) => sum + node.count, 0);
    const avail = height - nodePadding * (column.length - 1);
    if (total > 0) scale = Math.min(scale, avail / total);
  }
  if (!Number.isFinite(scale)) scale = 0;

  const lastDepth = depths[depths.length - 1]!;
  const step = lastDepth > 0 ? (width - nodeWidth) / lastDepth : 0;
  for (const depth of depths) {
    const column = columns.get(depth)!;
    let y = 0;
    for (const node of column) {
      node.x0 = depth * step;
      node.x1 = node.x0 + nodeWidth;
      node.y0 = y;
      node.y1 = y + node.count * scale;
      y = node.y1 + nodePadding;
    }
  }

  const links: LaidLink[] = [];
  const outCursor = new Map<string, number>();
  const inCursor = new Map<string, number>();
  const ordered = [...graph.edges].sort((a, b) => {
    const sa = byKey.get(nodeKey(a.depth, a.source))!;
    const sb = byKey.get(nodeKey(b.depth, b.source))!;
    const ta = byKey.get(nodeKey(a.depth + 1, a.target))!;
    const tb = byKey.get(nodeKey(b.depth + 1, b.target))!;
    return sa.y0 - sb.y0 || ta.y0 - tb.y0;
  });
  for (const edge of ordered) {
    const source = byKey.get(nodeKey(edge.depth, edge.source))!;
    const target = byKey.get(nodeKey(edge.depth + 1, edge.target))!;
    const thickness = edge.count * scale;
    const sy0 = source.y0 + (outCursor.get(source.key) ?? 0);
    const ty0 = target.y0 + (inCursor.get(target.key) ?? 0);
    outCursor.set(source.key, sy0 + thickness - source.y0);
    inCursor.set(target.key, ty0 + thickness - target.y0);
    const x0 = source.x1;
    const x1 = target.x0;
    const mx = (x0 + x1) / 2;
    const sy1 = sy0 + thickness;
    const ty1 = ty0 + thickness;
    links.push({
      edge,
      sourceKey: source.key,
      targetKey: target.key,
      thickness,
      x0,
      x1,
      sy0,
      sy1,
      ty0,
      ty1,
      path:
        `M${x0},${sy0} C${mx},${sy0} ${mx},${ty0} ${x1},${ty0} ` +
        `L${x1},${ty1} C${mx},${ty1} ${mx},${sy1} ${x0},${sy1} Z`,
    });
  }
  return { nodes: [...byKey.values()], links, scale };
}

/** Flows whose path traverses the given edge; used for click-to-select. */
export function flowsThroughEdge(
  flows: { flow_id: string; path: string[]; status: string }[],
  edge: SankeyEdge,
): string[] {
  const matches: string[] = [];
  for (const flow of flows) {
    if (flow.path[edge.depth] !== edge.source) continue;
    const next: string =
      edge.depth + 1 < flow.path.length
        ? flow.path[edge.depth + 1]!
        : flow.status === "completed"
          ? "END"
          : "ABORT";
    if (next === edge.target) matches.push(flow.flow_id);
  }
  return matches;
}
