import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import { renderSequenceView } from "../src/views/sequenceView.js";
import {
  DETAIL_SEQ2,
  EMPTY_FLOWS,
  EMPTY_SANKEY,
  apiFetchStub,
  waitFor,
} from "./fixtures.js";

function freshRoot(): HTMLElement {
  document.body.innerHTML = "<div id='app'></div>";
  return document.getElementById("app")!;
}

async function bootApp(query: string, overrides = {}) {
  const { stub, calls } = apiFetchStub(overrides);
  vi.stubGlobal("fetch", stub);
  window.history.replaceState(null, "", `/${query ? `?${query}` : ""}`);
  const app = new App(freshRoot(), new ApiClient(""));
  await app.boot();
  return { app, calls };
}

beforeEach(() => {
  vi.unstubAllGlobals();
});

describe("task view", () => {
  it("renders ribbons with widths proportional to edge counts", async () => {
    await bootApp("view=task&task=task-0001&snapshot=2");
    await waitFor(() => document.querySelectorAll(".sankey-link").length === 5);
    const ribbons = [...document.querySelectorAll(".sankey-link")] as SVGPathElement[];
    const thickness = (source: string, target: string) =>
      Number(
        ribbons
          .find((r) => r.dataset.source === source && r.dataset.target === target)!
          .dataset.thickness,
      );
    expect(thickness("nav.home", "nav.search") / thickness("nav.home", "nav.recents")).toBeCloseTo(1.5, 6);
    expect(document.querySelectorAll(".flow-row").length).toBe(2);
  });

  it("shows an explicit empty state for a graph with zero sequences", async () => {
    await bootApp("view=task&task=task-0001&snapshot=2", {
      sankey: EMPTY_SANKEY,
      flows: EMPTY_FLOWS,
    });
    await waitFor(() => document.querySelector(".empty-state") !== null);
    expect(document.querySelector(".empty-state")!.textContent).toContain("No sequences match");
    expect(document.querySelectorAll(".sankey-link").length).toBe(0);
  });

  it("filter edits refetch with updated query params", async () => {
    const { calls } = await bootApp("view=task&task=task-0001&snapshot=2");
    await waitFor(() => document.querySelector("#filter-sw") !== null);
    (document.querySelector("#filter-sw") as HTMLInputElement).value = "1.1.0";
    (document.querySelector("#apply-filters") as HTMLButtonElement).click();
    await waitFor(() => calls.some((url) => url.includes("software_version=1.1.0")));
    expect(window.location.search).toContain("sw=1.1.0");
  });

  it("clicking a ribbon selects the traversing flows", async () => {
    const { app } = await bootApp("view=task&task=task-0001&snapshot=2");
    await waitFor(() => document.querySelectorAll(".sankey-link").length === 5);
    const abortRibbon = [...document.querySelectorAll(".sankey-link")].find(
      (r) => (r as SVGPathElement).dataset.target === "ABORT",
    ) as SVGPathElement;
    abortRibbon.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await waitFor(() => app.state.flowIds.length === 1);
    expect(app.state.flowIds).toEqual(["flow-bbb"]);
  });
});

describe("flow view and sequence drill-down", () => {
  it("renders one box group per flow and annotates flows without data", async () => {
    await bootApp("view=flow&task=task-0001&snapshot=2&flow=flow-aaa&flow=flow-bbb");
    await waitFor(() => document.querySelectorAll(".flow-group").length === 2);
    expect(document.querySelectorAll(".box").length).toBe(1);
    expect(document.querySelector(".no-data")!.textContent).toBe("no data for metric");
    expect(document.querySelectorAll(".seq-point").length).toBe(3);
  });

  it("clicking a point opens the sequence view with marker count equal to the event count", async () => {
    const { app } = await bootApp("view=flow&task=task-0001&snapshot=2&flow=flow-aaa&flow=flow-bbb");
    await waitFor(() => document.querySelectorAll(".seq-point").length === 3);

    const point = [...document.querySelectorAll(".seq-point")].find(
      (p) => (p as SVGCircleElement).dataset.sequenceId === "seq-2",
    ) as SVGCircleElement;
    point.dispatchEvent(new MouseEvent("click", { bubbles: true }));

    await waitFor(() => app.state.view === "sequence");
    await waitFor(() => document.querySelectorAll(".event-marker").length > 0);
    expect(app.state.sequenceId).toBe("seq-2");
    expect(document.querySelectorAll(".event-marker").length).toBe(DETAIL_SEQ2.markers.length);
  });

  it("reloading the URL reproduces the sequence view", async () => {
    const { app } = await bootApp("view=flow&task=task-0001&snapshot=2&flow=flow-aaa&flow=flow-bbb");
    await waitFor(() => document.querySelectorAll(".seq-point").length === 3);
    const point = [...document.querySelectorAll(".seq-point")].find(
      (p) => (p as SVGCircleElement).dataset.sequenceId === "seq-2",
    ) as SVGCircleElement;
    point.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await waitFor(() => app.state.view === "sequence");
    const url = window.location.search;
    expect(url).toContain("view=sequence");
    expect(url).toContain("seq=seq-2");

    // a fresh app instance booted from that URL lands on the same view
    const { app: reloaded } = await bootApp(url.slice(1));
    await waitFor(() => document.querySelectorAll(".event-marker").length > 0);
    expect(reloaded.state.view).toBe("sequence");
    expect(reloaded.state.sequenceId).toBe("seq-2");
    expect(reloaded.state.flowIds).toEqual(["flow-aaa", "flow-bbb"]);
    expect(document.querySelectorAll(".event-marker").length).toBe(DETAIL_SEQ2.markers.length);
  });

  it("breadcrumb back to task level keeps filters", async () => {
    const { app } = await bootApp(
      "view=flow&task=task-0001&snapshot=2&flow=flow-aaa&model=sedan&sw=1.0.0",
    );
    await waitFor(() => document.querySelectorAll(".flow-group").length > 0);
    const taskCrumb = [...document.querySelectorAll(".crumb")].find(
      (b) => b.textContent === "Task level",
    ) as HTMLButtonElement;
    taskCrumb.click();
    await waitFor(() => app.state.view === "task");
    expect(app.state.filters.carModels).toEqual(["sedan"]);
    expect(app.state.filters.softwareVersions).toEqual(["1.0.0"]);
    expect(window.location.search).toContain("model=sedan");
  });
});

describe("sequence view lanes", () => {
  it("draws markers, glance band, speed and steering on one axis with a synchronized cursor", () => {
    document.body.innerHTML = "<div id='seq'></div>";
    const container = document.getElementById("seq")!;
    renderSequenceView(container, DETAIL_SEQ2);

    expect(container.querySelectorAll(".event-marker").length).toBe(3);
    expect(container.querySelectorAll(".glance-span").length).toBe(3);
    expect(container.querySelectorAll(".speed-trace").length).toBe(1);
    expect(container.querySelectorAll(".steering-trace").length).toBe(1);

    const cursor = container.querySelector("#hover-cursor")!;
    expect(cursor.getAttribute("visibility")).toBe("hidden");
    const overlay = container.querySelector("#hover-overlay")!;
    overlay.dispatchEvent(new MouseEvent("mousemove", { clientX: 300, bubbles: true }));
    expect(cursor.getAttribute("visibility")).toBe("visible");
    expect(cursor.getAttribute("x1")).toBe(cursor.getAttribute("x2"));
    overlay.dispatchEvent(new MouseEvent("mouseleave", { bubbles: true }));
    expect(cursor.getAttribute("visibility")).toBe("hidden");
  });

  it("announces a missing glance track without dropping other lanes", () => {
    document.body.innerHTML = "<div id='seq'></div>";
    const container = document.getElementById("seq")!;
    renderSequenceView(container, { ...DETAIL_SEQ2, glance_track: [] });
    expect(container.querySelector(".no-data")!.textContent).toBe("no glance data");
    expect(container.querySelectorAll(".speed-trace").length).toBe(1);
    expect(container.querySelectorAll(".event-marker").length).toBe(3);
  });
});
