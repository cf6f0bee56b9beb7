/** Root controller: owns the view state, the URL, and all data fetching.
 *
 * Drill-down is strictly task → flow → sequence with persistent breadcrumbs;
 * returning to the task level keeps the active filters. Fetches are keyed to
 * the state that issued them and aborted on navigation, so a slow response
 * can never overwrite a newer view. */

import { ApiClient, ApiError } from "./api.js";
import type { ScreensResponse, TaskDef } from "./api.js";
import { clear, h } from "./dom.js";
import {
  ViewState,
  decodeState,
  defaultState,
  normalizeState,
  stateUrl,
} from "./state.js";
import { EmulatorSession, renderEmulator } from "./views/emulator.js";
import { renderFlowView } from "./views/flowView.js";
import { renderSequenceView } from "./views/sequenceView.js";
import { renderTaskView } from "./views/taskView.js";

export class App {
  state: ViewState;
  private abort: AbortController | null = null;
  private renderToken = 0;
  private emulator: EmulatorSession | null = null;
  private screenGraph: ScreensResponse | null = null;
  private emulatorOpen = false;

  constructor(
    private root: Element,
    private api: ApiClient,
    private pushUrl: boolean = true,
  ) {
    this.state = defaultState();
  }

  /** Restore state from the URL (deep link) and render. */
  async boot(): Promise<void> {
    this.state = decodeState(window.location.search);
    window.addEventListener("popstate", () => {
      this.state = decodeState(window.location.search);
      void this.render();
    });
    this.scaffold();
    await this.render();
  }

  navigate(partial: Partial<ViewState>, push = true): Promise<void> {
    this.state = normalizeState({ ...this.state, ...partial });
    if (push && this.pushUrl) {
      window.history.pushState(null, "", stateUrl(this.state));
    }
    return this.render();
  }

  private scaffold(): void {
    clear(this.root);
    this.root.append(
      h("header", { id: "topbar" }, h("h1", {}, "flowboat"), h("nav", { id: "breadcrumbs" })),
      h("section", { id: "setup" }),
      h("section", { id: "emulator-host" }),
      h("main", { id: "view" }),
      h("p", { id: "status-line" }),
    );
  }

  private el(id: string): Element {
    return this.root.querySelector(`#${id}`)!;
  }

  async render(): Promise<void> {
    this.abort?.abort();
    const controller = new AbortController();
    this.abort = controller;
    const token = ++this.renderToken;
    const fresh = () => token === this.renderToken;

    this.renderBreadcrumbs();
    try {
      await this.renderSetup(controller.signal, fresh);
      const view = this.el("view");
      if (this.state.taskId === null) {
        if (fresh()) {
          clear(view);
          view.append(
            h("p", { class: "empty-state" }, "Pick a task, create one from start/end elements, or record one in the emulator."),
          );
        }
        return;
      }
      if (this.state.view === "task") {
        await this.renderTask(controller.signal, fresh);
      } else if (this.state.view === "flow") {
        await this.renderFlow(controller.signal, fresh);
      } else {
        await this.renderSequence(controller.signal, fresh);
      }
      if (fresh()) this.setStatus("");
    } catch (error) {
      if (!fresh() || (error instanceof DOMException && error.name === "AbortError")) return;
      const message =
        error instanceof ApiError ? `${error.message} (${error.code})` : String(error);
      this.setStatus(message);
    }
  }

  private setStatus(message: string): void {
    this.el("status-line").textContent = message;
  }

  private renderBreadcrumbs(): void {
    const nav = this.el("breadcrumbs");
    clear(nav);
    const crumb = (label: string, active: boolean, onclick: (() => void) | null) =>
      h(
        "button",
        {
          class: active ? "crumb active" : "crumb",
          disabled: onclick === null,
          onclick: () => onclick?.(),
        },
        label,
      );
    nav.append(
      crumb("Task level", this.state.view === "task", () => void this.navigate({ view: "task" })),
      crumb(
        "Flow level",
        this.state.view === "flow",
        this.state.flowIds.length > 0 ? () => void this.navigate({ view: "flow" }) : null,
      ),
      crumb(
        "Sequence level",
        this.state.view === "sequence",
        this.state.sequenceId !== null ? () => void this.navigate({ view: "sequence" }) : null,
      ),
      h(
        "span",
        { class: "snapshot-label", id: "snapshot-label" },
        this.state.snapshotId !== null ? `snapshot ${this.state.snapshotId}` : "latest snapshot",
      ),
    );
  }

  private async renderSetup(signal: AbortSignal, fresh: () => boolean): Promise<void> {
    const tasks = await this.api.listTasks(signal);
    if (!fresh()) return;
    const setup = this.el("setup");
    clear(setup);

    const picker = h("select", { id: "task-picker" }) as HTMLSelectElement;
    picker.append(h("option", { value: "" }, "— choose a task —"));
    for (const task of tasks.tasks) {
      picker.append(
        h(
          "option",
          { value: task.task_id, selected: task.task_id === this.state.taskId },
          `${task.task_id}: ${task.name ?? `${task.start_element} → ${task.end_element}`}`,
        ),
      );
    }
    picker.addEventListener("change", () => {
      if (picker.value) void this.navigate({ view: "task", taskId: picker.value, flowIds: [], sequenceId: null });
    });

    const startInput = h("input", { id: "start-element", placeholder: "start element id", list: "concept-options" }) as HTMLInputElement;
    const endInput = h("input", { id: "end-element", placeholder: "end element id", list: "concept-options" }) as HTMLInputElement;
    const datalist = h("datalist", { id: "concept-options" });
    const suggest = async (query: string) => {
      if (!query) return;
      const found = await this.api.searchConcepts(query);
      clear(datalist);
      for (const element of found.results) {
        datalist.append(h("option", { value: element.element_id }, `${element.label} · ${element.app}`));
      }
    };
    startInput.addEventListener("input", () => void suggest(startInput.value));
    endInput.addEventListener("input", () => void suggest(endInput.value));

    const createButton = h(
      "button",
      {
        id: "create-task",
        onclick: () => void this.createTask(startInput.value.trim(), endInput.value.trim()),
      },
      "Create task",
    );
    const emulatorToggle = h(
      "button",
      {
        id: "toggle-emulator",
        onclick: () => void this.toggleEmulator(),
      },
      this.emulatorOpen ? "Hide recording emulator" : "Record a task in the emulator",
    );
    setup.append(
      h("label", { for: "task-picker" }, "Task "),
      picker,
      startInput,
      endInput,
      datalist,
      createButton,
      emulatorToggle,
    );
  }

  private async createTask(start: string, end: string): Promise<void> {
    if (!start || !end) {
      this.setStatus("both start and end element ids are required");
      return;
    }
    try {
      const task = await this.api.createTask(start, end);
      await this.navigate({ view: "task", taskId: task.task_id, flowIds: [], sequenceId: null });
    } catch (error) {
      this.setStatus(error instanceof ApiError ? `${error.message} (${error.detail ?? error.code})` : String(error));
    }
  }

  private async toggleEmulator(): Promise<void> {
    this.emulatorOpen = !this.emulatorOpen;
    const host = this.el("emulator-host");
    if (!this.emulatorOpen) {
      clear(host);
      this.emulator = null;
      await this.render();
      return;
    }
    this.screenGraph = this.screenGraph ?? (await this.api.screens());
    this.emulator = new EmulatorSession(this.screenGraph);
    renderEmulator(host, this.screenGraph, this.emulator, {
      onCreateTask: (recording) => void this.createTaskFromRecording(recording),
      onDownload: (recording) => downloadText("task-recording.txt", recording),
    });
    await this.render();
  }

  private async createTaskFromRecording(recording: string): Promise<void> {
    try {
      const task = await this.api.createTaskFromRecording(recording);
      this.emulatorOpen = false;
      clear(this.el("emulator-host"));
      await this.navigate({ view: "task", taskId: task.task_id, flowIds: [], sequenceId: null });
    } catch (error) {
      this.setStatus(error instanceof ApiError ? `${error.message} (${error.detail ?? error.code})` : String(error));
    }
  }

  private async renderTask(signal: AbortSignal, fresh: () => boolean): Promise<void> {
    const taskId = this.state.taskId!;
    const [sankey, flows] = await Promise.all([
      this.api.sankey(taskId, this.state.filters, this.state.snapshotId, signal),
      this.api.flows(taskId, this.state.filters, this.state.snapshotId, signal),
    ]);
    if (!fresh()) return;
    // pin the snapshot the server answered with, so the view stays reproducible
    if (this.state.snapshotId === null) {
      this.state = { ...this.state, snapshotId: sankey.snapshot_id };
      if (this.pushUrl) window.history.replaceState(null, "", stateUrl(this.state));
      this.renderBreadcrumbs();
    }
    const selected = new Set(this.state.flowIds);
    renderTaskView(this.el("view"), sankey, flows, selected, this.state.filters, {
      onToggleFlows: (flowIds) => {
        const next = new Set(this.state.flowIds);
        const allIn = flowIds.every((id) => next.has(id));
        for (const id of flowIds) {
          if (allIn) next.delete(id);
          else next.add(id);
        }
        void this.navigate({ flowIds: [...next] });
      },
      onCompare: () => void this.navigate({ view: "flow" }),
      onFiltersChanged: (filters) => void this.navigate({ filters }),
    });
  }

  private async renderFlow(signal: AbortSignal, fresh: () => boolean): Promise<void> {
    const distribution = await this.api.distribution(
      this.state.taskId!,
      this.state.metricId,
      this.state.flowIds,
      this.state.filters,
      this.state.snapshotId,
      signal,
    );
    if (!fresh()) return;
    renderFlowView(this.el("view"), distribution, {
      onOpenSequence: (sequenceId) => void this.navigate({ view: "sequence", sequenceId }),
      onMetricChange: (metricId) => void this.navigate({ metricId }),
    });
  }

  private async renderSequence(signal: AbortSignal, fresh: () => boolean): Promise<void> {
    const detail = await this.api.sequenceDetail(this.state.sequenceId!, signal);
    if (!fresh()) return;
    renderSequenceView(this.el("view"), detail);
  }
}

export function downloadText(filename: string, text: string): void {
  if (typeof URL.createObjectURL !== "function") return; // test environments
  const url = URL.createObjectURL(new Blob([text], { type: "text/plain" }));
  const anchor = h("a", { href: url, download: filename });
  document.body.append(anchor);
  (anchor as HTMLAnchorElement).click();
  anchor.remove();
  URL.revokeObjectURL(url);
}

export type { TaskDef };
