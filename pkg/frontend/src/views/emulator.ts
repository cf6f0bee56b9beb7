/** Click-through recording emulator.
 *
 * Renders the catalog's screen graph as clickable buttons; every click is
 * recorded in order and clicking an element with a navigation target moves
 * to that screen. The recorded identifiers export as the task recording file
 * (one id per line), or post directly as a new task. */

import type { Screen, ScreensResponse, UiElementInfo } from "../api.js";
import { clear, h } from "../dom.js";

export class EmulatorSession {
  readonly clicks: UiElementInfo[] = [];
  currentScreenId: string | null;
  private screens: Map<string, Screen>;

  constructor(graph: ScreensResponse) {
    this.screens = new Map(graph.screens.map((s) => [s.screen_id, s]));
    this.currentScreenId = graph.home_screen_id ?? graph.screens[0]?.screen_id ?? null;
  }

  get currentScreen(): Screen | null {
    return this.currentScreenId !== null ? (this.screens.get(this.currentScreenId) ?? null) : null;
  }

  /** Record a click; navigates when the element has a target screen. */
  click(elementId: string): void {
    const screen = this.currentScreen;
    const element = screen?.elements.find((e) => e.element_id === elementId);
    if (!element || !element.interactive) return;
    this.clicks.push(element);
    if (element.leads_to_screen !== null && this.screens.has(element.leads_to_screen)) {
      this.currentScreenId = element.leads_to_screen;
    }
  }

  /** A task needs distinct first and last interactions. */
  get canExport(): boolean {
    return this.clicks.length >= 2 && this.clicks[0]!.element_id !== this.clicks[this.clicks.length - 1]!.element_id;
  }

  /** Recording file body: one element id per line, in click order. */
  exportText(): string {
    return this.clicks.map((c) => c.element_id).join("\n") + "\n";
  }

  reset(home: string | null): void {
    this.clicks.length = 0;
    if (home !== null) this.currentScreenId = home;
  }
}

export interface EmulatorCallbacks {
  onCreateTask(recording: string): void;
  onDownload(recording: string): void;
}

export function renderEmulator(
  container: Element,
  graph: ScreensResponse,
  session: EmulatorSession,
  callbacks: EmulatorCallbacks,
): void {
  clear(container);
  const screen = session.currentScreen;
  if (!screen) {
    container.append(h("p", { class: "empty-state" }, "The concept catalog has no screens."));
    return;
  }

  const buttons = screen.elements.map((element) =>
    h(
      "button",
      {
        class: element.interactive ? "emu-element" : "emu-element static",
        "data-element-id": element.element_id,
        disabled: !element.interactive,
        title: element.function,
        onclick: () => {
          session.click(element.element_id);
          renderEmulator(container, graph, session, callbacks);
        },
      },
      element.leads_to_screen !== null ? `${element.label} ›` : element.label,
    ),
  );

  const trail = session.clicks.map((c) => c.element_id).join(" → ") || "(no clicks yet)";
  const hint = session.canExport
    ? ""
    : "record at least two interactions with distinct start and end to export";

  container.append(
    h(
      "section",
      { class: "emulator" },
      h("h3", {}, `Screen: ${screen.screen_id}`),
      h("div", { class: "emu-screen", "data-screen-id": screen.screen_id }, ...buttons),
      h("p", { class: "emu-trail", id: "emu-trail" }, `Recording: ${trail}`),
      h("span", { class: "emu-hint", id: "emu-hint" }, hint),
      h(
        "button",
        {
          id: "emu-export",
          disabled: !session.canExport,
          onclick: () => callbacks.onDownload(session.exportText()),
        },
        "Export recording",
      ),
      h(
        "button",
        {
          id: "emu-create-task",
          disabled: !session.canExport,
          onclick: () => callbacks.onCreateTask(session.exportText()),
        },
        "Create task from recording",
      ),
      h(
        "button",
        {
          id: "emu-reset",
          onclick: () => {
            session.reset(graph.home_screen_id);
            renderEmulator(container, graph, session, callbacks);
          },
        },
        "Reset",
      ),
    ),
  );
}
