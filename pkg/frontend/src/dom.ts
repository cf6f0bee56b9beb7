/** Tiny element builder; keeps the views free of framework dependencies. */

const SVG_NS = "http://www.w3.org/2000/svg";
const SVG_TAGS = new Set([
  "svg", "g", "rect", "circle", "line", "path", "text", "polyline", "title",
]);

type Child = Node | string | null | undefined;

export function h(
  tag: string,
  attrs: Record<string, string | number | boolean | ((event: Event) => void)> = {},
  ...children: Child[]
): HTMLElement | SVGElement {
  const el = SVG_TAGS.has(tag)
    ? document.createElementNS(SVG_NS, tag)
    : document.createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    if (typeof value === "function") {
      el.addEventListener(name.replace(/^on/, ""), value as EventListener);
    } else if (typeof value === "boolean") {
      if (name in el) {
        (el as unknown as Record<string, boolean>)[name] = value;
      } else if (value) {
        el.setAttribute(name, "");
      }
    } else {
      el.setAttribute(name, String(value));
    }
  }
  for (const child of children) {
    if (child === null || child === undefined) continue;
    el.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
  return el;
}

export function clear(el: Element): void {
  while (el.firstChild) el.removeChild(el.firstChild);
}
