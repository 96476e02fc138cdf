/** Tiny DOM helpers; the app renders by replacing container contents. */

export function h(
  tag: string,
  attrs: Record<string, string | ((event: Event) => void)> = {},
  ...children: (Node | string)[]
): HTMLElement {
  const element = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "function") {
      element.addEventListener(key.replace(/^on/, ""), value);
    } else {
      element.setAttribute(key, value);
    }
  }
  for (const child of children) {
    element.append(child instanceof Node ? child : document.createTextNode(child));
  }
  return element;
}

export function replaceChildren(container: HTMLElement, ...children: (Node | string)[]): void {
  container.replaceChildren(
    ...children.map((c) => (c instanceof Node ? c : document.createTextNode(c))),
  );
}

export function svgContainer(markup: string, className = ""): HTMLElement {
  const div = document.createElement("div");
  if (className) div.className = className;
  div.innerHTML = markup;
  return div;
}
