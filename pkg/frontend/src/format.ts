/** Small presentation helpers shared by the views. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: Array<Node | string> = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export function statusBadge(status: string): HTMLElement {
  const span = el("span", { class: `badge badge-${status.toLowerCase()}` });
  span.textContent = status;
  return span;
}

export function shortTime(iso: string | null): string {
  if (!iso) return "-";
  const date = new Date(iso);
  return Number.isNaN(date.getTime()) ? iso : date.toLocaleTimeString();
}

export function describeData(data: unknown): string {
  if (data === null || data === undefined) return "-";
  if (typeof data === "object") return JSON.stringify(data);
  return String(data);
}

/** Horizontal bar chart for outcome counts, largest outcomes first. */
export function countsChart(counts: Record<string, number>, maxRows = 16): HTMLElement {
  const total = Object.values(counts).reduce((a, b) => a + b, 0) || 1;
  const rows = Object.entries(counts)
    .sort((a, b) => b[1] - a[1] || (a[0] < b[0] ? -1 : 1))
    .slice(0, maxRows);
  const chart = el("div", { class: "counts-chart" });
  for (const [outcome, count] of rows) {
    const percent = (100 * count) / total;
    const bar = el("div", { class: "bar-fill" });
    bar.style.width = `${Math.max(percent, 1).toFixed(1)}%`;
    chart.append(
      el("div", { class: "bar-row" }, [
        el("code", { class: "bar-label" }, [outcome]),
        el("div", { class: "bar-track" }, [bar]),
        el("span", { class: "bar-value" }, [`${count} (${percent.toFixed(1)}%)`]),
      ]),
    );
  }
  if (Object.keys(counts).length > maxRows) {
    chart.append(el("div", { class: "bar-more" }, [
      `… ${Object.keys(counts).length - maxRows} more outcomes`,
    ]));
  }
  return chart;
}
