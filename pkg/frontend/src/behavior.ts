/** Behavior explorer renderers: heatmap, transition graph + tour, treemap,
 * coverage bars. All numbers come from API documents; rendering only
 * scales them into SVG coordinates.
 */

import type { LayoutDoc, MatrixDoc, RuleSetDoc, TourEdge } from "./types.js";

const PURPLE = [[247, 244, 249], [84, 39, 143]] as const;

function shade(fraction: number): string {
  const [lo, hi] = PURPLE;
  const mix = lo.map((l, i) => Math.round(l + (hi[i] - l) * fraction));
  return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
}

function escapeXml(text: string): string {
  return text.replace(/[<>&"]/g, (c) => ({ "<": "&lt;", ">": "&gt;", "&": "&amp;", '"': "&quot;" })[c]!);
}

export function heatmapSvg(matrix: MatrixDoc, cell = 28): string {
  const n = matrix.labels.length;
  const margin = 70;
  const size = margin + n * cell + 10;
  let vmax = 0;
  for (const row of matrix.counts) for (const value of row) vmax = Math.max(vmax, value);

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${size} ${size}" class="heatmap" data-n="${n}">`,
  ];
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const count = matrix.counts[i][j];
      const x = margin + j * cell;
      const y = margin + i * cell;
      parts.push(
        `<rect class="cell" data-row="${i}" data-col="${j}" data-count="${count}" ` +
          `x="${x}" y="${y}" width="${cell - 1}" height="${cell - 1}" ` +
          `fill="${shade(vmax ? count / vmax : 0)}"/>`,
      );
      if (count > 0 && n <= 25) {
        const color = vmax && count > vmax / 2 ? "#fff" : "#222";
        parts.push(
          `<text x="${x + cell / 2}" y="${y + cell / 2 + 3}" font-size="9" ` +
            `text-anchor="middle" fill="${color}">${count}</text>`,
        );
      }
    }
  }
  for (let i = 0; i < n; i++) {
    const label = escapeXml(matrix.labels[i]);
    parts.push(
      `<text x="${margin - 6}" y="${margin + i * cell + cell / 2 + 3}" font-size="9" ` +
        `text-anchor="end">${label}</text>`,
      `<text x="${margin + i * cell + cell / 2}" y="${margin - 8}" font-size="9" ` +
        `text-anchor="middle" transform="rotate(-45 ${margin + i * cell + cell / 2} ${margin - 8})">${label}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

interface Projected {
  [id: string]: { x: number; y: number };
}

/** Project layout coordinates into a fixed viewport (ignores z for 3D). */
export function projectNodes(layout: LayoutDoc, width = 520, height = 420, pad = 40): Projected {
  const xs = layout.nodes.map((n) => n.x);
  const ys = layout.nodes.map((n) => n.y);
  const zs = layout.nodes.map((n) => n.z ?? 0);
  // simple isometric-ish projection for 3D layouts
  const px = layout.nodes.map((n, i) => (layout.dims === 3 ? xs[i] + 0.5 * zs[i] : xs[i]));
  const py = layout.nodes.map((n, i) => (layout.dims === 3 ? ys[i] + 0.3 * zs[i] : ys[i]));
  const minX = Math.min(...px);
  const maxX = Math.max(...px);
  const minY = Math.min(...py);
  const maxY = Math.max(...py);
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const out: Projected = {};
  layout.nodes.forEach((node, i) => {
    out[node.id] = {
      x: pad + ((px[i] - minX) / spanX) * (width - 2 * pad),
      y: pad + ((py[i] - minY) / spanY) * (height - 2 * pad),
    };
  });
  return out;
}

export function tourStrokeWidth(weight: number): number {
  return 1 + 4 * weight; // later transitions draw thicker
}

export function graphSvg(layout: LayoutDoc, width = 520, height = 420): string {
  const points = projectNodes(layout, width, height);
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="graph" data-dims="${layout.dims}">`,
    `<defs><marker id="arrow" viewBox="0 0 6 6" refX="5" refY="3" markerWidth="5" markerHeight="5" orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="#4477aa"/></marker></defs>`,
  ];

  if (layout.matrix) {
    let vmax = 0;
    for (const row of layout.matrix.counts) for (const v of row) vmax = Math.max(vmax, v);
    layout.matrix.labels.forEach((from, i) => {
      layout.matrix!.labels.forEach((to, j) => {
        const count = layout.matrix!.counts[i][j];
        if (!count || !(from in points) || !(to in points)) return;
        const a = points[from];
        const b = points[to];
        parts.push(
          `<line class="count-edge" x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}" ` +
            `stroke="#b39ddb" stroke-opacity="0.5" stroke-width="${0.5 + 2.5 * (count / (vmax || 1))}"/>`,
        );
      });
    });
  }

  for (const edge of layout.tour ?? []) {
    const a = points[edge.from];
    const b = points[edge.to];
    if (!a || !b) continue;
    parts.push(
      `<line class="tour-edge" data-weight="${edge.weight}" x1="${a.x}" y1="${a.y}" ` +
        `x2="${b.x}" y2="${b.y}" stroke="#4477aa" stroke-opacity="0.85" ` +
        `stroke-width="${tourStrokeWidth(edge.weight)}" marker-end="url(#arrow)"/>`,
    );
  }

  for (const node of layout.nodes) {
    const p = points[node.id];
    parts.push(
      `<circle cx="${p.x}" cy="${p.y}" r="14" fill="#fff" stroke="#333"/>`,
      `<text x="${p.x}" y="${p.y + 3}" font-size="9" text-anchor="middle">${escapeXml(node.id)}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

export interface TreemapRect {
  label: string;
  weight: number;
  x: number;
  y: number;
  w: number;
  h: number;
}

/** Slice-and-dice layout over the unit square, alternating cut direction. */
export function treemapRects(weights: number[], labels: string[]): TreemapRect[] {
  const rects: TreemapRect[] = [];
  let x = 0;
  let y = 0;
  let w = 1;
  let h = 1;
  const total = weights.reduce((a, b) => a + b, 0) || 1;
  weights.forEach((weight, index) => {
    const remaining = weights.slice(index).reduce((a, b) => a + b, 0) / total || 1;
    const share = weight / total / remaining;
    if (w >= h) {
      const rw = w * share;
      rects.push({ label: labels[index], weight, x, y, w: rw, h });
      x += rw;
      w -= rw;
    } else {
      const rh = h * share;
      rects.push({ label: labels[index], weight, x, y, w, h: rh });
      y += rh;
      h -= rh;
    }
  });
  return rects;
}

export function treemapSvg(rules: RuleSetDoc, size = 320): string {
  const labels = rules.rules.map((r, i) => `R${i + 1}: ${r.label}`);
  labels.push(`default: ${rules.default_label}`);
  const weights = rules.treemap.map((t) => t.weight);
  const rects = treemapRects(weights, labels);
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${size} ${size}" class="treemap">`,
  ];
  rects.forEach((rect, index) => {
    parts.push(
      `<rect class="tile" data-weight="${rect.weight}" x="${rect.x * size}" y="${rect.y * size}" ` +
        `width="${rect.w * size}" height="${rect.h * size}" ` +
        `fill="${shade(0.25 + (0.65 * index) / Math.max(1, rects.length - 1))}" stroke="#fff"/>`,
    );
    if (rect.w * size > 46 && rect.h * size > 24) {
      parts.push(
        `<text x="${(rect.x + rect.w / 2) * size}" y="${(rect.y + rect.h / 2) * size}" ` +
          `font-size="10" text-anchor="middle" fill="#fff">${escapeXml(rect.label)} ` +
          `${Math.round(rect.weight * 100)}%</text>`,
      );
    }
  });
  parts.push("</svg>");
  return parts.join("");
}

export function coverageBarsSvg(rules: RuleSetDoc, width = 460): string {
  const rows = rules.rules.map((rule, index) => ({
    name: `R${index + 1}: IF ${rule.conditions.map((c) => `${c.feature} ${c.op} ${c.threshold}`).join(" AND ")} THEN ${rule.label}`,
    weight: rules.treemap[index]?.weight ?? 0,
    precision: rule.precision,
  }));
  rows.push({
    name: `default: ${rules.default_label}`,
    weight: rules.treemap[rules.treemap.length - 1]?.weight ?? 0,
    precision: NaN,
  });
  const rowHeight = 26;
  const height = rows.length * rowHeight + 10;
  const barLeft = 8;
  const barWidth = width - 140;
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="coverage">`,
  ];
  rows.forEach((row, index) => {
    const y = 6 + index * rowHeight;
    parts.push(
      `<rect class="bar" data-weight="${row.weight}" x="${barLeft}" y="${y}" height="14" ` +
        `width="${Math.max(1, row.weight * barWidth)}" fill="#7e57c2"/>`,
      `<text x="${barLeft + row.weight * barWidth + 6}" y="${y + 11}" font-size="10">` +
        `${Math.round(row.weight * 100)}%${Number.isNaN(row.precision) ? "" : ` / prec ${Math.round(row.precision * 100)}%`}</text>`,
      `<text x="${barLeft}" y="${y + 24}" font-size="9" fill="#555">${escapeXml(row.name.slice(0, 88))}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("");
}
