import { describe, expect, it } from "vitest";

import {
  coverageBarsSvg,
  graphSvg,
  heatmapSvg,
  projectNodes,
  tourStrokeWidth,
  treemapRects,
  treemapSvg,
} from "../src/behavior.js";
import type { LayoutDoc, MatrixDoc, RuleSetDoc } from "../src/types.js";

function clusteredTenByTen(): MatrixDoc {
  const labels = Array.from({ length: 10 }, (_, i) => `C${i + 1}`);
  const counts = labels.map((_, i) =>
    labels.map((_, j) => ((i + j) % 4 === 0 ? i + j + 1 : 0)),
  );
  return { kind: "clustered_state", labels, counts };
}

function tourLayout(): LayoutDoc {
  return {
    dims: 2,
    final_stress: 0.01,
    nodes: [
      { id: "S1", x: 0, y: 0 },
      { id: "S2", x: 1, y: 0 },
      { id: "S3", x: 1, y: 1 },
      { id: "S4", x: 0, y: 1 },
    ],
    matrix: {
      kind: "state",
      labels: ["S1", "S2", "S3", "S4"],
      counts: [
        [0, 2, 0, 1],
        [0, 0, 1, 0],
        [1, 0, 0, 0],
        [0, 0, 1, 0],
      ],
    },
    tour: [
      { from: "S1", to: "S2", weight: 0.25 },
      { from: "S2", to: "S3", weight: 0.5 },
      { from: "S3", to: "S1", weight: 0.75 },
      { from: "S1", to: "S4", weight: 1.0 },
    ],
  };
}

function sampleRules(): RuleSetDoc {
  return {
    rules: [
      {
        label: "up",
        conditions: [{ feature: "y", op: "<=", threshold: 3.5 }],
        coverage: 20,
        precision: 1.0,
      },
      {
        label: "right",
        conditions: [{ feature: "x", op: "<=", threshold: 3.5 }],
        coverage: 4,
        precision: 0.95,
      },
    ],
    default_label: "right",
    treemap: [
      { rule_index: 0, weight: 0.6 },
      { rule_index: 1, weight: 0.25 },
      { rule_index: "default", weight: 0.15 },
    ],
  };
}

describe("clustered heatmap", () => {
  it("renders a 10x10 grid of cells", () => {
    const svg = heatmapSvg(clusteredTenByTen());
    expect(svg).toContain('data-n="10"');
    const cells = svg.match(/class="cell"/g) ?? [];
    expect(cells).toHaveLength(100);
  });

  it("cell metadata carries the exact counts", () => {
    const matrix = clusteredTenByTen();
    const svg = heatmapSvg(matrix);
    for (let i = 0; i < 10; i++) {
      for (let j = 0; j < 10; j++) {
        expect(svg).toContain(`data-row="${i}" data-col="${j}" data-count="${matrix.counts[i][j]}"`);
      }
    }
  });

  it("labels every row and column", () => {
    const svg = heatmapSvg(clusteredTenByTen());
    for (let i = 1; i <= 10; i++) {
      expect(svg).toContain(`>C${i}</text>`);
    }
  });
});

describe("transition graph with agent tour", () => {
  it("tour edge widths increase monotonically along the episode", () => {
    const svg = graphSvg(tourLayout());
    const widths = [...svg.matchAll(/class="tour-edge"[^>]*stroke-width="([\d.]+)"/g)].map((m) =>
      Number(m[1]),
    );
    expect(widths).toHaveLength(4);
    for (let i = 1; i < widths.length; i++) {
      expect(widths[i]).toBeGreaterThan(widths[i - 1]);
    }
  });

  it("weight-to-width encoding is strictly increasing", () => {
    expect(tourStrokeWidth(0.1)).toBeLessThan(tourStrokeWidth(0.5));
    expect(tourStrokeWidth(0.5)).toBeLessThan(tourStrokeWidth(1.0));
  });

  it("draws every node with its label", () => {
    const svg = graphSvg(tourLayout());
    for (const id of ["S1", "S2", "S3", "S4"]) expect(svg).toContain(`>${id}</text>`);
  });

  it("projects coordinates into the viewport", () => {
    const points = projectNodes(tourLayout(), 520, 420, 40);
    for (const p of Object.values(points)) {
      expect(p.x).toBeGreaterThanOrEqual(40);
      expect(p.x).toBeLessThanOrEqual(480);
      expect(p.y).toBeGreaterThanOrEqual(40);
      expect(p.y).toBeLessThanOrEqual(380);
    }
  });

  it("handles 3D layouts", () => {
    const layout: LayoutDoc = {
      dims: 3,
      final_stress: 0,
      nodes: [
        { id: "a", x: 0, y: 0, z: 0 },
        { id: "b", x: 1, y: 1, z: 1 },
      ],
    };
    const svg = graphSvg(layout);
    expect(svg).toContain('data-dims="3"');
  });
});

describe("coverage treemap", () => {
  it("tile areas sum to the full square", () => {
    const rects = treemapRects([0.6, 0.25, 0.15], ["a", "b", "c"]);
    const area = rects.reduce((sum, r) => sum + r.w * r.h, 0);
    expect(area).toBeCloseTo(1.0, 10);
  });

  it("tile areas are proportional to weights", () => {
    const rects = treemapRects([0.5, 0.3, 0.2], ["a", "b", "c"]);
    expect(rects[0].w * rects[0].h).toBeCloseTo(0.5, 10);
    expect(rects[1].w * rects[1].h).toBeCloseTo(0.3, 10);
    expect(rects[2].w * rects[2].h).toBeCloseTo(0.2, 10);
  });

  it("renders one tile per rule plus the default", () => {
    const svg = treemapSvg(sampleRules());
    const tiles = svg.match(/class="tile"/g) ?? [];
    expect(tiles).toHaveLength(3);
    expect(svg).toContain('data-weight="0.6"');
    expect(svg).toContain('data-weight="0.15"');
  });
});

describe("coverage bars", () => {
  it("one bar per rule plus default, widths from weights", () => {
    const svg = coverageBarsSvg(sampleRules());
    const bars = [...svg.matchAll(/class="bar" data-weight="([\d.]+)"/g)].map((m) => Number(m[1]));
    expect(bars).toEqual([0.6, 0.25, 0.15]);
  });
});
