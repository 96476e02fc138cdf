/** Minimal SVG charts; only axis scaling happens client-side. */

const PALETTE = ["#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377", "#bbbbbb"];

export function lineChartSvg(
  series: Map<string, number[]>,
  width = 520,
  height = 220,
): string {
  const pad = 34;
  const all: number[] = [];
  for (const values of series.values()) all.push(...values);
  if (all.length === 0) {
    return `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="chart empty"><text x="${width / 2}" y="${height / 2}" text-anchor="middle" font-size="11" fill="#888">no reward data yet</text></svg>`;
  }
  const min = Math.min(...all);
  const max = Math.max(...all);
  const span = max - min || 1;
  const longest = Math.max(...[...series.values()].map((v) => v.length), 2);

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="chart">`,
    `<line x1="${pad}" y1="${height - pad}" x2="${width - 8}" y2="${height - pad}" stroke="#999"/>`,
    `<line x1="${pad}" y1="8" x2="${pad}" y2="${height - pad}" stroke="#999"/>`,
    `<text x="${pad - 4}" y="14" font-size="9" text-anchor="end">${max.toFixed(1)}</text>`,
    `<text x="${pad - 4}" y="${height - pad}" font-size="9" text-anchor="end">${min.toFixed(1)}</text>`,
  ];
  let colorIndex = 0;
  for (const [name, values] of series) {
    const color = PALETTE[colorIndex++ % PALETTE.length];
    const points = values
      .map((value, i) => {
        const x = pad + (i / (longest - 1)) * (width - pad - 12);
        const y = height - pad - ((value - min) / span) * (height - pad - 14);
        return `${x.toFixed(1)},${y.toFixed(1)}`;
      })
      .join(" ");
    parts.push(
      `<polyline class="series" data-name="${name}" points="${points}" fill="none" stroke="${color}" stroke-width="1.4"/>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
