/** Minimal deterministic SVG line charts: axes, ticks, one polyline plus
 * markers per series, legend. No dependencies, byte-stable output. */

export interface Series {
  label: string;
  points: Array<[number, number]>;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  width?: number;
  height?: number;
  yMin?: number;
}

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const MARKERS = ["circle", "square", "diamond", "triangle", "cross", "circle"];

const M = { left: 64, right: 24, top: 40, bottom: 52 };

function fmt(v: number): string {
  return Number(v.toFixed(3)).toString();
}

function ticks(lo: number, hi: number, count = 6): number[] {
  if (lo === hi) {
    return [lo];
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / (count * step);
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = mult * step;
  const start = Math.ceil(lo / s) * s;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-9 * span; v += s) {
    out.push(Number(v.toFixed(10)));
  }
  return out;
}

function marker(shape: string, x: number, y: number, color: string): string {
  const r = 3.5;
  switch (shape) {
    case "square":
      return `<rect x="${fmt(x - r)}" y="${fmt(y - r)}" width="${fmt(2 * r)}" height="${fmt(2 * r)}" fill="${color}"/>`;
    case "diamond":
      return `<path d="M ${fmt(x)} ${fmt(y - r)} L ${fmt(x + r)} ${fmt(y)} L ${fmt(x)} ${fmt(y + r)} L ${fmt(x - r)} ${fmt(y)} Z" fill="${color}"/>`;
    case "triangle":
      return `<path d="M ${fmt(x)} ${fmt(y - r)} L ${fmt(x + r)} ${fmt(y + r)} L ${fmt(x - r)} ${fmt(y + r)} Z" fill="${color}"/>`;
    case "cross":
      return `<path d="M ${fmt(x - r)} ${fmt(y - r)} L ${fmt(x + r)} ${fmt(y + r)} M ${fmt(x - r)} ${fmt(y + r)} L ${fmt(x + r)} ${fmt(y - r)}" stroke="${color}" stroke-width="1.5"/>`;
    default:
      return `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${fmt(r)}" fill="${color}"/>`;
  }
}

export function renderChart(spec: ChartSpec): string {
  if (spec.series.length === 0) {
    throw new Error("chart needs at least one series");
  }
  const width = spec.width ?? 560;
  const height = spec.height ?? 420;
  const plotW = width - M.left - M.right;
  const plotH = height - M.top - M.bottom;

  const xs = spec.series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = spec.series.flatMap((s) => s.points.map((p) => p[1]));
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  let yLo = spec.yMin ?? Math.min(...ys, 0);
  let yHi = Math.max(...ys);
  if (xLo === xHi) {
    xLo -= 1;
    xHi += 1;
  }
  if (yLo === yHi) {
    yHi += 1;
  }
  yHi += (yHi - yLo) * 0.06;

  const px = (x: number) => M.left + ((x - xLo) / (xHi - xLo)) * plotW;
  const py = (y: number) => M.top + plotH - ((y - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="22" text-anchor="middle" font-size="14">${escapeXml(spec.title)}</text>`,
  );

  for (const tx of ticks(xLo, xHi)) {
    const x = px(tx);
    parts.push(
      `<line x1="${fmt(x)}" y1="${M.top}" x2="${fmt(x)}" y2="${M.top + plotH}" stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${fmt(x)}" y="${M.top + plotH + 18}" text-anchor="middle" font-size="11">${fmt(tx)}</text>`,
    );
  }
  for (const ty of ticks(yLo, yHi)) {
    const y = py(ty);
    parts.push(
      `<line x1="${M.left}" y1="${fmt(y)}" x2="${M.left + plotW}" y2="${fmt(y)}" stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${M.left - 8}" y="${fmt(y + 4)}" text-anchor="end" font-size="11">${fmt(ty)}</text>`,
    );
  }
  parts.push(
    `<rect x="${M.left}" y="${M.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333333"/>`,
  );
  parts.push(
    `<text x="${M.left + plotW / 2}" y="${height - 14}" text-anchor="middle" font-size="12">${escapeXml(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="18" y="${M.top + plotH / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 18 ${M.top + plotH / 2})">${escapeXml(spec.yLabel)}</text>`,
  );

  spec.series.forEach((series, idx) => {
    const color = COLORS[idx % COLORS.length];
    const shape = MARKERS[idx % MARKERS.length];
    const pts = [...series.points].sort((a, b) => a[0] - b[0]);
    const path = pts.map((p) => `${fmt(px(p[0]))},${fmt(py(p[1]))}`).join(" ");
    parts.push(
      `<polyline points="${path}" fill="none" stroke="${color}" stroke-width="1.8" data-series="${escapeXml(series.label)}"/>`,
    );
    for (const p of pts) {
      parts.push(marker(shape, px(p[0]), py(p[1]), color));
    }
    const ly = M.top + 14 + idx * 16;
    const lx = M.left + plotW - 120;
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${color}" stroke-width="1.8"/>`);
    parts.push(`<text x="${lx + 28}" y="${ly}" font-size="11">${escapeXml(series.label)}</text>`);
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
