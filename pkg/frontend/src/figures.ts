/** Figure builders over experiment records.
 *
 * vs_k            mean activated links vs network size, one line per scheme
 *                 (panel filter: dataset, density, gamma_db)
 * vs_gamma        mean activated links vs threshold, one line per scheme
 *                 (panel filter: dataset, density, k)
 * throughput_vs_k mean total weight vs network size, one line per stage cap
 *                 (panel filter: dataset, density)
 */

import { ResultRecord, SummaryRow } from "./csv.js";
import { GroupStat, groupMeans, matchesSig6, meanMatchesSig6 } from "./stats.js";
import { renderChart, Series } from "./svg.js";

export type FigureKind = "vs_k" | "vs_gamma" | "throughput_vs_k";

export interface PanelFilter {
  dataset: string;
  density: string;
  gammaDb?: string;
  k?: number;
}

export interface Figure {
  name: string;
  svg: string;
  /** the grouped means behind each plotted point, for verification */
  stats: GroupStat[];
}

const SCHEME_ORDER = ["SUD", "SLIC", "PIC", "SIC"];

function filterTag(filter: PanelFilter, kind: FigureKind): string {
  const parts = [filter.dataset, filter.density];
  if (kind === "vs_k" && filter.gammaDb !== undefined) {
    parts.push(`g${filter.gammaDb}`);
  }
  if (kind === "vs_gamma" && filter.k !== undefined) {
    parts.push(`k${filter.k}`);
  }
  return parts.join("_").replace(/[^A-Za-z0-9_.-]/g, "");
}

function selectPanel(records: ResultRecord[], filter: PanelFilter, kind: FigureKind): ResultRecord[] {
  return records.filter((r) => {
    if (r.dataset !== filter.dataset || r.density !== filter.density) return false;
    if (kind === "vs_k" && filter.gammaDb !== undefined && r.gammaDb !== filter.gammaDb) return false;
    if (kind === "vs_gamma" && filter.k !== undefined && r.k !== filter.k) return false;
    return true;
  });
}

function schemeSeries(stats: GroupStat[], xIndex: number, schemeIndex: number, y: (s: GroupStat) => number): Series[] {
  const bySeries = new Map<string, Array<[number, number]>>();
  for (const s of stats) {
    const label = s.key[schemeIndex];
    let pts = bySeries.get(label);
    if (!pts) {
      pts = [];
      bySeries.set(label, pts);
    }
    pts.push([Number(s.key[xIndex]), y(s)]);
  }
  const labels = [...bySeries.keys()].sort((a, b) => {
    const ia = SCHEME_ORDER.indexOf(a);
    const ib = SCHEME_ORDER.indexOf(b);
    if (ia >= 0 || ib >= 0) return (ia < 0 ? 99 : ia) - (ib < 0 ? 99 : ib);
    return Number(a) - Number(b);
  });
  return labels.map((label) => ({ label, points: bySeries.get(label)! }));
}

export function buildFigure(records: ResultRecord[], kind: FigureKind, filter: PanelFilter): Figure {
  const panel = selectPanel(records, filter, kind);
  if (panel.length === 0) {
    throw new Error(
      `filter selects no records: kind=${kind} dataset=${filter.dataset} density=${filter.density}` +
        (filter.gammaDb !== undefined ? ` gamma_db=${filter.gammaDb}` : "") +
        (filter.k !== undefined ? ` k=${filter.k}` : ""),
    );
  }
  const where = `${filter.dataset}-${filter.density}`;
  let stats: GroupStat[];
  let series: Series[];
  let title: string;
  let xLabel: string;
  let yLabel: string;
  if (kind === "vs_k") {
    stats = groupMeans(panel, (r) => [r.scheme, r.k]);
    series = schemeSeries(stats, 1, 0, (s) => s.activatedMean);
    title = `Mean activated links vs network size (${where}, ${filter.gammaDb} dB)`;
    xLabel = "links in the network";
    yLabel = "mean activated links";
  } else if (kind === "vs_gamma") {
    stats = groupMeans(panel, (r) => [r.scheme, r.gammaDb]);
    series = schemeSeries(stats, 1, 0, (s) => s.activatedMean);
    title = `Mean activated links vs threshold (${where}, K=${filter.k})`;
    xLabel = "SINR threshold (dB)";
    yLabel = "mean activated links";
  } else {
    stats = groupMeans(panel, (r) => [String(r.tCap), r.k]);
    series = schemeSeries(stats, 1, 0, (s) => s.weightMean).map((s) => ({
      label: `T=${s.label}`,
      points: s.points,
    }));
    title = `Mean network throughput vs size (${where})`;
    xLabel = "links in the network";
    yLabel = "mean throughput (b/s/Hz)";
  }
  const svg = renderChart({ title, xLabel, yLabel, series, yMin: 0 });
  return { name: `fig_${kind}_${filterTag(filter, kind)}.svg`, svg, stats };
}

/** Every panel present in the records for a figure kind. */
export function panelsFor(records: ResultRecord[], kind: FigureKind): PanelFilter[] {
  const seen = new Map<string, PanelFilter>();
  for (const r of records) {
    let filter: PanelFilter;
    if (kind === "vs_k") {
      filter = { dataset: r.dataset, density: r.density, gammaDb: r.gammaDb };
    } else if (kind === "vs_gamma") {
      filter = { dataset: r.dataset, density: r.density, k: r.k };
    } else {
      filter = { dataset: r.dataset, density: r.density };
    }
    seen.set(JSON.stringify(filter), filter);
  }
  return [...seen.keys()].sort().map((k) => seen.get(k)!);
}

/** Cross-check plotted means against the solver package's summary file at
 * six significant digits. Returns human-readable mismatch descriptions. */
export function verifyAgainstSummary(figure: Figure, kind: FigureKind, filter: PanelFilter, summary: SummaryRow[]): string[] {
  const problems: string[] = [];
  for (const stat of figure.stats) {
    let match: SummaryRow | undefined;
    if (kind === "vs_k") {
      match = summary.find(
        (s) =>
          s.dataset === filter.dataset &&
          s.density === filter.density &&
          s.gammaDb === filter.gammaDb &&
          s.scheme === stat.key[0] &&
          s.k === Number(stat.key[1]),
      );
    } else if (kind === "vs_gamma") {
      match = summary.find(
        (s) =>
          s.dataset === filter.dataset &&
          s.density === filter.density &&
          s.k === filter.k &&
          s.scheme === stat.key[0] &&
          s.gammaDb === stat.key[1],
      );
    } else {
      match = summary.find(
        (s) =>
          s.dataset === filter.dataset &&
          s.density === filter.density &&
          s.tCap === Number(stat.key[0]) &&
          s.k === Number(stat.key[1]),
      );
    }
    if (!match) {
      problems.push(`no summary row for ${JSON.stringify(stat.key)}`);
      continue;
    }
    if (kind === "throughput_vs_k") {
      // weights pass through the records file at 6 significant digits, so
      // the recomputed mean may differ from the full-precision summary by
      // the serialization half-units on each side, never more
      if (!meanMatchesSig6(stat.weightMean, match.weightMean, stat.maxAbsWeight)) {
        problems.push(
          `mean mismatch at ${JSON.stringify(stat.key)}: plotted ${stat.weightMean} vs summary ${match.weightMean}`,
        );
      }
    } else if (!matchesSig6(stat.activatedMean, match.activatedMean)) {
      // activated counts are integers in the records file: exact
      problems.push(
        `mean mismatch at ${JSON.stringify(stat.key)}: plotted ${stat.activatedMean} vs summary ${match.activatedMean}`,
      );
    }
  }
  return problems;
}
