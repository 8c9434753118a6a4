/** Grouped means with the same semantics (and 6-significant-digit rendering)
 * as the solver package's summarize step, so plotted values can be checked
 * against its summary files exactly. */

import { ResultRecord } from "./csv.js";

export interface GroupStat {
  key: string[];
  n: number;
  activatedMean: number;
  weightMean: number;
  /** largest |weight| in the group; bounds the rounding the 6-digit CSV
   * serialization can have introduced into the recomputed mean */
  maxAbsWeight: number;
}

export function groupMeans(
  records: ResultRecord[],
  keyOf: (r: ResultRecord) => (string | number)[],
): GroupStat[] {
  const groups = new Map<string, { key: string[]; act: number[]; wt: number[] }>();
  for (const r of records) {
    const key = keyOf(r).map(String);
    const tag = JSON.stringify(key);
    let g = groups.get(tag);
    if (!g) {
      g = { key, act: [], wt: [] };
      groups.set(tag, g);
    }
    g.act.push(r.activated);
    g.wt.push(r.weight);
  }
  const out: GroupStat[] = [];
  for (const g of groups.values()) {
    out.push({
      key: g.key,
      n: g.act.length,
      activatedMean: mean(g.act),
      weightMean: mean(g.wt),
      maxAbsWeight: Math.max(...g.wt.map(Math.abs), 0),
    });
  }
  out.sort((a, b) => JSON.stringify(a.key).localeCompare(JSON.stringify(b.key)));
  return out;
}

export function mean(values: number[]): number {
  let total = 0;
  for (const v of values) total += v;
  return total / values.length;
}

/** Mirror of Python's `format(x, ".6g")`, used to compare against summary
 * files at exactly six significant digits. */
export function sig6(x: number): string {
  if (x === 0) return "0";
  if (!Number.isFinite(x)) return String(x);
  const exp = Math.floor(Math.log10(Math.abs(x)));
  let text: string;
  if (exp < -5 || exp >= 6) {
    // exponential form, python style: 1.23457e+08 / 1e-07
    text = x.toExponential(5);
    let [mant, e] = text.split("e");
    mant = trimZeros(mant);
    const sign = e.startsWith("-") ? "-" : "+";
    const digits = e.replace(/^[+-]/, "").padStart(2, "0");
    return `${mant}e${sign}${digits}`;
  }
  text = x.toPrecision(6);
  if (text.includes("e")) {
    // toPrecision may still pick exponential near the boundaries
    text = Number(text).toFixed(Math.max(0, 5 - exp));
  }
  return trimZeros(text);
}

function trimZeros(text: string): string {
  if (!text.includes(".")) return text;
  return text.replace(/0+$/, "").replace(/\.$/, "");
}

/** One unit in the 6th significant digit of x. */
export function ulp6(x: number): number {
  if (x === 0) return 1e-5;
  return Math.pow(10, Math.floor(Math.log10(Math.abs(x))) - 5);
}

/** True when a computed value matches a reference to 6 significant digits. */
export function matchesSig6(computed: number, reference: number): boolean {
  return sig6(computed) === sig6(reference);
}

/** Six-significant-digit agreement for a mean recomputed from 6-digit
 * serialized members: allows exactly the half-unit each side's rounding can
 * introduce (members bounded by the largest one, plus the reference's own
 * serialization). */
export function meanMatchesSig6(
  computed: number,
  reference: number,
  maxAbsMember: number,
): boolean {
  if (matchesSig6(computed, reference)) return true;
  const tol = 0.5 * ulp6(maxAbsMember) + 0.5 * ulp6(reference) + 1e-12 * Math.abs(reference);
  return Math.abs(computed - reference) <= tol;
}
