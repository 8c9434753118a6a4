/**
 * Reader for the linkact experiment CSV schema:
 *
 *   dataset,density,k,seed,scheme,gamma_db,t_cap,activated,weight,solve_ms,status
 *
 * gamma_db stays a string ("mixed" for the individual-threshold study).
 */

import * as fs from "node:fs";

export interface ResultRecord {
  dataset: string;
  density: string;
  k: number;
  seed: number;
  scheme: string;
  gammaDb: string;
  tCap: number;
  activated: number;
  weight: number;
  solveMs: number;
  status: string;
}

export const RECORDS_HEADER =
  "dataset,density,k,seed,scheme,gamma_db,t_cap,activated,weight,solve_ms,status";

function parseIntStrict(raw: string, field: string, line: number): number {
  const v = Number(raw);
  if (!Number.isInteger(v)) {
    throw new Error(`line ${line}: ${field} must be an integer, got '${raw}'`);
  }
  return v;
}

function parseFloatStrict(raw: string, field: string, line: number): number {
  const v = Number(raw);
  if (!Number.isFinite(v)) {
    throw new Error(`line ${line}: ${field} must be a number, got '${raw}'`);
  }
  return v;
}

export function parseRecordsCsv(text: string): ResultRecord[] {
  const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV");
  }
  if (lines[0] !== RECORDS_HEADER) {
    throw new Error(`unexpected header: '${lines[0]}'`);
  }
  const records: ResultRecord[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cols = lines[i].split(",");
    if (cols.length !== 11) {
      throw new Error(`line ${i + 1}: expected 11 columns, got ${cols.length}`);
    }
    records.push({
      dataset: cols[0],
      density: cols[1],
      k: parseIntStrict(cols[2], "k", i + 1),
      seed: parseIntStrict(cols[3], "seed", i + 1),
      scheme: cols[4],
      gammaDb: cols[5],
      tCap: parseIntStrict(cols[6], "t_cap", i + 1),
      activated: parseIntStrict(cols[7], "activated", i + 1),
      weight: parseFloatStrict(cols[8], "weight", i + 1),
      solveMs: parseFloatStrict(cols[9], "solve_ms", i + 1),
      status: cols[10],
    });
  }
  return records;
}

export function readRecordsCsv(path: string): ResultRecord[] {
  return parseRecordsCsv(fs.readFileSync(path, "utf-8"));
}

/** Row of the `--summary-out` companion file. */
export interface SummaryRow {
  dataset: string;
  density: string;
  scheme: string;
  gammaDb: string;
  tCap: number;
  k: number;
  n: number;
  activatedMean: number;
  activatedSd: number;
  weightMean: number;
  weightSd: number;
}

export const SUMMARY_HEADER =
  "dataset,density,scheme,gamma_db,t_cap,k,n,activated_mean,activated_sd,weight_mean,weight_sd";

export function parseSummaryCsv(text: string): SummaryRow[] {
  const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0);
  if (lines.length === 0 || lines[0] !== SUMMARY_HEADER) {
    throw new Error(`unexpected summary header: '${lines[0] ?? ""}'`);
  }
  const rows: SummaryRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const c = lines[i].split(",");
    if (c.length !== 11) {
      throw new Error(`line ${i + 1}: expected 11 columns, got ${c.length}`);
    }
    rows.push({
      dataset: c[0],
      density: c[1],
      scheme: c[2],
      gammaDb: c[3],
      tCap: parseIntStrict(c[4], "t_cap", i + 1),
      k: parseIntStrict(c[5], "k", i + 1),
      n: parseIntStrict(c[6], "n", i + 1),
      activatedMean: parseFloatStrict(c[7], "activated_mean", i + 1),
      activatedSd: parseFloatStrict(c[8], "activated_sd", i + 1),
      weightMean: parseFloatStrict(c[9], "weight_mean", i + 1),
      weightSd: parseFloatStrict(c[10], "weight_sd", i + 1),
    });
  }
  return rows;
}

export function readSummaryCsv(path: string): SummaryRow[] {
  return parseSummaryCsv(fs.readFileSync(path, "utf-8"));
}
