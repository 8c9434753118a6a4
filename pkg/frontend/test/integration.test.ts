/** End-to-end against the solver package: run its experiment CLI, plot the
 * CSV, and confirm every plotted mean matches its summary output to six
 * significant digits. */

import assert from "node:assert/strict";
import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { test } from "node:test";
import { fileURLToPath } from "node:url";

import { readRecordsCsv, readSummaryCsv } from "../src/csv.js";
import { buildFigure, FigureKind, panelsFor, verifyAgainstSummary } from "../src/figures.js";
import { main } from "../src/main.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const SOLVER_ROOT = path.resolve(HERE, "..", "..", "..");

function runExperiment(tmp: string, args: string[]): { records: string; summary: string } {
  const records = path.join(tmp, "records.csv");
  const summary = path.join(tmp, "summary.csv");
  execFileSync(
    "python3",
    ["-m", "linkact", "experiment", ...args, "-o", records, "--summary-out", summary],
    {
      cwd: SOLVER_ROOT,
      env: { ...process.env, PYTHONPATH: path.join(SOLVER_ROOT, "src") },
      stdio: ["ignore", "pipe", "pipe"],
    },
  );
  return { records, summary };
}

function tmpdir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "linkact-plots-"));
}

test("study-1 plots agree with the solver summary to 6 significant digits", () => {
  const tmp = tmpdir();
  const { records, summary } = runExperiment(tmp, [
    "--study", "1",
    "--datasets", "N-sparse,I-dense",
    "--k-values", "4,6,8",
    "--seeds", "4",
    "--gammas-db=-6,0",
  ]);
  const recs = readRecordsCsv(records);
  const sum = readSummaryCsv(summary);
  for (const kind of ["vs_k", "vs_gamma"] as FigureKind[]) {
    const panels = panelsFor(recs, kind);
    assert.ok(panels.length >= 2);
    for (const filter of panels) {
      const fig = buildFigure(recs, kind, filter);
      const problems = verifyAgainstSummary(fig, kind, filter, sum);
      assert.deepEqual(problems, []);
      assert.match(fig.svg, /<svg /);
    }
  }
});

test("study-2 throughput plot agrees with the solver summary", () => {
  const tmp = tmpdir();
  const { records, summary } = runExperiment(tmp, [
    "--study", "2",
    "--datasets", "I-dense",
    "--k-values", "4,6",
    "--seeds", "3",
    "--t-values", "0,1,3",
  ]);
  const recs = readRecordsCsv(records);
  const sum = readSummaryCsv(summary);
  const panels = panelsFor(recs, "throughput_vs_k");
  assert.equal(panels.length, 1);
  const fig = buildFigure(recs, "throughput_vs_k", panels[0]);
  assert.deepEqual(verifyAgainstSummary(fig, "throughput_vs_k", panels[0], sum), []);
});

test("cli renders every panel and enforces the summary check", () => {
  const tmp = tmpdir();
  const { records, summary } = runExperiment(tmp, [
    "--study", "1",
    "--datasets", "N-sparse",
    "--k-values", "4,6",
    "--seeds", "3",
    "--gammas-db=-6",
  ]);
  const outDir = path.join(tmp, "figs");
  const code = main([
    "--input", records,
    "--kind", "vs_k",
    "--out-dir", outDir,
    "--check-summary", summary,
  ]);
  assert.equal(code, 0);
  const files = fs.readdirSync(outDir).sort();
  assert.deepEqual(files, ["fig_vs_k_N_sparse_g-6.svg"]);
  const svg = fs.readFileSync(path.join(outDir, files[0]), "utf-8");
  assert.ok(svg.startsWith("<svg"));
});

test("acceptance CSVs from the solver package plot cleanly when present", () => {
  const resultsDir = path.join(SOLVER_ROOT, "results");
  const cases: Array<[string, FigureKind]> = [
    ["accept_ranged_30.csv", "vs_k"],
    ["accept_small_net.csv", "vs_gamma"],
    ["accept_throughput.csv", "throughput_vs_k"],
  ];
  let found = 0;
  for (const [name, kind] of cases) {
    const recordsPath = path.join(resultsDir, name);
    const summaryPath = path.join(resultsDir, name.replace(".csv", "_summary.csv"));
    if (!fs.existsSync(recordsPath) || !fs.existsSync(summaryPath)) continue;
    found += 1;
    const recs = readRecordsCsv(recordsPath);
    const sum = readSummaryCsv(summaryPath);
    for (const filter of panelsFor(recs, kind)) {
      const fig = buildFigure(recs, kind, filter);
      assert.deepEqual(verifyAgainstSummary(fig, kind, filter, sum), []);
    }
  }
  if (found === 0) {
    test.skip?.("no acceptance CSVs present; run the solver acceptance suite first");
  }
});
