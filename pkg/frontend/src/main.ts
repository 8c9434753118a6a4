/** CLI: render experiment CSV into SVG figures.
 *
 *   linkact-plots --input records.csv --kind vs_k --out-dir figs \
 *       [--dataset N --density sparse --gamma-db -6 | --k 30] \
 *       [--check-summary summary.csv]
 *
 * Without an explicit panel filter, every panel found in the CSV is
 * rendered. --check-summary verifies each plotted mean against the solver
 * package's grouped summary at six significant digits and fails on drift.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { readRecordsCsv, readSummaryCsv } from "./csv.js";
import { buildFigure, FigureKind, PanelFilter, panelsFor, verifyAgainstSummary } from "./figures.js";

interface Args {
  input: string;
  kind: FigureKind;
  outDir: string;
  dataset?: string;
  density?: string;
  gammaDb?: string;
  k?: number;
  checkSummary?: string;
}

function usage(message?: string): never {
  if (message) console.error(`error: ${message}`);
  console.error(
    "usage: linkact-plots --input records.csv --kind vs_k|vs_gamma|throughput_vs_k " +
      "--out-dir DIR [--dataset D --density sparse|dense] [--gamma-db G] [--k N] " +
      "[--check-summary summary.csv]",
  );
  process.exit(2);
}

function parseArgs(argv: string[]): Args {
  const out: Partial<Args> = {};
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const need = (): string => {
      const v = argv[++i];
      if (v === undefined) usage(`${flag} needs a value`);
      return v;
    };
    switch (flag) {
      case "--input":
        out.input = need();
        break;
      case "--kind": {
        const v = need();
        if (v !== "vs_k" && v !== "vs_gamma" && v !== "throughput_vs_k") {
          usage(`unknown figure kind '${v}'`);
        }
        out.kind = v;
        break;
      }
      case "--out-dir":
        out.outDir = need();
        break;
      case "--dataset":
        out.dataset = need();
        break;
      case "--density":
        out.density = need();
        break;
      case "--gamma-db":
        out.gammaDb = need();
        break;
      case "--k":
        out.k = Number(need());
        break;
      case "--check-summary":
        out.checkSummary = need();
        break;
      default:
        usage(`unknown flag '${flag}'`);
    }
  }
  if (!out.input || !out.kind || !out.outDir) {
    usage("--input, --kind and --out-dir are required");
  }
  return out as Args;
}

export function main(argv: string[]): number {
  const args = parseArgs(argv);
  const records = readRecordsCsv(args.input);
  let panels: PanelFilter[];
  if (args.dataset || args.density || args.gammaDb !== undefined || args.k !== undefined) {
    if (!args.dataset || !args.density) {
      usage("an explicit panel filter needs both --dataset and --density");
    }
    panels = [{ dataset: args.dataset, density: args.density, gammaDb: args.gammaDb, k: args.k }];
  } else {
    panels = panelsFor(records, args.kind);
  }
  const summary = args.checkSummary ? readSummaryCsv(args.checkSummary) : undefined;
  fs.mkdirSync(args.outDir, { recursive: true });
  let failures = 0;
  for (const filter of panels) {
    const figure = buildFigure(records, args.kind, filter);
    if (summary) {
      const problems = verifyAgainstSummary(figure, args.kind, filter, summary);
      if (problems.length > 0) {
        failures += problems.length;
        for (const p of problems) console.error(`summary check: ${p}`);
      }
    }
    const target = path.join(args.outDir, figure.name);
    fs.writeFileSync(target, figure.svg);
    console.log(`wrote ${target}`);
  }
  if (failures > 0) {
    console.error(`${failures} plotted means disagree with the summary file`);
    return 1;
  }
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${path.resolve(process.argv[1])}`).href;
if (invokedDirectly) {
  try {
    process.exit(main(process.argv.slice(2)));
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    process.exit(1);
  }
}
