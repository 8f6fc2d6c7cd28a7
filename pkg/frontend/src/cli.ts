#!/usr/bin/env node
/**
 * quantdoa-figures render --kind {fig2|fig3|fig4} --in <csv> --out <svg>
 *
 * Exit codes: 0 ok, 1 usage/argument error, 2 bad or empty data, 3 I/O.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { resolve } from "node:path";
import { pathToFileURL } from "node:url";

import { CsvFormatError, parseSweepCsv } from "./csv.js";
import { buildFigure, FIGURE_KINDS, FigureKind } from "./figures.js";
import { ChartDataError, renderChart } from "./svg.js";

interface Args {
  kind: FigureKind;
  input: string;
  output: string;
}

class UsageError extends Error {}

function parseArgs(argv: string[]): Args {
  if (argv[0] !== "render") {
    throw new UsageError("expected subcommand: render --kind <fig2|fig3|fig4> --in <csv> --out <svg>");
  }
  let kind: string | undefined;
  let input: string | undefined;
  let output: string | undefined;
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) throw new UsageError(`missing value for ${flag}`);
    if (flag === "--kind") kind = value;
    else if (flag === "--in") input = value;
    else if (flag === "--out") output = value;
    else throw new UsageError(`unknown flag ${flag}`);
  }
  if (!kind || !input || !output) {
    throw new UsageError("render needs --kind, --in and --out");
  }
  if (!(FIGURE_KINDS as string[]).includes(kind)) {
    throw new UsageError(`unknown figure kind ${kind}; choose from ${FIGURE_KINDS.join(", ")}`);
  }
  return { kind: kind as FigureKind, input, output };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 1;
  }

  let text: string;
  try {
    text = readFileSync(args.input, "utf-8");
  } catch (err) {
    console.error(`i/o error reading ${args.input}: ${(err as Error).message}`);
    return 3;
  }

  let svg: string;
  try {
    svg = renderChart(buildFigure(args.kind, parseSweepCsv(text)));
  } catch (err) {
    if (err instanceof CsvFormatError || err instanceof ChartDataError) {
      console.error(`data error: ${err.message}`);
      return 2;
    }
    throw err;
  }

  try {
    writeFileSync(args.output, svg, "utf-8");
  } catch (err) {
    console.error(`i/o error writing ${args.output}: ${(err as Error).message}`);
    return 3;
  }
  console.log(`wrote ${args.output}`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === pathToFileURL(resolve(process.argv[1])).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
