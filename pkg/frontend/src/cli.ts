#!/usr/bin/env node
/** escapelab-figures <fig1|fig2|fig3|outcomes|partitions> --in a.csv [b.csv] --out fig.svg */

import { readFileSync, writeFileSync } from "node:fs";
import { parseCsv, SchemaError } from "./csv.js";
import {
  renderFig1,
  renderFig2,
  renderFig3,
  renderOutcomes,
  renderPartitions,
} from "./figures.js";

interface Args {
  figure: string;
  inputs: string[];
  out: string;
}

function parseArgs(argv: string[]): Args {
  const [figure, ...rest] = argv;
  if (!figure) throw new SchemaError("usage: escapelab-figures <figure-id> --in <csv...> --out <path>");
  const inputs: string[] = [];
  let out = "";
  for (let i = 0; i < rest.length; i++) {
    if (rest[i] === "--in") {
      while (i + 1 < rest.length && !rest[i + 1].startsWith("--")) inputs.push(rest[++i]);
    } else if (rest[i] === "--out") {
      out = rest[++i] ?? "";
    } else {
      throw new SchemaError(`unknown argument ${rest[i]}`);
    }
  }
  if (inputs.length === 0 || !out) {
    throw new SchemaError("both --in <csv...> and --out <path> are required");
  }
  return { figure, inputs, out };
}

function load(path: string) {
  return parseCsv(readFileSync(path, "utf-8"));
}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
    let svg: string;
    switch (args.figure) {
      case "fig1":
        svg = renderFig1(load(args.inputs[0]));
        break;
      case "fig2":
        if (args.inputs.length < 2) {
          throw new SchemaError("fig2 needs --in <trajectory.csv> <stage_times.csv>");
        }
        svg = renderFig2(load(args.inputs[0]), load(args.inputs[1]));
        break;
      case "fig3":
        svg = renderFig3(load(args.inputs[0]));
        break;
      case "outcomes":
        svg = renderOutcomes(load(args.inputs[0]),
                             args.inputs[1] ? load(args.inputs[1]) : undefined);
        break;
      case "partitions":
        svg = renderPartitions(load(args.inputs[0]));
        break;
      default:
        throw new SchemaError(`unknown figure id '${args.figure}'`);
    }
    writeFileSync(args.out, svg, "utf-8");
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

const isMain = process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (isMain) {
  process.exit(run(process.argv.slice(2)));
}
