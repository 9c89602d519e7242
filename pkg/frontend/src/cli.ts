#!/usr/bin/env node
import { writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { SchemaError, readSweepCsv } from "./csv.js";
import { render } from "./figures.js";

export function main(argv: string[]): number {
  const args = yargs(argv)
    .usage("figures --fig N --in data.csv [--in more.csv] --out fig.svg")
    .option("fig", { type: "number", demandOption: true, describe: "figure id (1-4)" })
    .option("in", { type: "string", array: true, demandOption: true, describe: "sweep CSV path(s)" })
    .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
    .option("linear-x", { type: "boolean", default: false, describe: "force a linear x axis" })
    .option("linear-y", { type: "boolean", default: false, describe: "force a linear y axis" })
    .strict()
    .exitProcess(false)
    .parseSync();

  try {
    const inputs = args.in.map(readSweepCsv);
    const svg = render({
      fig: args.fig,
      inputs,
      logX: args.linearX ? false : undefined,
      logY: args.linearY ? false : undefined,
    });
    writeFileSync(args.out, svg, "utf-8");
    console.log(args.out);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    if (err instanceof Error && "code" in err && err.code === "ENOENT") {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(hideBin(process.argv)));
}
