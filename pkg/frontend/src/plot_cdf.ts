/**
 * Render a latency CDF figure from one or more cdf_*.csv files.
 *
 *     node dist/plot_cdf.js cdf_ideal_60.csv cdf_adhoc-multicast-r1_60.csv \
 *         --out cdf.svg
 */

import * as fs from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { loadCdf, renderCdfFigure } from "./cdf.js";
import { SchemaError } from "./csv.js";

async function main(): Promise<void> {
  const argv = await yargs(hideBin(process.argv))
    .usage("$0 <files...>", "plot one-way delay CDFs", (cmd) =>
      cmd.positional("files", { type: "string", array: true, demandOption: true }),
    )
    .option("out", { type: "string", default: "cdf.svg", describe: "output SVG path" })
    .strict()
    .parse();

  try {
    const curves = (argv.files as string[]).map(loadCdf);
    fs.writeFileSync(argv.out, renderCdfFigure(curves));
    console.log(`wrote ${argv.out} (${curves.length} curves)`);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(err.message);
      process.exit(2);
    }
    throw err;
  }
}

main();
