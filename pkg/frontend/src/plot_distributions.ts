/**
 * Render makespan / position / d_min-d_origin panels from a report
 * directory, optionally overlaying a baseline report:
 *
 *     node dist/plot_distributions.js report/ --compare baseline_report/ \
 *         --out distributions.svg
 */

import * as fs from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { SchemaError } from "./csv.js";
import { loadReport, renderDistributionsFigure } from "./distributions.js";

async function main(): Promise<void> {
  const argv = await yargs(hideBin(process.argv))
    .usage("$0 <report>", "plot distribution panels from a report directory", (cmd) =>
      cmd.positional("report", { type: "string", demandOption: true }),
    )
    .option("compare", { type: "string", describe: "baseline report directory to overlay" })
    .option("out", { type: "string", default: "distributions.svg", describe: "output SVG path" })
    .strict()
    .parse();

  try {
    const primary = loadReport(argv.report as string);
    const baseline = argv.compare ? loadReport(argv.compare) : null;
    fs.writeFileSync(argv.out, renderDistributionsFigure(primary, baseline));
    console.log(`wrote ${argv.out}`);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(err.message);
      process.exit(2);
    }
    throw err;
  }
}

main();
