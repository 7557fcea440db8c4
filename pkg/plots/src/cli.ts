#!/usr/bin/env node
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { FIGURE_KINDS, type FigureKind } from "./figure.js";
import { renderFigure } from "./render.js";

export async function main(argv: string[]): Promise<number> {
  let rc = 0;
  const parser = yargs(argv)
    .scriptName("relaysec-plot")
    .command(
      "plot",
      "render one figure from a results CSV",
      (y) =>
        y
          .option("in", {
            type: "string",
            demandOption: true,
            describe: "results CSV (or trace CSV for --kind convergence)",
          })
          .option("kind", {
            type: "string",
            demandOption: true,
            choices: FIGURE_KINDS as unknown as string[],
            describe: "figure kind",
          })
          .option("out", {
            type: "string",
            demandOption: true,
            describe: "output PNG path",
          })
          .option("schemes", {
            type: "string",
            describe: "comma-separated scheme subset (default: all present)",
          }),
      (args) => {
        if (rc !== 0) return; // .fail() already reported a usage error
        const schemes = args.schemes
          ? args.schemes.split(",").map((s) => s.trim()).filter((s) => s)
          : undefined;
        try {
          const done = renderFigure({
            input: args.in,
            kind: args.kind as FigureKind,
            out: args.out,
            schemes,
          });
          const note = done.dropped > 0
            ? ` (${done.dropped} failed/NaN rows dropped)` : "";
          process.stderr.write(`wrote ${done.out}${note}\n`);
        } catch (err) {
          process.stderr.write(`error: ${(err as Error).message}\n`);
          rc = 1;
        }
      })
    .demandCommand(1, "specify a command (plot)")
    .strict()
    .fail((msg, err) => {
      process.stderr.write(`error: ${msg ?? err?.message}\n`);
      rc = 2;
      // yargs would exit for us; keep control so tests can call main().
    })
    .exitProcess(false)
    .help();

  try {
    await parser.parseAsync();
  } catch (err) {
    // .fail() already reported; surface anything it missed
    if (rc === 0) {
      process.stderr.write(`error: ${(err as Error).message}\n`);
      rc = 2;
    }
  }
  return rc;
}

const invoked = process.argv[1];
if (invoked && (invoked.endsWith("cli.js") || invoked.endsWith("relaysec-plot"))) {
  main(hideBin(process.argv)).then((rc) => {
    process.exitCode = rc;
  });
}
