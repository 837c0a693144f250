#!/usr/bin/env node
import { promises as fs } from "fs";

import { SchemaError } from "./csv";
import { renderFigure } from "./render";
import { parseFigureSpec } from "./spec";

/**
 * plotkit <spec.json>
 *
 * Exit codes: 0 on success, 2 for usage problems, 3 for spec or CSV
 * schema violations (message names the offending column or field).
 */
export async function runCli(argv: string[]): Promise<number> {
  if (argv.length !== 1) {
    process.stderr.write("usage: plotkit <spec.json>\n");
    return 2;
  }
  let specText: string;
  try {
    specText = await fs.readFile(argv[0], "utf8");
  } catch (e) {
    process.stderr.write(`cannot read spec: ${(e as Error).message}\n`);
    return 2;
  }
  try {
    const spec = parseFigureSpec(specText);
    const out = await renderFigure(spec);
    process.stdout.write(`${out}\n`);
    return 0;
  } catch (e) {
    if (e instanceof SchemaError || (e as Error).message.startsWith("invalid figure spec")) {
      process.stderr.write(`${(e as Error).message}\n`);
      return 3;
    }
    process.stderr.write(`${(e as Error).message}\n`);
    return 1;
  }
}

if (require.main === module) {
  runCli(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
