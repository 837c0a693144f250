import { promises as fs } from "fs";
import path from "path";

import { readHist, readQQ } from "./csv";
import { renderHistogram } from "./hist";
import { renderQQ } from "./qq";
import { FigureSpec } from "./spec";

/** Render the figure described by the spec and write it atomically. */
export async function renderFigure(spec: FigureSpec): Promise<string> {
  const text = await fs.readFile(spec.input, "utf8");
  const svg =
    spec.kind === "qq"
      ? renderQQ(readQQ(text), spec)
      : renderHistogram(readHist(text), spec);
  const out = path.resolve(spec.output);
  const tmp = `${out}.tmp-${process.pid}`;
  await fs.mkdir(path.dirname(out), { recursive: true });
  await fs.writeFile(tmp, svg, "utf8");
  await fs.rename(tmp, out);
  return out;
}
