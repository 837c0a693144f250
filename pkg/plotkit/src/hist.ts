import { HistRow } from "./csv";
import { FigureSpec } from "./spec";
import {
  HEIGHT,
  MARGIN,
  WIDTH,
  annotationBlock,
  axes,
  document,
  el,
  fmt,
  linearScale,
} from "./svg";

/**
 * Density-normalized bars (count / (total * width)) so the precomputed
 * overlay density curve shares the y scale with the bars.
 */
export function renderHistogram(rows: HistRow[], spec: FigureSpec): string {
  const total = rows.reduce((acc, r) => acc + r.count, 0);
  const densities = rows.map((r) =>
    total > 0 ? r.count / (total * (r.bin_hi - r.bin_lo)) : 0
  );
  const xLo = Math.min(...rows.map((r) => r.bin_lo));
  const xHi = Math.max(...rows.map((r) => r.bin_hi));
  const yHi = Math.max(...densities, ...rows.map((r) => r.overlay), 1e-9);
  const x = linearScale(xLo, xHi, MARGIN.left, WIDTH - MARGIN.right);
  const y = linearScale(0, yHi * 1.08, HEIGHT - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  parts.push(axes(x, y, "normalized score", "density"));
  rows.forEach((r, i) => {
    const h = y(0) - y(densities[i]);
    if (h <= 0) return;
    parts.push(
      el("rect", {
        class: "bar",
        x: x(r.bin_lo),
        y: y(densities[i]),
        width: x(r.bin_hi) - x(r.bin_lo),
        height: h,
        fill: "#7fc97f",
        stroke: "#333",
        "stroke-width": 0.5,
      })
    );
  });
  const curve = rows
    .map((r, i) => `${fmt(x((r.bin_lo + r.bin_hi) / 2))},${fmt(y(r.overlay))}`)
    .join(" ");
  parts.push(
    el("polyline", {
      class: "overlay",
      points: curve,
      fill: "none",
      stroke: "#cc2222",
      "stroke-width": 1.5,
    })
  );
  const notes: string[] = [`n = ${total}`];
  if (spec.annotations?.mu !== undefined) notes.push(`mu = ${fmt(spec.annotations.mu)}`);
  if (spec.annotations?.sigma !== undefined)
    notes.push(`sigma = ${fmt(spec.annotations.sigma)}`);
  parts.push(annotationBlock(notes));
  const title = spec.group ? `Score histogram (${spec.group})` : "Score histogram";
  return document(title, parts.join("\n"));
}
