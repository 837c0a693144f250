import { QQRow } from "./csv";
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
 * Scatter of observed vs theoretical quantiles with the identity
 * reference line drawn across the shared data range: points from a
 * perfect fit land exactly on it.
 */
export function renderQQ(rows: QQRow[], spec: FigureSpec): string {
  const xs = rows.map((r) => r.theoretical);
  const ys = rows.map((r) => r.observed);
  const lo = Math.min(...xs, ...ys);
  const hi = Math.max(...xs, ...ys);
  const pad = (hi - lo || 1) * 0.05;
  const x = linearScale(lo - pad, hi + pad, MARGIN.left, WIDTH - MARGIN.right);
  const y = linearScale(lo - pad, hi + pad, HEIGHT - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  parts.push(axes(x, y, "theoretical quantile", "observed quantile"));
  parts.push(
    el("line", {
      class: "refline",
      x1: x(lo),
      y1: y(lo),
      x2: x(hi),
      y2: y(hi),
      stroke: "#cc2222",
      "stroke-width": 1.5,
    })
  );
  for (const r of rows) {
    parts.push(
      el("circle", {
        class: "pt",
        cx: x(r.theoretical),
        cy: y(r.observed),
        r: 2.5,
        fill: "#2266cc",
        "fill-opacity": 0.7,
      })
    );
  }
  const notes: string[] = [`n = ${rows.length}`];
  if (spec.annotations?.r2 !== undefined) notes.push(`R^2 = ${fmt(spec.annotations.r2)}`);
  parts.push(annotationBlock(notes));
  const title = spec.group ? `Q-Q plot (${spec.group})` : "Q-Q plot";
  return document(title, parts.join("\n"));
}
