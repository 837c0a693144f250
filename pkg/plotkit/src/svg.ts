/**
 * Minimal deterministic SVG assembly: fixed canvas, linear scales, no
 * timestamps or generator metadata, so identical inputs give identical
 * bytes.
 */

export const WIDTH = 640;
export const HEIGHT = 480;
export const MARGIN = { top: 40, right: 24, bottom: 48, left: 64 };

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = [d0, d1];
  return f;
}

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  const s = v.toFixed(3);
  return s === "-0.000" ? "0.000" : s;
}

export function ticks(lo: number, hi: number, n = 6): number[] {
  const span = hi - lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / (n * step);
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const inc = mult * step;
  const start = Math.ceil(lo / inc) * inc;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12; v += inc) out.push(Math.round(v / inc) * inc);
  return out;
}

export function el(
  tag: string,
  attrs: Record<string, string | number>,
  body = ""
): string {
  const a = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : v}"`)
    .join(" ");
  return body === "" ? `<${tag} ${a}/>` : `<${tag} ${a}>${body}</${tag}>`;
}

export function axes(x: Scale, y: Scale, xLabel: string, yLabel: string): string {
  const parts: string[] = [];
  const xr0 = MARGIN.left;
  const xr1 = WIDTH - MARGIN.right;
  const yr0 = HEIGHT - MARGIN.bottom;
  const yr1 = MARGIN.top;
  parts.push(el("line", { class: "axis", x1: xr0, y1: yr0, x2: xr1, y2: yr0, stroke: "#333" }));
  parts.push(el("line", { class: "axis", x1: xr0, y1: yr0, x2: xr0, y2: yr1, stroke: "#333" }));
  for (const t of ticks(x.domain[0], x.domain[1])) {
    const px = x(t);
    parts.push(el("line", { x1: px, y1: yr0, x2: px, y2: yr0 + 5, stroke: "#333" }));
    parts.push(
      el(
        "text",
        { x: px, y: yr0 + 20, "text-anchor": "middle", "font-size": 11, fill: "#333" },
        fmt(t)
      )
    );
  }
  for (const t of ticks(y.domain[0], y.domain[1])) {
    const py = y(t);
    parts.push(el("line", { x1: xr0 - 5, y1: py, x2: xr0, y2: py, stroke: "#333" }));
    parts.push(
      el(
        "text",
        { x: xr0 - 8, y: py + 4, "text-anchor": "end", "font-size": 11, fill: "#333" },
        fmt(t)
      )
    );
  }
  parts.push(
    el(
      "text",
      {
        x: (xr0 + xr1) / 2,
        y: HEIGHT - 10,
        "text-anchor": "middle",
        "font-size": 13,
        fill: "#111",
      },
      xLabel
    )
  );
  parts.push(
    el(
      "text",
      {
        x: 16,
        y: (yr0 + yr1) / 2,
        "text-anchor": "middle",
        "font-size": 13,
        fill: "#111",
        transform: `rotate(-90 16 ${fmt((yr0 + yr1) / 2)})`,
      },
      yLabel
    )
  );
  return parts.join("\n");
}

export function annotationBlock(lines: string[]): string {
  return lines
    .map((line, i) =>
      el(
        "text",
        {
          class: "annotation",
          x: WIDTH - MARGIN.right - 8,
          y: MARGIN.top + 16 + 16 * i,
          "text-anchor": "end",
          "font-size": 12,
          fill: "#111",
        },
        line
      )
    )
    .join("\n");
}

export function document(title: string, body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    el("rect", { x: 0, y: 0, width: WIDTH, height: HEIGHT, fill: "#ffffff" }),
    el(
      "text",
      {
        x: WIDTH / 2,
        y: 24,
        "text-anchor": "middle",
        "font-size": 15,
        "font-weight": "bold",
        fill: "#111",
      },
      title
    ),
    body,
    "</svg>",
    "",
  ].join("\n");
}
