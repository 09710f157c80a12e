/**
 * Tiny hand-built SVG helpers: linear scales, axes, polylines, markers.
 *
 * No rendering dependency keeps the figures deterministic byte-for-byte
 * given identical inputs, which the tests rely on.
 */

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0;
  const fn = ((value: number) =>
    span === 0 ? (r0 + r1) / 2 : r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.range = range;
  return fn;
}

export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (hi <= lo) return [lo];
  const rawStep = (hi - lo) / count;
  const mag = 10 ** Math.floor(Math.log10(rawStep));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rawStep) ?? rawStep;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

const fmt = (value: number): string => {
  const rounded = Number(value.toFixed(3));
  return Object.is(rounded, -0) ? "0" : String(rounded);
};

export function polyline(points: [number, number][], stroke: string, extra = ""): string {
  const attr = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return `<polyline fill="none" stroke="${stroke}" stroke-width="1.5" points="${attr}"${extra ? " " + extra : ""}/>`;
}

export function circles(points: [number, number][], fill: string, r = 2): string {
  return points
    .map(([x, y]) => `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${fill}" fill-opacity="0.6"/>`)
    .join("\n");
}

export function vline(x: number, y0: number, y1: number, stroke: string, dashed = false): string {
  const dash = dashed ? ' stroke-dasharray="2,3"' : "";
  return `<line x1="${fmt(x)}" y1="${fmt(y0)}" x2="${fmt(x)}" y2="${fmt(y1)}" stroke="${stroke}" stroke-width="1"${dash}/>`;
}

export function text(x: number, y: number, content: string, anchor = "middle", size = 10): string {
  return `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" font-family="sans-serif" text-anchor="${anchor}">${content}</text>`;
}

export interface PanelFrame {
  x0: number;
  y0: number;
  width: number;
  height: number;
  xLabel: string;
  yLabel: string;
  title: string;
}

/** Axis frame with tick labels; returns the SVG plus the two pixel scales. */
export function axes(
  frame: PanelFrame,
  xDomain: [number, number],
  yDomain: [number, number],
): { svg: string; x: Scale; y: Scale } {
  const { x0, y0, width, height } = frame;
  const x = linearScale(xDomain, [x0, x0 + width]);
  const y = linearScale(yDomain, [y0 + height, y0]);
  const parts = [
    `<rect x="${x0}" y="${y0}" width="${width}" height="${height}" fill="none" stroke="#333" stroke-width="1"/>`,
    text(x0 + width / 2, y0 - 6, frame.title, "middle", 11),
    text(x0 + width / 2, y0 + height + 28, frame.xLabel),
    `<g transform="rotate(-90 ${x0 - 34} ${y0 + height / 2})">` +
      text(x0 - 34, y0 + height / 2, frame.yLabel) +
      "</g>",
  ];
  for (const tick of niceTicks(xDomain[0], xDomain[1])) {
    const px = x(tick);
    parts.push(vline(px, y0 + height, y0 + height + 4, "#333"));
    parts.push(text(px, y0 + height + 15, fmt(tick), "middle", 9));
  }
  for (const tick of niceTicks(yDomain[0], yDomain[1])) {
    const py = y(tick);
    parts.push(
      `<line x1="${x0 - 4}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="#333" stroke-width="1"/>`,
    );
    parts.push(text(x0 - 7, py + 3, fmt(tick), "end", 9));
  }
  return { svg: parts.join("\n"), x, y };
}

export function document(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n` +
    body +
    "\n</svg>\n"
  );
}
