/**
 * One-way delay CDF figure from `cdf_<preset>_<rate>.csv` files.
 *
 * Each file contributes one step curve; a dotted vertical reference line
 * marks the 50 ms acceptable-latency limit.
 */

import * as path from "node:path";
import { readVersionedCsv } from "./csv.js";
import { axes, document, polyline, text, vline } from "./svg.js";

export const REFERENCE_MS = 50;

export const PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

export interface CdfCurve {
  label: string;
  /** (delay_ms, cumulative fraction) pairs, non-decreasing in both axes. */
  points: [number, number][];
}

export function loadCdf(file: string): CdfCurve {
  const table = readVersionedCsv(file, ["delay_ms", "fraction"]);
  const points = table.rows.map(
    (row) => [row.delay_ms, row.fraction] as [number, number],
  );
  const label = path.basename(file).replace(/^cdf_/, "").replace(/\.csv$/, "");
  return { label, points };
}

/** Steps for plotting: hold the previous fraction until each new delay. */
export function stepPoints(curve: CdfCurve): [number, number][] {
  const out: [number, number][] = [[0, 0]];
  let prev = 0;
  for (const [delay, fraction] of curve.points) {
    out.push([delay, prev]);
    out.push([delay, fraction]);
    prev = fraction;
  }
  return out;
}

export function renderCdfFigure(curves: CdfCurve[]): string {
  if (curves.length === 0) {
    throw new Error("no CDF curves to plot");
  }
  const frame = {
    x0: 55,
    y0: 30,
    width: 440,
    height: 260,
    xLabel: "one-way delay (ms)",
    yLabel: "fraction of messages",
    title: "message delay CDF",
  };
  const maxDelay = Math.max(
    REFERENCE_MS * 1.2,
    ...curves.flatMap((c) => c.points.map(([d]) => d)),
  );
  const { svg, x, y } = axes(frame, [0, maxDelay], [0, 1]);
  const parts = [svg];
  parts.push(vline(x(REFERENCE_MS), frame.y0, frame.y0 + frame.height, "#555", true));
  parts.push(text(x(REFERENCE_MS) + 3, frame.y0 + 12, "50 ms", "start", 9));
  curves.forEach((curve, k) => {
    const color = PALETTE[k % PALETTE.length];
    const pixels = stepPoints(curve).map(
      ([d, f]) => [x(d), y(f)] as [number, number],
    );
    parts.push(polyline(pixels, color));
    parts.push(text(frame.x0 + frame.width - 6, frame.y0 + 14 + 12 * k, curve.label, "end", 9));
    parts.push(
      `<line x1="${frame.x0 + frame.width - 90}" y1="${frame.y0 + 10 + 12 * k}" ` +
        `x2="${frame.x0 + frame.width - 74}" y2="${frame.y0 + 10 + 12 * k}" ` +
        `stroke="${color}" stroke-width="2"/>`,
    );
  });
  return document(560, 340, parts.join("\n"));
}
