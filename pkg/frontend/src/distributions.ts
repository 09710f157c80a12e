/**
 * Distribution panels from a report directory: makespan histogram, agent
 * position scatter, and per-tick d_min vs d_origin traces.
 *
 * With a baseline report the panels overlay both datasets, primary in blue
 * and baseline in orange.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { readVersionedCsv } from "./csv.js";
import { axes, circles, document, PanelFrame, polyline, text } from "./svg.js";

export const PRIMARY_COLOR = "#1f77b4";
export const BASELINE_COLOR = "#ff7f0e";

export interface Report {
  label: string;
  summary: Record<string, unknown>;
  makespans: number[];
  positions: { episode: number; x: number; y: number }[];
  dmin: { episode: number; t: number; dMin: number; dOrigin: number }[];
}

export function loadReport(dir: string): Report {
  const summary = JSON.parse(
    fs.readFileSync(path.join(dir, "summary.json"), "utf-8"),
  ) as Record<string, unknown>;
  const makespans = readVersionedCsv(path.join(dir, "makespans.csv"), [
    "episode",
    "makespan",
  ]).rows.map((row) => row.makespan);
  const positions = readVersionedCsv(path.join(dir, "positions.csv"), [
    "episode",
    "t",
    "agent",
    "p_x",
    "p_y",
  ]).rows.map((row) => ({ episode: row.episode, x: row.p_x, y: row.p_y }));
  const dmin = readVersionedCsv(path.join(dir, "dmin_dorigin.csv"), [
    "episode",
    "t",
    "d_min",
    "d_origin",
  ]).rows.map((row) => ({
    episode: row.episode,
    t: row.t,
    dMin: row.d_min,
    dOrigin: row.d_origin,
  }));
  const label =
    typeof summary.label === "string" && summary.label !== ""
      ? summary.label
      : path.basename(dir);
  return { label, summary, makespans, positions, dmin };
}

export interface Histogram {
  edges: number[]; // bins + 1 edges
  counts: number[];
}

export function histogram(values: number[], bins = 10, lo?: number, hi?: number): Histogram {
  if (bins < 1) throw new Error("histogram needs at least one bin");
  const min = lo ?? Math.min(...values);
  const max = hi ?? Math.max(...values);
  const span = max - min || 1;
  const counts = new Array<number>(bins).fill(0);
  for (const v of values) {
    const k = Math.min(bins - 1, Math.floor(((v - min) / span) * bins));
    counts[k] += 1;
  }
  const edges = Array.from({ length: bins + 1 }, (_, k) => min + (span * k) / bins);
  return { edges, counts };
}

function histogramOutline(h: Histogram, total: number): [number, number][] {
  const pts: [number, number][] = [[h.edges[0], 0]];
  h.counts.forEach((count, k) => {
    const frac = total === 0 ? 0 : count / total;
    pts.push([h.edges[k], frac]);
    pts.push([h.edges[k + 1], frac]);
  });
  pts.push([h.edges[h.edges.length - 1], 0]);
  return pts;
}

function makespanPanel(frame: PanelFrame, reports: Report[], colors: string[]): string {
  const all = reports.flatMap((r) => r.makespans);
  if (all.length === 0) {
    // nothing succeeded anywhere: render the empty frame rather than fail
    return axes(frame, [0, 1], [0, 1]).svg;
  }
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  const bins = Math.min(12, Math.max(4, Math.ceil(Math.sqrt(all.length))));
  const maxFrac = Math.max(
    ...reports.map((r) => {
      const h = histogram(r.makespans, bins, lo, hi);
      return r.makespans.length === 0 ? 0 : Math.max(...h.counts) / r.makespans.length;
    }),
  );
  const { svg, x, y } = axes(frame, [lo, hi], [0, Math.max(maxFrac, 0.1) * 1.1]);
  const parts = [svg];
  reports.forEach((report, k) => {
    if (report.makespans.length === 0) return;
    const outline = histogramOutline(histogram(report.makespans, bins, lo, hi), report.makespans.length);
    parts.push(polyline(outline.map(([vx, vy]) => [x(vx), y(vy)] as [number, number]), colors[k]));
  });
  return parts.join("\n");
}

function positionsPanel(frame: PanelFrame, reports: Report[], colors: string[]): string {
  const xs = reports.flatMap((r) => r.positions.map((p) => p.x));
  const ys = reports.flatMap((r) => r.positions.map((p) => p.y));
  const pad = 0.3;
  const { svg, x, y } = axes(
    frame,
    [Math.min(...xs) - pad, Math.max(...xs) + pad],
    [Math.min(...ys) - pad, Math.max(...ys) + pad],
  );
  const parts = [svg];
  reports.forEach((report, k) => {
    const pts = report.positions.map((p) => [x(p.x), y(p.y)] as [number, number]);
    parts.push(circles(pts, colors[k], 1.5));
  });
  return parts.join("\n");
}

function dminPanel(frame: PanelFrame, reports: Report[], colors: string[]): string {
  const origins = reports.flatMap((r) => r.dmin.map((d) => d.dOrigin));
  const mins = reports.flatMap((r) => r.dmin.map((d) => d.dMin));
  const { svg, x, y } = axes(
    frame,
    [0, Math.max(...origins, 0.1) * 1.05],
    [0, Math.max(...mins, 0.1) * 1.05],
  );
  const parts = [svg];
  reports.forEach((report, k) => {
    const byEpisode = new Map<number, [number, number][]>();
    for (const d of report.dmin) {
      const pts = byEpisode.get(d.episode) ?? [];
      pts.push([x(d.dOrigin), y(d.dMin)]);
      byEpisode.set(d.episode, pts);
    }
    for (const pts of byEpisode.values()) {
      parts.push(polyline(pts, colors[k], 'stroke-opacity="0.5"'));
    }
  });
  return parts.join("\n");
}

export function renderDistributionsFigure(primary: Report, baseline: Report | null): string {
  const reports = baseline ? [primary, baseline] : [primary];
  const colors = [PRIMARY_COLOR, BASELINE_COLOR];
  const panelWidth = 280;
  const frames: PanelFrame[] = [
    { x0: 55, y0: 40, width: panelWidth, height: 220, xLabel: "makespan (s)", yLabel: "fraction of episodes", title: "makespan" },
    { x0: 415, y0: 40, width: panelWidth, height: 220, xLabel: "x (m)", yLabel: "y (m)", title: "positions" },
    { x0: 775, y0: 40, width: panelWidth, height: 220, xLabel: "d_origin (m)", yLabel: "d_min (m)", title: "d_min vs d_origin" },
  ];
  const parts = [
    makespanPanel(frames[0], reports, colors),
    positionsPanel(frames[1], reports, colors),
    dminPanel(frames[2], reports, colors),
  ];
  reports.forEach((report, k) => {
    parts.push(
      `<line x1="60" y1="${318 + 14 * k}" x2="76" y2="${318 + 14 * k}" stroke="${colors[k]}" stroke-width="2"/>`,
    );
    parts.push(text(82, 321 + 14 * k, report.label, "start", 10));
  });
  return document(1110, 350, parts.join("\n"));
}
