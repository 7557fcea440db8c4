/**
 * Turns parsed CSV rows into a drawable figure model: per-scheme series of
 * (x, mean, standard error) for the sweep kinds, per-realization traces
 * plus their mean for the convergence kind.
 */

import { CsvSchemaError, ResultRow, TraceRow } from "./csv.js";

export type FigureKind = "vs-N" | "vs-K" | "vs-Ps" | "convergence";

export const FIGURE_KINDS: FigureKind[] = ["vs-N", "vs-K", "vs-Ps", "convergence"];

export interface FigureSpec {
  input: string;
  kind: FigureKind;
  out: string;
  format?: "png";           // the only raster target supported
  schemes?: string[];       // subset + order override; default: canonical
  width?: number;
  height?: number;
}

export interface Point {
  x: number;
  y: number;
  se: number;               // standard error of the mean; 0 for n = 1
  n: number;
}

export interface Series {
  name: string;
  color: string;
  emphasis: boolean;        // bold line (used for the convergence mean)
  points: Point[];
}

export interface FigureModel {
  xLabel: string;
  yLabel: string;
  series: Series[];
  dropped: number;          // rows excluded for non-success status
}

// canonical scheme order; keeps colors stable across CSVs
export const SCHEME_ORDER = [
  "CJ-SPS", "CJ-DPS", "NoCJ-SPS", "NoCJ-DPS",
  "Distributed-SPS", "Distributed-DPS", "RandomPS",
];

export const PALETTE = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

const AXIS_FOR_KIND: Record<Exclude<FigureKind, "convergence">, string> = {
  "vs-N": "N",
  "vs-K": "K",
  "vs-Ps": "Ps_dBm",
};

const X_LABELS: Record<FigureKind, string> = {
  "vs-N": "number of relays N",
  "vs-K": "number of eavesdroppers K",
  "vs-Ps": "source power Ps (dBm)",
  "convergence": "outer iteration",
};

const OK_STATUSES = new Set(["optimal", "zero-rate"]);

function meanSe(values: number[]): { mean: number; se: number } {
  const n = values.length;
  const mean = values.reduce((a, b) => a + b, 0) / n;
  if (n < 2) return { mean, se: 0 };
  const var_ = values.reduce((a, b) => a + (b - mean) ** 2, 0) / (n - 1);
  return { mean, se: Math.sqrt(var_ / n) };
}

function colorFor(scheme: string, fallbackIndex: number): string {
  const i = SCHEME_ORDER.indexOf(scheme);
  return PALETTE[(i >= 0 ? i : fallbackIndex) % PALETTE.length];
}

/** Mean secrecy rate vs. sweep value, one series per scheme. */
export function buildSweepFigure(path: string, rows: ResultRow[],
                                 kind: Exclude<FigureKind, "convergence">,
                                 schemes?: string[]): FigureModel {
  const axis = AXIS_FOR_KIND[kind];
  const onAxis = rows.filter((r) => r.sweepAxis === axis && r.sweepValue !== null);
  if (onAxis.length === 0) {
    const seen = [...new Set(rows.map((r) => r.sweepAxis))].sort();
    throw new CsvSchemaError(
      `${path} has no rows with sweep_axis=${axis} (needed for ${kind}); ` +
      `the file sweeps [${seen.join(",")}]`);
  }
  const usable = onAxis.filter(
    (r) => OK_STATUSES.has(r.status) && !Number.isNaN(r.secrecyRateBits));
  const dropped = onAxis.length - usable.length;

  const present = [...new Set(usable.map((r) => r.scheme))];
  const order = schemes ?? SCHEME_ORDER.filter((s) => present.includes(s))
    .concat(present.filter((s) => !SCHEME_ORDER.includes(s)).sort());
  const series: Series[] = [];
  order.forEach((scheme, idx) => {
    const mine = usable.filter((r) => r.scheme === scheme);
    if (schemes && mine.length === 0) {
      throw new CsvSchemaError(`${path} has no usable rows for scheme ${scheme}`);
    }
    if (mine.length === 0) return;
    const byX = new Map<number, number[]>();
    for (const r of mine) {
      const xs = byX.get(r.sweepValue as number) ?? [];
      xs.push(r.secrecyRateBits);
      byX.set(r.sweepValue as number, xs);
    }
    const points = [...byX.entries()]
      .sort((a, b) => a[0] - b[0])
      .map(([x, vals]) => ({ x, n: vals.length, ...meanSe(vals) }))
      .map(({ x, n, mean, se }) => ({ x, y: mean, se, n }));
    series.push({ name: scheme, color: colorFor(scheme, idx), emphasis: false, points });
  });
  return {
    xLabel: X_LABELS[kind],
    yLabel: "average secrecy rate (bits/channel use)",
    series, dropped,
  };
}

/** One thin line per realization plus a bold mean line. */
export function buildConvergenceFigure(path: string, rows: TraceRow[]): FigureModel {
  const byRealization = new Map<number, TraceRow[]>();
  for (const r of rows) {
    const t = byRealization.get(r.realizationId) ?? [];
    t.push(r);
    byRealization.set(r.realizationId, t);
  }
  const series: Series[] = [];
  const traces = [...byRealization.entries()].sort((a, b) => a[0] - b[0]);
  for (const [rid, t] of traces) {
    t.sort((a, b) => a.iteration - b.iteration);
    series.push({
      name: `realization ${rid}`,
      color: "#b0b8c4",
      emphasis: false,
      points: t.map((r) => ({ x: r.iteration, y: r.secrecyRateBits, se: 0, n: 1 })),
    });
  }
  const maxIter = Math.max(...rows.map((r) => r.iteration));
  const meanPts: Point[] = [];
  for (let it = 0; it <= maxIter; it++) {
    const vals = traces
      .map(([, t]) => t.find((r) => r.iteration === it))
      .filter((r): r is TraceRow => r !== undefined)
      .map((r) => r.secrecyRateBits);
    if (vals.length === 0) continue;
    const { mean, se } = meanSe(vals);
    meanPts.push({ x: it, y: mean, se, n: vals.length });
  }
  series.push({ name: "mean", color: "#1f77b4", emphasis: true, points: meanPts });
  return {
    xLabel: X_LABELS["convergence"],
    yLabel: "incumbent secrecy rate (bits/channel use)",
    series, dropped: 0,
  };
}
