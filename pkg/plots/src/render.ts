/**
 * Figure rendering entry point: resolve a spec against a results CSV and
 * write the PNG.  Rendering is read-only on the input and deterministic for
 * identical CSV bytes and spec.
 */

import { writeFileSync } from "fs";

import { readResultsCsv, readTraceCsv } from "./csv.js";
import {
  buildConvergenceFigure,
  buildSweepFigure,
  FIGURE_KINDS,
  type FigureKind,
  type FigureModel,
  type FigureSpec,
} from "./figure.js";
import { renderChart } from "./draw.js";

export interface RenderedFigure {
  out: string;
  kind: FigureKind;
  dropped: number;
}

export function buildModel(spec: FigureSpec): FigureModel {
  if (!FIGURE_KINDS.includes(spec.kind)) {
    throw new Error(
      `unknown figure kind ${JSON.stringify(spec.kind)}; expected one of ` +
      FIGURE_KINDS.join(", "));
  }
  if (spec.kind === "convergence") {
    return buildConvergenceFigure(spec.input, readTraceCsv(spec.input));
  }
  return buildSweepFigure(spec.input, readResultsCsv(spec.input), spec.kind,
                          spec.schemes);
}

export function renderFigure(spec: FigureSpec): RenderedFigure {
  const format = spec.format ?? "png";
  if (format !== "png") {
    throw new Error(`unsupported output format ${JSON.stringify(format)}; ` +
                    `only png is implemented`);
  }
  if (!spec.out.toLowerCase().endsWith(".png")) {
    throw new Error(`output path ${spec.out} must end in .png`);
  }
  const model = buildModel(spec);
  const png = renderChart(model, spec.width ?? 860, spec.height ?? 540);
  writeFileSync(spec.out, png);
  return { out: spec.out, kind: spec.kind, dropped: model.dropped };
}

/** Render several figures in order; stops at the first failure. */
export function renderFigures(specs: FigureSpec[]): RenderedFigure[] {
  return specs.map(renderFigure);
}
