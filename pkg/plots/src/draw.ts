/**
 * Canvas line-chart renderer: axes with nice ticks, per-series lines with
 * markers, standard-error bars, and a legend.  Text uses a bundled font so
 * output bytes do not depend on the host's font configuration.
 */

import { createCanvas, GlobalFonts, type SKRSContext2D } from "@napi-rs/canvas";
import { fileURLToPath } from "url";
import { dirname, join } from "path";

import type { FigureModel, Series } from "./figure.js";

const FONT_PATH = join(dirname(fileURLToPath(import.meta.url)), "..", "assets",
                       "DejaVuSans.ttf");
const FONT_OK = GlobalFonts.registerFromPath(FONT_PATH, "PlotSans");

const MARGIN = { left: 64, right: 16, top: 16, bottom: 46 };

/** Tick positions covering [lo, hi] at a 1/2/5 step, endpoints included. */
export function niceTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) {
    const pad = Math.abs(lo) > 0 ? Math.abs(lo) * 0.1 : 1;
    return niceTicks(lo - pad, lo + pad, target);
  }
  const raw = (hi - lo) / Math.max(target, 2);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (mag * m >= raw) { step = mag * m; break; }
  }
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let t = first; t <= hi + step * 1e-9; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return ticks;
}

function fmtTick(t: number, step: number): string {
  const digits = Math.max(0, -Math.floor(Math.log10(step) + 1e-9));
  return t.toFixed(Math.min(digits, 6));
}

function dataBounds(series: Series[]) {
  let xLo = Infinity, xHi = -Infinity, yLo = Infinity, yHi = -Infinity;
  for (const s of series) {
    for (const p of s.points) {
      xLo = Math.min(xLo, p.x); xHi = Math.max(xHi, p.x);
      yLo = Math.min(yLo, p.y - p.se); yHi = Math.max(yHi, p.y + p.se);
    }
  }
  if (yLo === yHi) { yLo -= 0.5; yHi += 0.5; }
  if (xLo === xHi) { xLo -= 0.5; xHi += 0.5; }
  const yPad = (yHi - yLo) * 0.06;
  return { xLo, xHi, yLo: Math.min(0, yLo), yHi: yHi + yPad };
}

export function renderChart(model: FigureModel, width = 860, height = 540): Buffer {
  const canvas = createCanvas(width, height);
  const ctx = canvas.getContext("2d");
  const font = FONT_OK ? "PlotSans" : "sans-serif";

  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, width, height);

  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const { xLo, xHi, yLo, yHi } = dataBounds(model.series);
  const px = (x: number) => MARGIN.left + ((x - xLo) / (xHi - xLo)) * plotW;
  const py = (y: number) => MARGIN.top + plotH - ((y - yLo) / (yHi - yLo)) * plotH;

  // gridlines + ticks
  const xTicks = niceTicks(xLo, xHi);
  const yTicks = niceTicks(yLo, yHi);
  const xStep = xTicks.length > 1 ? xTicks[1] - xTicks[0] : 1;
  const yStep = yTicks.length > 1 ? yTicks[1] - yTicks[0] : 1;
  ctx.strokeStyle = "#e4e7eb";
  ctx.lineWidth = 1;
  ctx.fillStyle = "#333333";
  ctx.font = `12px ${font}`;
  ctx.textAlign = "center";
  for (const t of xTicks) {
    ctx.beginPath();
    ctx.moveTo(px(t), MARGIN.top);
    ctx.lineTo(px(t), MARGIN.top + plotH);
    ctx.stroke();
    ctx.fillText(fmtTick(t, xStep), px(t), MARGIN.top + plotH + 18);
  }
  ctx.textAlign = "right";
  for (const t of yTicks) {
    ctx.beginPath();
    ctx.moveTo(MARGIN.left, py(t));
    ctx.lineTo(MARGIN.left + plotW, py(t));
    ctx.stroke();
    ctx.fillText(fmtTick(t, yStep), MARGIN.left - 8, py(t) + 4);
  }

  // frame
  ctx.strokeStyle = "#444444";
  ctx.strokeRect(MARGIN.left, MARGIN.top, plotW, plotH);

  // axis labels
  ctx.textAlign = "center";
  ctx.font = `13px ${font}`;
  ctx.fillText(model.xLabel, MARGIN.left + plotW / 2, height - 10);
  ctx.save();
  ctx.translate(14, MARGIN.top + plotH / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(model.yLabel, 0, 0);
  ctx.restore();

  // series
  for (const s of model.series) {
    drawSeries(ctx, s, px, py);
  }

  drawLegend(ctx, model.series, font, MARGIN.left + plotW, MARGIN.top);
  return canvas.toBuffer("image/png");
}

function drawSeries(ctx: SKRSContext2D, s: Series,
                    px: (x: number) => number, py: (y: number) => number) {
  ctx.strokeStyle = s.color;
  ctx.lineWidth = s.emphasis ? 2.6 : s.name.startsWith("realization") ? 1 : 1.8;
  ctx.beginPath();
  s.points.forEach((p, i) => {
    if (i === 0) ctx.moveTo(px(p.x), py(p.y));
    else ctx.lineTo(px(p.x), py(p.y));
  });
  ctx.stroke();

  for (const p of s.points) {
    if (p.se > 0) {
      ctx.lineWidth = 1.2;
      ctx.beginPath();
      ctx.moveTo(px(p.x), py(p.y - p.se));
      ctx.lineTo(px(p.x), py(p.y + p.se));
      ctx.moveTo(px(p.x) - 4, py(p.y - p.se));
      ctx.lineTo(px(p.x) + 4, py(p.y - p.se));
      ctx.moveTo(px(p.x) - 4, py(p.y + p.se));
      ctx.lineTo(px(p.x) + 4, py(p.y + p.se));
      ctx.stroke();
    }
    if (!s.name.startsWith("realization")) {
      ctx.fillStyle = s.color;
      ctx.beginPath();
      ctx.arc(px(p.x), py(p.y), s.emphasis ? 3.4 : 3, 0, 2 * Math.PI);
      ctx.fill();
    }
  }
}

function drawLegend(ctx: SKRSContext2D, series: Series[], font: string,
                    right: number, top: number) {
  const entries = series.filter((s) => !s.name.startsWith("realization"));
  if (entries.length === 0) return;
  ctx.font = `12px ${font}`;
  const w = Math.max(...entries.map((s) => ctx.measureText(s.name).width)) + 36;
  const h = entries.length * 18 + 10;
  const x0 = right - w - 8;
  const y0 = top + 8;
  ctx.fillStyle = "rgba(255,255,255,0.92)";
  ctx.fillRect(x0, y0, w, h);
  ctx.strokeStyle = "#999999";
  ctx.lineWidth = 1;
  ctx.strokeRect(x0, y0, w, h);
  entries.forEach((s, i) => {
    const y = y0 + 14 + i * 18;
    ctx.strokeStyle = s.color;
    ctx.lineWidth = s.emphasis ? 2.6 : 1.8;
    ctx.beginPath();
    ctx.moveTo(x0 + 6, y - 4);
    ctx.lineTo(x0 + 26, y - 4);
    ctx.stroke();
    ctx.fillStyle = "#333333";
    ctx.textAlign = "left";
    ctx.fillText(s.name, x0 + 30, y);
  });
}
