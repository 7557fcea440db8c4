/**
 * Readers for the two CSV schemas the simulation harness emits:
 * result records (one row per scheme x sweep value x realization) and
 * convergence traces (one row per outer iteration).
 */

import { readFileSync } from "fs";
import Papa from "papaparse";

export const RESULT_COLUMNS = [
  "scheme", "sweep_axis", "sweep_value", "realization_id", "seed",
  "secrecy_rate_bits", "r_sd", "max_r_se", "outer_iterations",
  "bisection_iterations", "solve_time_ms", "status", "rank_ratio_x1",
  "rank_s", "max_budget_violation", "duality_gap",
] as const;

export const TRACE_COLUMNS = [
  "realization_id", "seed", "iteration", "secrecy_rate_bits",
] as const;

export interface ResultRow {
  scheme: string;
  sweepAxis: string;
  sweepValue: number | null;
  realizationId: number;
  seed: number;
  secrecyRateBits: number;
  status: string;
}

export interface TraceRow {
  realizationId: number;
  iteration: number;
  secrecyRateBits: number;
}

export class CsvSchemaError extends Error {}

function parseTable(path: string): string[][] {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new CsvSchemaError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const parsed = Papa.parse<string[]>(text.trimEnd(), { delimiter: "," });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new CsvSchemaError(`malformed CSV in ${path}: ${e.message} (row ${e.row})`);
  }
  return parsed.data;
}

function checkHeader(path: string, got: string[], want: readonly string[]) {
  if (got.length !== want.length || want.some((c, i) => got[i] !== c)) {
    throw new CsvSchemaError(
      `${path} does not match the expected schema: ` +
      `expected columns [${want.join(",")}], found [${got.join(",")}]`);
  }
}

function num(path: string, cell: string, column: string, line: number): number {
  if (cell === "nan") return NaN;
  const v = Number(cell);
  if (cell === "" || Number.isNaN(v)) {
    throw new CsvSchemaError(
      `${path} line ${line}: column ${column} holds ${JSON.stringify(cell)}, not a number`);
  }
  return v;
}

/** Parse a result CSV; header must match exactly, zero data rows is an error. */
export function readResultsCsv(path: string): ResultRow[] {
  const table = parseTable(path);
  if (table.length === 0) throw new CsvSchemaError(`${path} is empty`);
  checkHeader(path, table[0], RESULT_COLUMNS);
  if (table.length === 1) {
    throw new CsvSchemaError(`${path} has a header but no data rows; nothing to plot`);
  }
  const col = (name: string) => RESULT_COLUMNS.indexOf(name as never);
  const rows: ResultRow[] = [];
  for (let i = 1; i < table.length; i++) {
    const r = table[i];
    const line = i + 1;
    if (r.length !== RESULT_COLUMNS.length) {
      throw new CsvSchemaError(
        `${path} line ${line}: expected ${RESULT_COLUMNS.length} cells, found ${r.length}`);
    }
    const sweepCell = r[col("sweep_value")];
    rows.push({
      scheme: r[col("scheme")],
      sweepAxis: r[col("sweep_axis")],
      sweepValue: sweepCell === "" ? null : num(path, sweepCell, "sweep_value", line),
      realizationId: num(path, r[col("realization_id")], "realization_id", line),
      seed: num(path, r[col("seed")], "seed", line),
      secrecyRateBits: num(path, r[col("secrecy_rate_bits")], "secrecy_rate_bits", line),
      status: r[col("status")],
    });
  }
  return rows;
}

/** Parse a convergence-trace CSV from the harness `convergence` command. */
export function readTraceCsv(path: string): TraceRow[] {
  const table = parseTable(path);
  if (table.length === 0) throw new CsvSchemaError(`${path} is empty`);
  checkHeader(path, table[0], TRACE_COLUMNS);
  if (table.length === 1) {
    throw new CsvSchemaError(`${path} has a header but no data rows; nothing to plot`);
  }
  const rows: TraceRow[] = [];
  for (let i = 1; i < table.length; i++) {
    const r = table[i];
    const line = i + 1;
    if (r.length !== TRACE_COLUMNS.length) {
      throw new CsvSchemaError(
        `${path} line ${line}: expected ${TRACE_COLUMNS.length} cells, found ${r.length}`);
    }
    rows.push({
      realizationId: num(path, r[0], "realization_id", line),
      iteration: num(path, r[2], "iteration", line),
      secrecyRateBits: num(path, r[3], "secrecy_rate_bits", line),
    });
  }
  return rows;
}
