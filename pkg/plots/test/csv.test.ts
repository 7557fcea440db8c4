import { describe, expect, it } from "vitest";
import { mkdtempSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { fileURLToPath } from "url";

import {
  CsvSchemaError,
  RESULT_COLUMNS,
  readResultsCsv,
  readTraceCsv,
} from "../src/csv.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));

function tmpCsv(name: string, text: string): string {
  const dir = mkdtempSync(join(tmpdir(), "plots-csv-"));
  const p = join(dir, name);
  writeFileSync(p, text);
  return p;
}

describe("readResultsCsv", () => {
  it("parses a generated sweep file", () => {
    const rows = readResultsCsv(join(FIXTURES, "sweep_n.csv"));
    expect(rows.length).toBe(27);
    const first = rows[0];
    expect(first.scheme).toBe("Distributed-SPS");
    expect(first.sweepAxis).toBe("N");
    expect(first.sweepValue).toBe(2);
    expect(first.status).toBe("optimal");
    expect(Number.isFinite(first.secrecyRateBits)).toBe(true);
  });

  it("rejects a file with a reordered header", () => {
    const cols = [...RESULT_COLUMNS];
    [cols[0], cols[1]] = [cols[1], cols[0]];
    const p = tmpCsv("bad.csv", cols.join(",") + "\n");
    expect(() => readResultsCsv(p)).toThrow(CsvSchemaError);
    expect(() => readResultsCsv(p)).toThrow(/bad\.csv/);
    expect(() => readResultsCsv(p)).toThrow(/scheme/);
  });

  it("rejects a header-only file and names it", () => {
    const p = tmpCsv("empty.csv", RESULT_COLUMNS.join(",") + "\n");
    expect(() => readResultsCsv(p)).toThrow(/empty\.csv/);
    expect(() => readResultsCsv(p)).toThrow(/no data rows/);
  });

  it("rejects an entirely empty file", () => {
    const p = tmpCsv("zero.csv", "");
    expect(() => readResultsCsv(p)).toThrow(/zero\.csv/);
  });

  it("rejects rows with the wrong cell count", () => {
    const p = tmpCsv("short.csv",
      RESULT_COLUMNS.join(",") + "\nDistributed-SPS,N,2\n");
    expect(() => readResultsCsv(p)).toThrow(/line 2/);
  });

  it("reads nan rates and empty sweep values", () => {
    const cells = RESULT_COLUMNS.map(() => "0");
    cells[0] = "CJ-DPS";
    cells[1] = "none";
    cells[2] = "";
    cells[5] = "nan";
    cells[11] = "failed:RuntimeError";
    const p = tmpCsv("nan.csv",
      RESULT_COLUMNS.join(",") + "\n" + cells.join(",") + "\n");
    const rows = readResultsCsv(p);
    expect(rows[0].sweepValue).toBeNull();
    expect(Number.isNaN(rows[0].secrecyRateBits)).toBe(true);
    expect(rows[0].status).toBe("failed:RuntimeError");
  });

  it("rejects non-numeric rate cells with file and column named", () => {
    const cells = RESULT_COLUMNS.map(() => "0");
    cells[5] = "fast";
    const p = tmpCsv("junk.csv",
      RESULT_COLUMNS.join(",") + "\n" + cells.join(",") + "\n");
    expect(() => readResultsCsv(p)).toThrow(/junk\.csv/);
    expect(() => readResultsCsv(p)).toThrow(/secrecy_rate_bits/);
  });
});

describe("readTraceCsv", () => {
  it("parses the generated trace", () => {
    const rows = readTraceCsv(join(FIXTURES, "trace.csv"));
    expect(rows.length).toBeGreaterThan(3);
    expect(rows[0].iteration).toBe(0);
    expect(rows[0].realizationId).toBe(0);
  });

  it("rejects a results file passed as a trace", () => {
    expect(() => readTraceCsv(join(FIXTURES, "sweep_n.csv")))
      .toThrow(CsvSchemaError);
  });
});
