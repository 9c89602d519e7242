import { createHash } from "node:crypto";
import { readFileSync } from "node:fs";
import Papa from "papaparse";

/** One parsed sweep row; numeric fields stay strings in `raw` too. */
export interface SweepRow {
  [column: string]: number | string;
}

export interface SweepTable {
  rows: SweepRow[];
  columns: string[];
  /** sha256 of the raw CSV bytes, embedded into rendered figures. */
  inputHash: string;
  path: string;
}

const NON_NUMERIC = new Set(["model", "code_version", "config_hash"]);

export class SchemaError extends Error {}

export function readSweepCsv(path: string): SweepTable {
  const bytes = readFileSync(path);
  const inputHash = createHash("sha256").update(bytes).digest("hex");
  const parsed = Papa.parse<Record<string, string>>(bytes.toString("utf-8"), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`${path}: CSV parse error: ${first.message}`);
  }
  const columns = parsed.meta.fields ?? [];
  const rows = parsed.data.map((record) => {
    const row: SweepRow = {};
    for (const [key, value] of Object.entries(record)) {
      row[key] = NON_NUMERIC.has(key) ? value : Number(value);
    }
    return row;
  });
  return { rows, columns, inputHash, path };
}

/** Columns each figure id needs in its input CSV. */
export const REQUIRED_COLUMNS: Record<number, string[]> = {
  1: ["lambda0", "n0", "gap", "fluct"],
  2: ["xi", "gap"],
  3: ["xi", "fluct"],
  4: ["lambda0", "delta_lambda", "xi"],
};

export function checkSchema(table: SweepTable, fig: number): void {
  const required = REQUIRED_COLUMNS[fig];
  if (!required) {
    throw new SchemaError(`unknown figure id ${fig} (expected 1-4)`);
  }
  const missing = required.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${table.path}: missing column(s) for figure ${fig}: ${missing.join(", ")}`
    );
  }
}
