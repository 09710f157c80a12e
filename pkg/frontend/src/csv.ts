/**
 * Versioned CSV reader.
 *
 * Every CSV the runtime emits starts with a comment line declaring the
 * schema version and column list:
 *
 *     # schema=1 columns=delay_ms,fraction
 *     delay_ms,fraction
 *     0.93,0.0125
 *     ...
 *
 * We refuse files whose schema version we do not support and files missing
 * a column the caller asked for, so plots never silently read garbage.
 */

import * as fs from "node:fs";
import Papa from "papaparse";

export const SUPPORTED_SCHEMA = 1;

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export interface CsvTable {
  schema: number;
  columns: string[];
  rows: Record<string, number>[];
}

const HEADER_RE = /^# schema=(\d+) columns=(.+)$/;

export function readVersionedCsv(path: string, required: string[] = []): CsvTable {
  const text = fs.readFileSync(path, "utf-8");
  const newline = text.indexOf("\n");
  const headerLine = newline === -1 ? text : text.slice(0, newline);
  const match = HEADER_RE.exec(headerLine.trim());
  if (!match) {
    throw new SchemaError(`${path}: missing "# schema=... columns=..." header line`);
  }
  const schema = Number(match[1]);
  if (schema !== SUPPORTED_SCHEMA) {
    throw new SchemaError(
      `${path}: schema version ${schema} is not supported (expected ${SUPPORTED_SCHEMA})`,
    );
  }
  const columns = match[2].split(",");
  for (const col of required) {
    if (!columns.includes(col)) {
      throw new SchemaError(`${path}: declared columns [${columns}] lack "${col}"`);
    }
  }

  const body = newline === -1 ? "" : text.slice(newline + 1);
  const parsed = Papa.parse<Record<string, number>>(body, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`${path}: malformed CSV: ${first.message} (row ${first.row})`);
  }
  return { schema, columns, rows: parsed.data };
}
