import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { afterAll, describe, expect, it } from "vitest";
import { readVersionedCsv, SchemaError } from "../src/csv.js";

const FIXTURES = path.join(__dirname, "fixtures");
const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "csv-test-"));
afterAll(() => fs.rmSync(tmp, { recursive: true, force: true }));

function write(name: string, content: string): string {
  const file = path.join(tmp, name);
  fs.writeFileSync(file, content);
  return file;
}

describe("readVersionedCsv", () => {
  it("parses a fixture report CSV", () => {
    const table = readVersionedCsv(path.join(FIXTURES, "report", "makespans.csv"), [
      "episode",
      "makespan",
    ]);
    expect(table.schema).toBe(1);
    expect(table.columns).toEqual(["episode", "makespan"]);
    expect(table.rows.length).toBeGreaterThan(0);
    for (const row of table.rows) {
      expect(typeof row.makespan).toBe("number");
      expect(row.makespan).toBeGreaterThan(0);
    }
  });

  it("rejects a file without the schema header", () => {
    const file = write("plain.csv", "a,b\n1,2\n");
    expect(() => readVersionedCsv(file)).toThrow(SchemaError);
    expect(() => readVersionedCsv(file)).toThrow(/header line/);
  });

  it("rejects an unsupported schema version", () => {
    const file = write("v9.csv", "# schema=9 columns=a,b\na,b\n1,2\n");
    expect(() => readVersionedCsv(file)).toThrow(/version 9/);
  });

  it("rejects a missing required column", () => {
    const file = write("cols.csv", "# schema=1 columns=a,b\na,b\n1,2\n");
    expect(() => readVersionedCsv(file, ["c"])).toThrow(/lack "c"/);
  });

  it("handles an empty body", () => {
    const file = write("empty.csv", "# schema=1 columns=a,b\na,b\n");
    expect(readVersionedCsv(file).rows).toEqual([]);
  });
});
