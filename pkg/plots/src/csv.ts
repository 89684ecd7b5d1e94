/**
 * Reader for the schema-versioned CSV artifacts.
 *
 * Files start with `#schema=<name>/<version>`, then `#key=value` metadata
 * lines, then a comma-separated header row and data rows. The reader
 * never interprets the science; it only tokenizes.
 */

import { readFileSync } from "node:fs";

export interface CsvTable {
  schema: string;
  version: number;
  meta: Record<string, string>;
  header: string[];
  rows: string[][];
}

/** Schema versions the renderers understand. */
export const SUPPORTED: Record<string, number> = {
  sweep: 1,
  walks: 1,
  tail: 1,
  drift: 1,
};

export function parseCsv(text: string): CsvTable {
  const lines = text.split("\n");
  if (lines.length && lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (!lines.length || !lines[0].startsWith("#schema=")) {
    throw new Error("missing #schema line");
  }
  const tag = lines[0].slice("#schema=".length);
  const slash = tag.lastIndexOf("/");
  if (slash < 0) {
    throw new Error(`malformed schema tag ${JSON.stringify(tag)}`);
  }
  const schema = tag.slice(0, slash);
  const version = Number(tag.slice(slash + 1));
  if (!Number.isInteger(version)) {
    throw new Error(`malformed schema version in ${JSON.stringify(tag)}`);
  }

  const meta: Record<string, string> = {};
  let i = 1;
  for (; i < lines.length && lines[i].startsWith("#"); i++) {
    const body = lines[i].slice(1);
    const eq = body.indexOf("=");
    if (eq < 0) {
      throw new Error(`malformed metadata line ${JSON.stringify(lines[i])}`);
    }
    meta[body.slice(0, eq)] = body.slice(eq + 1);
  }
  if (i >= lines.length) {
    throw new Error("missing header row");
  }
  const header = lines[i].split(",");
  const rows = lines.slice(i + 1).map((line) => line.split(","));
  for (const row of rows) {
    if (row.length !== header.length) {
      throw new Error(
        `row has ${row.length} fields, header has ${header.length}`,
      );
    }
  }
  return { schema, version, meta, header, rows };
}

/** Read a CSV and require one of the supported schema/version pairs. */
export function readTable(path: string, expect: string): CsvTable {
  const table = parseCsv(readFileSync(path, "utf8"));
  if (table.schema !== expect) {
    throw new Error(
      `${path}: schema ${table.schema}/${table.version}, expected ${expect}`,
    );
  }
  if (SUPPORTED[expect] !== table.version) {
    throw new Error(
      `${path}: unsupported ${table.schema} version ${table.version}` +
        ` (supported: ${SUPPORTED[expect]})`,
    );
  }
  return table;
}

/** Column accessor; throws when the header lacks the name. */
export function column(table: CsvTable, name: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`missing column ${JSON.stringify(name)}`);
  }
  return idx;
}
