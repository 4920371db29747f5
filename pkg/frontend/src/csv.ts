/** Minimal CSV reader for phaseflow campaign outputs.
 *
 * Files carry an optional leading `#` provenance comment, then a header row,
 * then plain numeric rows (no quoting or embedded commas in this format).
 */

export interface CsvTable {
  header: string[];
  rows: string[][];
}

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export function parseCsv(text: string): CsvTable {
  const lines = text
    .split(/\r?\n/)
    .filter((line) => line.length > 0 && !line.startsWith("#"));
  if (lines.length === 0) {
    throw new SchemaError("empty CSV: no header row");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  for (const row of rows) {
    if (row.length !== header.length) {
      throw new SchemaError(
        `row has ${row.length} fields, header has ${header.length}`,
      );
    }
  }
  return { header, rows };
}

/** Column indices for required names; names the first missing column. */
export function requireColumns(table: CsvTable, names: string[]): number[] {
  return names.map((name) => {
    const idx = table.header.indexOf(name);
    if (idx < 0) {
      throw new SchemaError(`missing column "${name}" (header: ${table.header.join(",")})`);
    }
    return idx;
  });
}

export function toNumber(field: string, column: string): number {
  const value = Number(field);
  if (field.trim() === "" || Number.isNaN(value)) {
    throw new SchemaError(`column "${column}" has non-numeric value "${field}"`);
  }
  return value;
}
