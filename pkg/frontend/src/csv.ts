/** Minimal CSV reader for the escapelab output schemas. */

export interface Table {
  header: string[];
  rows: string[][];
}

export class SchemaError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV: no header row");
  }
  const header = splitLine(lines[0]);
  const rows = lines.slice(1).map(splitLine);
  for (const row of rows) {
    if (row.length !== header.length) {
      throw new SchemaError(
        `row width ${row.length} does not match header width ${header.length}`,
      );
    }
  }
  return { header, rows };
}

function splitLine(line: string): string[] {
  // escapelab CSVs are plain (no quoting needed for numeric/label columns)
  return line.split(",");
}

/** Extract named numeric columns, failing with the missing column's name. */
export function numericColumns(table: Table, names: string[]): number[][] {
  const idx = names.map((name) => {
    const i = table.header.indexOf(name);
    if (i < 0) {
      throw new SchemaError(
        `missing column '${name}' (found: ${table.header.join(", ")})`,
      );
    }
    return i;
  });
  if (table.rows.length === 0) {
    throw new SchemaError("CSV has a header but no data rows");
  }
  return names.map((_, j) =>
    table.rows.map((row) => {
      const v = Number(row[idx[j]]);
      if (!Number.isFinite(v)) {
        throw new SchemaError(`non-numeric value '${row[idx[j]]}' in column '${names[j]}'`);
      }
      return v;
    }),
  );
}

export function stringColumn(table: Table, name: string): string[] {
  const i = table.header.indexOf(name);
  if (i < 0) {
    throw new SchemaError(`missing column '${name}' (found: ${table.header.join(", ")})`);
  }
  return table.rows.map((row) => row[i]);
}
