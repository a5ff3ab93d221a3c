/** Minimal CSV handling for the analysis outputs (no quoting in our files). */

export interface CsvTable {
  columns: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string, source = "csv"): CsvTable {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length < 1) {
    throw new Error(`${source}: empty file`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new Error(`${source}: row ${i + 1} has ${cells.length} cells, expected ${columns.length}`);
    }
    const row: Record<string, string> = {};
    columns.forEach((c, k) => (row[c] = cells[k].trim()));
    return row;
  });
  return { columns, rows };
}

/** Pull a numeric column, failing loudly if it is absent or malformed. */
export function numericColumn(table: CsvTable, name: string, source = "csv"): number[] {
  if (!table.columns.includes(name)) {
    throw new Error(`${source}: missing column '${name}' (have: ${table.columns.join(", ")})`);
  }
  return table.rows.map((row, i) => {
    const v = Number(row[name]);
    if (!Number.isFinite(v)) {
      throw new Error(`${source}: row ${i + 1}: column '${name}' is not a finite number (${row[name]})`);
    }
    return v;
  });
}

export function stringColumn(table: CsvTable, name: string, source = "csv"): string[] {
  if (!table.columns.includes(name)) {
    throw new Error(`${source}: missing column '${name}' (have: ${table.columns.join(", ")})`);
  }
  return table.rows.map((row) => row[name]);
}
