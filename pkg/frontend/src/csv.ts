/** Minimal CSV reader for the simulator's outputs (no quoting, no escapes). */

export interface Table {
  name: string;
  header: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string, name = 'input'): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error(`${name}: empty CSV`);
  }
  const header = lines[0].split(',').map((h) => h.trim());
  if (lines.length === 1) {
    throw new Error(`${name}: CSV has a header but no data rows`);
  }
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(',');
    if (cells.length !== header.length) {
      throw new Error(`${name}: row ${i + 2} has ${cells.length} cells, expected ${header.length}`);
    }
    const row: Record<string, string> = {};
    header.forEach((h, j) => (row[h] = cells[j].trim()));
    return row;
  });
  return { name, header, rows };
}

export function requireColumns(table: Table, columns: string[]): void {
  for (const col of columns) {
    if (!table.header.includes(col)) {
      throw new Error(`${table.name}: missing column "${col}"`);
    }
  }
}

export function num(row: Record<string, string>, col: string, table: Table): number {
  const value = Number(row[col]);
  if (!Number.isFinite(value)) {
    throw new Error(`${table.name}: non-numeric value "${row[col]}" in column "${col}"`);
  }
  return value;
}
