/**
 * Parser for the sweep CSVs written by the quantdoa harness.
 *
 * File shape: `# key = value` comment lines echoing the experiment config
 * (plus `# kind = ...` and `# note: ...` lines), then a fixed 8-column
 * header, then data rows. Empty cells mean "not measured" and parse to
 * null; the bits column uses `inf` for infinite resolution.
 */

export const CSV_COLUMNS = [
  "sweep_var",
  "b",
  "estimator",
  "rmse_deg",
  "crlb_sqrt_deg",
  "eta_db",
  "trials",
  "failures",
] as const;

export interface SweepRow {
  sweepVar: number;
  bits: number;
  estimator: string;
  rmseDeg: number | null;
  crlbSqrtDeg: number | null;
  etaDb: number | null;
  trials: number;
  failures: number;
}

export interface SweepData {
  kind: string;
  config: Map<string, string>;
  notes: string[];
  rows: SweepRow[];
}

export class CsvFormatError extends Error {}

function parseNumberCell(cell: string, line: string): number | null {
  if (cell === "") return null;
  const value = Number(cell);
  if (!Number.isFinite(value)) {
    throw new CsvFormatError(`non-numeric cell ${JSON.stringify(cell)} in row: ${line}`);
  }
  return value;
}

function parseBits(cell: string, line: string): number {
  if (cell === "inf") return Infinity;
  const value = Number(cell);
  if (!Number.isInteger(value) || value < 1) {
    throw new CsvFormatError(`invalid bits cell ${JSON.stringify(cell)} in row: ${line}`);
  }
  return value;
}

export function parseSweepCsv(text: string): SweepData {
  const data: SweepData = { kind: "", config: new Map(), notes: [], rows: [] };
  let headerSeen = false;

  for (const rawLine of text.split("\n")) {
    const line = rawLine.trimEnd();
    if (line === "") continue;

    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      if (body.startsWith("note:")) {
        data.notes.push(body.slice("note:".length).trim());
      } else {
        const eq = body.indexOf("=");
        if (eq >= 0) {
          const key = body.slice(0, eq).trim();
          const value = body.slice(eq + 1).trim();
          if (key === "kind") data.kind = value;
          else data.config.set(key, value);
        }
      }
      continue;
    }

    if (!headerSeen) {
      if (line !== CSV_COLUMNS.join(",")) {
        throw new CsvFormatError(`unexpected header: ${line}`);
      }
      headerSeen = true;
      continue;
    }

    const cells = line.split(",");
    if (cells.length !== CSV_COLUMNS.length) {
      throw new CsvFormatError(`expected ${CSV_COLUMNS.length} cells, got ${cells.length}: ${line}`);
    }
    data.rows.push({
      sweepVar: parseNumberCell(cells[0], line) ?? NaN,
      bits: parseBits(cells[1], line),
      estimator: cells[2],
      rmseDeg: parseNumberCell(cells[3], line),
      crlbSqrtDeg: parseNumberCell(cells[4], line),
      etaDb: parseNumberCell(cells[5], line),
      trials: parseNumberCell(cells[6], line) ?? 0,
      failures: parseNumberCell(cells[7], line) ?? 0,
    });
  }

  if (!headerSeen) throw new CsvFormatError("no CSV header found");
  return data;
}

/** Label helper: bits rendered the same way the CSV encodes them. */
export function formatBits(bits: number): string {
  return Number.isFinite(bits) ? String(bits) : "inf";
}
