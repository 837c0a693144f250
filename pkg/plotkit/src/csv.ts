import Papa from "papaparse";

/** Raised when a CSV is missing the columns its figure kind requires. */
export class SchemaError extends Error {}

export interface QQRow {
  theoretical: number;
  observed: number;
}

export interface HistRow {
  bin_lo: number;
  bin_hi: number;
  count: number;
  overlay: number;
}

function parseRows(text: string, required: string[], label: string): Record<string, number>[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`${label} CSV failed to parse: ${first.message}`);
  }
  const fields = parsed.meta.fields ?? [];
  const missing = required.filter((c) => !fields.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${label} CSV is missing column(s) [${missing.join(", ")}]; ` +
        `found [${fields.join(", ")}]`
    );
  }
  return parsed.data.map((row, idx) => {
    const out: Record<string, number> = {};
    for (const col of required) {
      const v = Number(row[col]);
      if (!Number.isFinite(v)) {
        throw new SchemaError(
          `${label} CSV row ${idx + 2}: column ${col} is not numeric (${row[col]})`
        );
      }
      out[col] = v;
    }
    return out;
  });
}

export function readQQ(text: string): QQRow[] {
  const rows = parseRows(text, ["theoretical", "observed"], "qq");
  if (rows.length === 0) throw new SchemaError("qq CSV has no data rows");
  return rows.map((r) => ({ theoretical: r.theoretical, observed: r.observed }));
}

export function readHist(text: string): HistRow[] {
  const rows = parseRows(text, ["bin_lo", "bin_hi", "count", "overlay"], "hist");
  if (rows.length === 0) throw new SchemaError("hist CSV has no data rows");
  return rows.map((r) => ({
    bin_lo: r.bin_lo,
    bin_hi: r.bin_hi,
    count: r.count,
    overlay: r.overlay,
  }));
}
