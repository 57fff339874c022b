import { readFileSync } from "node:fs";
import Papa from "papaparse";
import type { ZodType } from "zod";
import { SchemaError, checkHeader } from "./schema.js";

/**
 * Read a CSV file and validate it row by row.
 *
 * The header must contain exactly the expected columns. A file with a
 * header and no data rows is valid and returns an empty array; figure
 * builders treat that as "empty axes plus a warning", not an error.
 */
export function readCsv<T>(
  path: string,
  columns: readonly string[],
  row: ZodType<T>,
): T[] {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, unknown>>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new SchemaError(`${path}: ${first.message}`);
  }
  checkHeader(path, parsed.meta.fields ?? [], columns);
  return parsed.data.map((raw, i) => {
    const checked = row.safeParse(raw);
    if (!checked.success) {
      const issue = checked.error.issues[0]!;
      const column = issue.path.join(".") || "(row)";
      throw new SchemaError(`${path}: row ${i + 2}: column ${column}: ${issue.message}`);
    }
    return checked.data;
  });
}
