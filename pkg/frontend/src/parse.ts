import { readFileSync } from "node:fs";

import type { DiagnosticsDocument, RawEstimateRow, ResultsDocument } from "./types.js";

function fail(path: string, reason: string): never {
  throw new Error(`${path}: ${reason}`);
}

export function parseResultsDocument(text: string, path = "<results>"): ResultsDocument {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (error) {
    fail(path, `not valid JSON (${(error as Error).message})`);
  }
  const record = doc as Partial<ResultsDocument>;
  if (typeof record.schema_version !== "number") fail(path, "missing schema_version");
  if (!record.config || !Array.isArray(record.config.p_grid) || record.config.p_grid.length === 0)
    fail(path, "missing config.p_grid");
  if (!record.naive || typeof record.naive.value !== "number")
    fail(path, "missing naive estimate");
  if (!Array.isArray(record.naive.ci) || record.naive.ci.length !== 2)
    fail(path, "naive.ci must be a two-number interval");
  if (!Array.isArray(record.pooled) || record.pooled.length === 0)
    fail(path, "missing pooled records");
  for (const pooled of record.pooled) {
    if (!Array.isArray(pooled.ci) || pooled.ci.length !== 2 || pooled.ci[0] > pooled.ci[1])
      fail(path, `pooled record at p_bar=${pooled.p_bar} has a malformed interval`);
  }
  return record as ResultsDocument;
}

export function readResultsDocument(path: string): ResultsDocument {
  return parseResultsDocument(readFileSync(path, "utf8"), path);
}

const RAW_HEADER = "p_bar,network,replicate,estimate,std_error";

export function parseRawCsv(text: string, path = "<raw>"): RawEstimateRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) fail(path, "empty raw-estimate table");
  if (lines[0] !== RAW_HEADER) fail(path, `expected header '${RAW_HEADER}'`);
  return lines.slice(1).map((line, index) => {
    const parts = line.split(",");
    if (parts.length !== 5) fail(path, `malformed row on line ${index + 2}`);
    const [pBar, network, replicate, estimate, stdError] = parts.map(Number);
    if ([pBar, network, replicate, estimate, stdError].some((value) => !Number.isFinite(value)))
      fail(path, `non-numeric value on line ${index + 2}`);
    return { pBar, network, replicate, estimate, stdError };
  });
}

export function readRawCsv(path: string): RawEstimateRow[] {
  return parseRawCsv(readFileSync(path, "utf8"), path);
}

export function parseDiagnostics(text: string, path = "<diagnostics>"): DiagnosticsDocument {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (error) {
    fail(path, `not valid JSON (${(error as Error).message})`);
  }
  const record = doc as Partial<DiagnosticsDocument>;
  if (typeof record.observed_density !== "number")
    fail(path, "missing observed_density; run the diagnostics command first");
  return record as DiagnosticsDocument;
}

export function readDiagnostics(path: string): DiagnosticsDocument {
  return parseDiagnostics(readFileSync(path, "utf8"), path);
}
