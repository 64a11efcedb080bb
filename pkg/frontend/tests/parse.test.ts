import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { describe, expect, it } from "vitest";

import {
  parseDiagnostics,
  parseRawCsv,
  parseResultsDocument,
  readRawCsv,
  readResultsDocument,
} from "../src/parse.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

describe("results document parsing", () => {
  it("loads a full sensitivity report", () => {
    const doc = readResultsDocument(join(FIXTURES, "sens_results.json"));
    expect(doc.config.p_grid).toEqual([0.01, 0.05, 0.1, 0.2, 0.25]);
    expect(doc.pooled).toHaveLength(5);
    expect(doc.naive.ci[0]).toBeLessThan(doc.naive.ci[1]);
  });

  it("rejects documents without a naive estimate", () => {
    expect(() => parseResultsDocument(JSON.stringify({ schema_version: 1 }))).toThrow(
      /config.p_grid/,
    );
  });

  it("rejects malformed intervals", () => {
    const doc = JSON.parse(
      JSON.stringify({
        schema_version: 1,
        config: { p_grid: [0.1] },
        naive: { value: 1, ci: [0, 2] },
        pooled: [{ p_bar: 0.1, ci: [2, 1] }],
      }),
    );
    expect(() => parseResultsDocument(JSON.stringify(doc))).toThrow(/malformed interval/);
  });
});

describe("raw estimate CSV parsing", () => {
  it("reads every replicate row", () => {
    const rows = readRawCsv(join(FIXTURES, "sens_raw.csv"));
    expect(rows).toHaveLength(5 * 100);
    expect(rows[0]).toMatchObject({ network: 0, replicate: 0 });
  });

  it("rejects unexpected headers", () => {
    expect(() => parseRawCsv("a,b\n1,2\n")).toThrow(/expected header/);
  });

  it("rejects non-numeric cells", () => {
    expect(() =>
      parseRawCsv("p_bar,network,replicate,estimate,std_error\n0.1,0,0,oops,1\n"),
    ).toThrow(/non-numeric/);
  });
});

describe("diagnostics parsing", () => {
  it("requires the observed density", () => {
    expect(() => parseDiagnostics("{}")).toThrow(/observed_density/);
  });

  it("accepts an observed-only document", () => {
    const doc = parseDiagnostics(JSON.stringify({ observed_density: 0.2 }));
    expect(doc.imputed_densities).toBeUndefined();
  });
});
