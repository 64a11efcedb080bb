import { existsSync, writeFileSync } from "node:fs";

import { buildDensityFigure, buildSensitivityFigure } from "./model.js";
import { readDiagnostics, readRawCsv, readResultsDocument } from "./parse.js";
import { renderDensitySvg, renderSensitivitySvg } from "./svg.js";

const USAGE = `usage:
  render sensitivity --results <results.json> [--raw <raw.csv>] --out <figure.svg>
  render density --diagnostics <diagnostics.json> --out <figure.svg>
options: --width <px> --height <px>`;

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let index = 0; index < argv.length; index += 2) {
    const key = argv[index];
    const value = argv[index + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new Error(`malformed arguments near '${key}'\n${USAGE}`);
    }
    flags.set(key.slice(2), value);
  }
  return flags;
}

function size(flags: Map<string, string>): { width?: number; height?: number } {
  const options: { width?: number; height?: number } = {};
  if (flags.has("width")) options.width = Number(flags.get("width"));
  if (flags.has("height")) options.height = Number(flags.get("height"));
  return options;
}

export function renderSensitivityFile(
  resultsPath: string,
  rawPath: string | null,
  outPath: string,
  options: { width?: number; height?: number } = {},
): string[] {
  const results = readResultsDocument(resultsPath);
  const rawRows = rawPath !== null && existsSync(rawPath) ? readRawCsv(rawPath) : null;
  const model = buildSensitivityFigure(results, rawRows);
  writeFileSync(outPath, renderSensitivitySvg(model, options));
  return model.warnings;
}

export function renderDensityFile(
  diagnosticsPath: string,
  outPath: string,
  options: { width?: number; height?: number } = {},
): string[] {
  const diagnostics = readDiagnostics(diagnosticsPath);
  const model = buildDensityFigure(diagnostics);
  writeFileSync(outPath, renderDensitySvg(model, options));
  return model.warnings;
}

export function run(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command === undefined) {
    process.stderr.write(USAGE + "\n");
    return 2;
  }
  const flags = parseFlags(rest);
  const out = flags.get("out");
  if (out === undefined) throw new Error(`--out is required\n${USAGE}`);

  let warnings: string[];
  if (command === "sensitivity") {
    const results = flags.get("results");
    if (results === undefined) throw new Error(`--results is required\n${USAGE}`);
    warnings = renderSensitivityFile(results, flags.get("raw") ?? null, out, size(flags));
  } else if (command === "density") {
    const diagnostics = flags.get("diagnostics");
    if (diagnostics === undefined) throw new Error(`--diagnostics is required\n${USAGE}`);
    warnings = renderDensityFile(diagnostics, out, size(flags));
  } else {
    throw new Error(`unknown command '${command}'\n${USAGE}`);
  }
  for (const warning of warnings) {
    process.stderr.write(`warning: ${warning}\n`);
  }
  process.stderr.write(`wrote ${out}\n`);
  return 0;
}

if (process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "")) {
  try {
    process.exit(run(process.argv.slice(2)));
  } catch (error) {
    process.stderr.write(`error: ${(error as Error).message}\n`);
    process.exit(1);
  }
}
