/** Typed figure models, built from the analysis outputs before any drawing.
 *
 * Means and confidence intervals are read straight from the results document;
 * the raw replicate estimates only feed the box-plot statistics.
 */

import { boxStats, type BoxStats } from "./stats.js";
import type { DiagnosticsDocument, RawEstimateRow, ResultsDocument } from "./types.js";

export interface SensitivityPanel {
  pBar: number;
  mean: number;
  ciLow: number;
  ciHigh: number;
  nEstimates: number;
  box: BoxStats | null;
}

export interface SensitivityFigureModel {
  panels: SensitivityPanel[];
  naive: { value: number; ciLow: number; ciHigh: number };
  alpha: number;
  warnings: string[];
}

export function buildSensitivityFigure(
  results: ResultsDocument,
  rawRows: RawEstimateRow[] | null,
): SensitivityFigureModel {
  const warnings: string[] = [];
  const byPBar = new Map<number, number[]>();
  if (rawRows !== null) {
    for (const row of rawRows) {
      const bucket = byPBar.get(row.pBar);
      if (bucket === undefined) byPBar.set(row.pBar, [row.estimate]);
      else bucket.push(row.estimate);
    }
  } else {
    warnings.push("raw estimates unavailable: rendering pooled-only panels");
  }

  const panels = results.pooled.map((pooled) => {
    const estimates = byPBar.get(pooled.p_bar);
    if (rawRows !== null && estimates === undefined) {
      warnings.push(`no raw estimates for p_bar=${pooled.p_bar}: pooled-only panel`);
    }
    return {
      pBar: pooled.p_bar,
      mean: pooled.mean,
      ciLow: pooled.ci[0],
      ciHigh: pooled.ci[1],
      nEstimates: estimates?.length ?? 0,
      box: estimates === undefined ? null : boxStats(estimates),
    };
  });

  return {
    panels,
    naive: {
      value: results.naive.value,
      ciLow: results.naive.ci[0],
      ciHigh: results.naive.ci[1],
    },
    alpha: results.config.alpha,
    warnings,
  };
}

export interface DensityCurve {
  label: string;
  kind: "observed" | "imputed";
  /** Frequency of the link indicator at x = 0 (absent) and x = 1 (present). */
  points: [{ x: 0; y: number }, { x: 1; y: number }];
}

export interface DensityFigureModel {
  curves: DensityCurve[];
  warnings: string[];
}

function indicatorCurve(label: string, kind: "observed" | "imputed", density: number): DensityCurve {
  return {
    label,
    kind,
    points: [
      { x: 0, y: 1 - density },
      { x: 1, y: density },
    ],
  };
}

export function buildDensityFigure(diagnostics: DiagnosticsDocument): DensityFigureModel {
  const warnings: string[] = [];
  const curves: DensityCurve[] = [
    indicatorCurve("observed", "observed", diagnostics.observed_density),
  ];
  if (diagnostics.imputed_densities === undefined || diagnostics.imputed_densities.length === 0) {
    warnings.push("no imputed networks in the diagnostics: single observed curve");
  } else {
    diagnostics.imputed_densities.forEach((density, index) => {
      curves.push(indicatorCurve(`imputed ${index}`, "imputed", density));
    });
  }
  return { curves, warnings };
}
