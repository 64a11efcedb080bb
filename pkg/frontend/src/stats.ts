/** Box-plot statistics: the only numbers this layer computes itself. */

export interface BoxStats {
  q1: number;
  median: number;
  q3: number;
  whiskerLow: number;
  whiskerHigh: number;
}

/** Linear-interpolation quantile (the common "type 7" definition). */
export function quantile(sorted: number[], q: number): number {
  if (sorted.length === 0) throw new Error("quantile of an empty sample");
  if (q < 0 || q > 1) throw new Error(`quantile level ${q} outside [0, 1]`);
  const position = (sorted.length - 1) * q;
  const lower = Math.floor(position);
  const upper = Math.ceil(position);
  if (lower === upper) return sorted[lower];
  const weight = position - lower;
  return sorted[lower] * (1 - weight) + sorted[upper] * weight;
}

/** Tukey box: quartiles plus whiskers at the most extreme points within 1.5 IQR. */
export function boxStats(values: number[]): BoxStats {
  if (values.length === 0) throw new Error("box statistics of an empty sample");
  const sorted = [...values].sort((a, b) => a - b);
  const q1 = quantile(sorted, 0.25);
  const median = quantile(sorted, 0.5);
  const q3 = quantile(sorted, 0.75);
  const reach = 1.5 * (q3 - q1);
  const low = sorted.find((v) => v >= q1 - reach) ?? sorted[0];
  const high = [...sorted].reverse().find((v) => v <= q3 + reach) ?? sorted[sorted.length - 1];
  return { q1, median, q3, whiskerLow: low, whiskerHigh: high };
}
