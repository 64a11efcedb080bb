import { describe, expect, it } from "vitest";

import { boxStats, quantile } from "../src/stats.js";

describe("quantile", () => {
  it("interpolates linearly between order statistics", () => {
    const sorted = [1, 2, 3, 4];
    expect(quantile(sorted, 0.25)).toBeCloseTo(1.75, 12);
    expect(quantile(sorted, 0.5)).toBeCloseTo(2.5, 12);
    expect(quantile(sorted, 0.75)).toBeCloseTo(3.25, 12);
  });

  it("returns the endpoints at 0 and 1", () => {
    expect(quantile([5, 9, 12], 0)).toBe(5);
    expect(quantile([5, 9, 12], 1)).toBe(12);
  });

  it("rejects empty samples and bad levels", () => {
    expect(() => quantile([], 0.5)).toThrow(/empty/);
    expect(() => quantile([1], 1.5)).toThrow(/outside/);
  });
});

describe("boxStats", () => {
  it("computes quartiles and clamps whiskers to 1.5 IQR", () => {
    const stats = boxStats([100, 1, 2, 3, 4]);
    expect(stats.q1).toBe(2);
    expect(stats.median).toBe(3);
    expect(stats.q3).toBe(4);
    expect(stats.whiskerLow).toBe(1);
    expect(stats.whiskerHigh).toBe(4); // 100 sits beyond q3 + 1.5*IQR
  });

  it("collapses on constant samples", () => {
    const stats = boxStats([2, 2, 2]);
    expect(stats).toEqual({ q1: 2, median: 2, q3: 2, whiskerLow: 2, whiskerHigh: 2 });
  });
});
