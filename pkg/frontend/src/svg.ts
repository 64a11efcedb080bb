/** SVG rendering of the figure models.
 *
 * Pure string assembly: the same model always renders to the same bytes, and
 * every visual element carries a class attribute so structure can be checked
 * mechanically.
 */

import type { DensityFigureModel, SensitivityFigureModel } from "./model.js";

export interface RenderOptions {
  width?: number;
  height?: number;
}

const MARGIN = { top: 30, right: 20, bottom: 46, left: 64 };

function fmt(value: number): string {
  return value.toFixed(2);
}

class LinearScale {
  constructor(
    private readonly domainLow: number,
    private readonly domainHigh: number,
    private readonly rangeLow: number,
    private readonly rangeHigh: number,
  ) {}

  apply(value: number): number {
    const span = this.domainHigh - this.domainLow;
    const t = span === 0 ? 0.5 : (value - this.domainLow) / span;
    return this.rangeLow + t * (this.rangeHigh - this.rangeLow);
  }
}

function yTicks(low: number, high: number, count = 5): number[] {
  const ticks: number[] = [];
  for (let index = 0; index < count; index += 1) {
    ticks.push(low + ((high - low) * index) / (count - 1));
  }
  return ticks;
}

export function renderSensitivitySvg(
  model: SensitivityFigureModel,
  options: RenderOptions = {},
): string {
  const panelWidth = 150;
  const width = options.width ?? MARGIN.left + MARGIN.right + panelWidth * model.panels.length;
  const height = options.height ?? 420;
  const innerHeight = height - MARGIN.top - MARGIN.bottom;

  const valuePool = [0, model.naive.ciLow, model.naive.ciHigh, model.naive.value];
  for (const panel of model.panels) {
    valuePool.push(panel.mean, panel.ciLow, panel.ciHigh);
    if (panel.box !== null) valuePool.push(panel.box.whiskerLow, panel.box.whiskerHigh);
  }
  const low = Math.min(...valuePool);
  const high = Math.max(...valuePool);
  const pad = (high - low || 1) * 0.08;
  const y = new LinearScale(low - pad, high + pad, height - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" class="sensitivity-figure">`,
  );
  parts.push(`<rect class="background" x="0" y="0" width="${width}" height="${height}" fill="white"/>`);

  parts.push(`<g class="y-axis">`);
  for (const tick of yTicks(low - pad, high + pad)) {
    const ty = fmt(y.apply(tick));
    parts.push(
      `<line x1="${MARGIN.left - 6}" y1="${ty}" x2="${MARGIN.left}" y2="${ty}" stroke="black"/>` +
        `<text x="${MARGIN.left - 10}" y="${ty}" text-anchor="end" dominant-baseline="middle" ` +
        `font-size="11">${tick.toFixed(2)}</text>`,
    );
  }
  parts.push(`</g>`);

  model.panels.forEach((panel, index) => {
    const x0 = MARGIN.left + index * panelWidth;
    const x1 = x0 + panelWidth;
    const cx = (x0 + x1) / 2;
    const classes = panel.box === null ? "panel pooled-only" : "panel";
    parts.push(`<g class="${classes}" data-p-bar="${panel.pBar}" data-n-estimates="${panel.nEstimates}">`);

    const bandTop = fmt(y.apply(model.naive.ciHigh));
    const bandBottom = y.apply(model.naive.ciLow);
    parts.push(
      `<rect class="naive-band" x="${fmt(x0)}" y="${bandTop}" width="${fmt(panelWidth)}" ` +
        `height="${fmt(bandBottom - y.apply(model.naive.ciHigh))}" fill="#9ecae1" opacity="0.35"/>`,
    );
    parts.push(
      `<line class="naive-line" x1="${fmt(x0)}" y1="${fmt(y.apply(model.naive.value))}" ` +
        `x2="${fmt(x1)}" y2="${fmt(y.apply(model.naive.value))}" stroke="#1f77b4" stroke-dasharray="5,3"/>`,
    );
    parts.push(
      `<line class="zero-line" x1="${fmt(x0)}" y1="${fmt(y.apply(0))}" x2="${fmt(x1)}" ` +
        `y2="${fmt(y.apply(0))}" stroke="black"/>`,
    );

    if (panel.box !== null) {
      const box = panel.box;
      const boxWidth = panelWidth * 0.4;
      const bx = cx - boxWidth / 2;
      parts.push(
        `<line class="whisker" x1="${fmt(cx)}" y1="${fmt(y.apply(box.whiskerLow))}" ` +
          `x2="${fmt(cx)}" y2="${fmt(y.apply(box.q1))}" stroke="black"/>`,
      );
      parts.push(
        `<line class="whisker" x1="${fmt(cx)}" y1="${fmt(y.apply(box.q3))}" ` +
          `x2="${fmt(cx)}" y2="${fmt(y.apply(box.whiskerHigh))}" stroke="black"/>`,
      );
      parts.push(
        `<rect class="box" x="${fmt(bx)}" y="${fmt(y.apply(box.q3))}" width="${fmt(boxWidth)}" ` +
          `height="${fmt(Math.max(y.apply(box.q1) - y.apply(box.q3), 0.5))}" ` +
          `fill="#fdbe85" stroke="black"/>`,
      );
      parts.push(
        `<line class="median-line" x1="${fmt(bx)}" y1="${fmt(y.apply(box.median))}" ` +
          `x2="${fmt(bx + boxWidth)}" y2="${fmt(y.apply(box.median))}" stroke="black"/>`,
      );
    }

    for (const bound of [panel.ciLow, panel.ciHigh]) {
      const by = y.apply(bound);
      parts.push(
        `<path class="ci-whisker" d="M ${fmt(cx - 6)} ${fmt(by)} L ${fmt(cx + 6)} ${fmt(by)} ` +
          `L ${fmt(cx)} ${fmt(by + (bound === panel.ciLow ? 8 : -8))} Z" fill="#2ca02c"/>`,
      );
    }
    parts.push(
      `<circle class="mean-marker" cx="${fmt(cx)}" cy="${fmt(y.apply(panel.mean))}" r="4" fill="#d62728"/>`,
    );
    parts.push(
      `<text class="panel-label" x="${fmt(cx)}" y="${fmt(height - MARGIN.bottom + 24)}" ` +
        `text-anchor="middle" font-size="12">diffusion parameter ${panel.pBar}</text>`,
    );
    parts.push(`</g>`);
  });

  parts.push(`</svg>`);
  return parts.join("\n") + "\n";
}

export function renderDensitySvg(model: DensityFigureModel, options: RenderOptions = {}): string {
  const width = options.width ?? 420;
  const height = options.height ?? 320;
  const x = new LinearScale(-0.15, 1.15, MARGIN.left, width - MARGIN.right);
  const y = new LinearScale(0, 1, height - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" class="density-figure">`,
  );
  parts.push(`<rect class="background" x="0" y="0" width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<g class="x-axis"><line x1="${fmt(x.apply(-0.1))}" y1="${fmt(y.apply(0))}" ` +
      `x2="${fmt(x.apply(1.1))}" y2="${fmt(y.apply(0))}" stroke="black"/>` +
      `<text x="${fmt(x.apply(0))}" y="${fmt(y.apply(0) + 18)}" text-anchor="middle" font-size="11">0</text>` +
      `<text x="${fmt(x.apply(1))}" y="${fmt(y.apply(0) + 18)}" text-anchor="middle" font-size="11">1</text></g>`,
  );
  for (const curve of model.curves) {
    const color = curve.kind === "observed" ? "#1f77b4" : "#d62728";
    const points = curve.points
      .map((point) => `${fmt(x.apply(point.x))},${fmt(y.apply(point.y))}`)
      .join(" ");
    parts.push(
      `<polyline class="density-curve ${curve.kind}" data-label="${curve.label}" ` +
        `points="${points}" fill="none" stroke="${color}" opacity="${curve.kind === "observed" ? 1 : 0.4}"/>`,
    );
  }
  parts.push(
    `<g class="legend"><text x="${fmt(width - MARGIN.right)}" y="${MARGIN.top}" text-anchor="end" ` +
      `font-size="11" fill="#1f77b4">observed</text>` +
      `<text x="${fmt(width - MARGIN.right)}" y="${MARGIN.top + 14}" text-anchor="end" ` +
      `font-size="11" fill="#d62728">imputed</text></g>`,
  );
  parts.push(`</svg>`);
  return parts.join("\n") + "\n";
}
