import { SweepTable, SweepRow, checkSchema } from "./csv.js";
import {
  MARKERS,
  Scale,
  Svg,
  fmtTick,
  linearScale,
  logScale,
  seriesColor,
} from "./svg.js";

/** Euler-Mascheroni constant; reference overlays are evaluated from it
 * analytically at plot time rather than read from any CSV. */
export const EULER_GAMMA = 0.5772156649015329;
export const ONE_MINUS_GAMMA = 1 - EULER_GAMMA;

/** Universal localization curve (1-gamma)(xi-1)/(xi+1). */
export function universalCurve(xi: number): number {
  return (ONE_MINUS_GAMMA * (xi - 1)) / (xi + 1);
}

export interface FigureSpec {
  fig: number;
  inputs: SweepTable[];
  /** Override the figure's canonical axis scaling (fig 2: log x;
   * figs 3-4: log-log; fig 1: linear). */
  logX?: boolean;
  logY?: boolean;
}

function pickScale(
  log: boolean,
  values: number[],
  outLo: number,
  outHi: number
): Scale {
  if (log) {
    const [lo, hi] = logExtent(values);
    return logScale(lo, hi, outLo, outHi);
  }
  return linearScale(...extent(values), outLo, outHi);
}

const W = 640;
const H = 480;

interface Panel {
  x0: number;
  x1: number;
  y0: number; // top
  y1: number; // bottom
}

function drawAxes(
  svg: Svg,
  panel: Panel,
  xs: Scale,
  ys: Scale,
  xLabel: string,
  yLabel: string
): void {
  svg.line(panel.x0, panel.y1, panel.x1, panel.y1, "black");
  svg.line(panel.x0, panel.y0, panel.x0, panel.y1, "black");
  for (const t of xs.ticks()) {
    const px = xs(t);
    if (px < panel.x0 - 0.5 || px > panel.x1 + 0.5) continue;
    svg.line(px, panel.y1, px, panel.y1 + 4, "black");
    svg.text(px, panel.y1 + 16, fmtTick(t), 'text-anchor="middle"');
  }
  for (const t of ys.ticks()) {
    const py = ys(t);
    if (py < panel.y0 - 0.5 || py > panel.y1 + 0.5) continue;
    svg.line(panel.x0 - 4, py, panel.x0, py, "black");
    svg.text(panel.x0 - 7, py + 3.5, fmtTick(t), 'text-anchor="end"');
  }
  svg.text((panel.x0 + panel.x1) / 2, panel.y1 + 32, xLabel, 'text-anchor="middle"');
  svg.raw(
    `<text x="14" y="${(panel.y0 + panel.y1) / 2}" font-size="11" text-anchor="middle" ` +
      `transform="rotate(-90 14 ${(panel.y0 + panel.y1) / 2})">${yLabel}</text>`
  );
}

function extent(values: number[], padFrac = 0.05): [number, number] {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const pad = (hi - lo || Math.abs(hi) || 1) * padFrac;
  return [lo - pad, hi + pad];
}

function logExtent(values: number[]): [number, number] {
  const pos = values.filter((v) => v > 0);
  const lo = Math.min(...pos);
  const hi = Math.max(...pos);
  return [lo / 1.3, hi * 1.3];
}

function groupBy(rows: SweepRow[], key: string): Map<number, SweepRow[]> {
  const out = new Map<number, SweepRow[]>();
  for (const row of rows) {
    const v = row[key] as number;
    if (!out.has(v)) out.set(v, []);
    out.get(v)!.push(row);
  }
  return new Map([...out.entries()].sort((a, b) => a[0] - b[0]));
}

function metadataFor(spec: FigureSpec): Record<string, string> {
  const meta: Record<string, string> = { figure: String(spec.fig) };
  spec.inputs.forEach((t, i) => {
    meta[`input${i}`] = `sha256:${t.inputHash}`;
  });
  return meta;
}

/** Gap and fluctuations versus the base coupling, one marker per n0;
 * horizontal reference at 1-gamma. */
function renderFig1(spec: FigureSpec): string {
  const svg = new Svg(W, H, metadataFor(spec));
  const rows = spec.inputs.flatMap((t) => t.rows);
  const top: Panel = { x0: 64, x1: W - 16, y0: 20, y1: H / 2 - 24 };
  const bottom: Panel = { x0: 64, x1: W - 16, y0: H / 2 + 16, y1: H - 56 };

  const lam = rows.map((r) => r.lambda0 as number);
  const xs = linearScale(...extent(lam), top.x0, top.x1);
  const gaps = rows.map((r) => r.gap as number);
  const ysTop = linearScale(
    Math.min(0, ...gaps),
    Math.max(ONE_MINUS_GAMMA * 1.15, ...gaps),
    top.y1,
    top.y0
  );
  drawAxes(svg, top, xs, ysTop, "", "s_dec - mean s_D");
  const yRef = ysTop(ONE_MINUS_GAMMA);
  svg.line(top.x0, yRef, top.x1, yRef, "#555", 'stroke-dasharray="6 4"');
  svg.text(top.x1 - 4, yRef - 5, `1-gamma = ${ONE_MINUS_GAMMA.toFixed(5)}`, 'text-anchor="end" fill="#555"');

  const flucts = rows.map((r) => r.fluct as number);
  const ysBot = linearScale(...extent([0, ...flucts]), bottom.y1, bottom.y0);
  drawAxes(svg, bottom, xs, ysBot, "lambda0", "fluctuations");

  let idx = 0;
  for (const [n0, group] of groupBy(rows, "n0")) {
    const color = seriesColor(idx);
    const mark = MARKERS[idx % MARKERS.length];
    const sorted = [...group].sort(
      (a, b) => (a.lambda0 as number) - (b.lambda0 as number)
    );
    for (const row of sorted) {
      svg.marker(mark, xs(row.lambda0 as number), ysTop(row.gap as number), color);
      svg.marker(mark, xs(row.lambda0 as number), ysBot(row.fluct as number), color);
    }
    svg.marker(mark, top.x0 + 12, top.y0 + 12 + idx * 14, color);
    svg.text(top.x0 + 22, top.y0 + 16 + idx * 14, `n0 = ${n0}`);
    idx += 1;
  }
  return svg.render();
}

/** Gap versus IPR with the universal curve and the 1-gamma asymptote. */
function renderFig2(spec: FigureSpec): string {
  const svg = new Svg(W, H, metadataFor(spec));
  const panel: Panel = { x0: 64, x1: W - 16, y0: 20, y1: H - 56 };
  const rows = spec.inputs.flatMap((t) => t.rows);
  const xis = rows.map((r) => r.xi as number);
  const [xLo, xHi] = logExtent([1, ...xis]);
  const xs =
    spec.logX === false
      ? linearScale(...extent([1, ...xis]), panel.x0, panel.x1)
      : logScale(Math.max(xLo, 0.8), Math.max(xHi, 10), panel.x0, panel.x1);
  const gaps = rows.map((r) => r.gap as number);
  const ys = linearScale(
    Math.min(0, ...gaps),
    Math.max(ONE_MINUS_GAMMA * 1.15, ...gaps),
    panel.y1,
    panel.y0
  );
  drawAxes(svg, panel, xs, ys, "xi (IPR)", "s_dec - mean s_D");

  const yRef = ys(ONE_MINUS_GAMMA);
  svg.line(panel.x0, yRef, panel.x1, yRef, "#555", 'stroke-dasharray="6 4"');
  svg.text(panel.x1 - 4, yRef - 5, `1-gamma = ${ONE_MINUS_GAMMA.toFixed(5)}`, 'text-anchor="end" fill="#555"');

  // analytic overlay evaluated on a dense log grid
  const curve: Array<[number, number]> = [];
  const lo = Math.log10(Math.max(xLo, 0.999999));
  const hi = Math.log10(Math.max(xHi, 10));
  for (let i = 0; i <= 240; i++) {
    const xi = Math.pow(10, lo + ((hi - lo) * i) / 240);
    if (xi < 1) continue;
    curve.push([xs(xi), ys(universalCurve(xi))]);
  }
  svg.path(curve, "#0044cc", 'stroke-width="1.6"');

  spec.inputs.forEach((table, ti) => {
    const color = seriesColor(ti);
    const mark = MARKERS[ti % MARKERS.length];
    for (const row of table.rows) {
      svg.marker(mark, xs(row.xi as number), ys(row.gap as number), color);
    }
  });
  return svg.render();
}

/** Fluctuations versus IPR (log-log) with the 1/xi guide. */
function renderFig3(spec: FigureSpec): string {
  const svg = new Svg(W, H, metadataFor(spec));
  const panel: Panel = { x0: 72, x1: W - 16, y0: 20, y1: H - 56 };
  const rows = spec.inputs
    .flatMap((t) => t.rows)
    .filter((r) => (r.fluct as number) > 0 && (r.xi as number) >= 1);
  const xis = rows.map((r) => r.xi as number);
  const flucts = rows.map((r) => r.fluct as number);
  const [xLo, xHi] = logExtent([1, ...xis]);
  const [yLo, yHi] = logExtent(flucts);
  const xs =
    spec.logX === false
      ? linearScale(...extent([1, ...xis]), panel.x0, panel.x1)
      : logScale(Math.max(xLo, 0.8), Math.max(xHi, 10), panel.x0, panel.x1);
  const ys =
    spec.logY === false
      ? linearScale(...extent([0, ...flucts]), panel.y1, panel.y0)
      : logScale(yLo, Math.max(yHi, 1), panel.y1, panel.y0);
  drawAxes(svg, panel, xs, ys, "xi (IPR)", "relative fluctuations of s_D");

  const guide: Array<[number, number]> = [];
  for (let i = 0; i <= 200; i++) {
    const xi = Math.pow(10, Math.log10(Math.max(xLo, 1)) + (Math.log10(xHi) - Math.log10(Math.max(xLo, 1))) * (i / 200));
    const g = 1 / xi;
    if (g < yLo || g > Math.max(yHi, 1)) continue;
    guide.push([xs(xi), ys(g)]);
  }
  svg.path(guide, "#0044cc", 'stroke-dasharray="6 4" stroke-width="1.6"');
  svg.text(xs(xHi) - 6, ys(1 / xHi) - 8, "1/xi", 'text-anchor="end" fill="#0044cc"');

  spec.inputs.forEach((table, ti) => {
    const color = seriesColor(ti);
    const mark = MARKERS[ti % MARKERS.length];
    for (const row of table.rows) {
      const f = row.fluct as number;
      if (f > 0) svg.marker(mark, xs(row.xi as number), ys(f), color);
    }
  });
  return svg.render();
}

/** IPR versus quench amplitude (log-log), one polyline per lambda0. */
function renderFig4(spec: FigureSpec): string {
  const svg = new Svg(W, H, metadataFor(spec));
  const panel: Panel = { x0: 72, x1: W - 16, y0: 20, y1: H - 56 };
  const rows = spec.inputs
    .flatMap((t) => t.rows)
    .filter((r) => (r.delta_lambda as number) > 0);
  const dls = rows.map((r) => r.delta_lambda as number);
  const xis = rows.map((r) => r.xi as number);
  const xs = pickScale(spec.logX !== false, dls, panel.x0, panel.x1);
  const ys = pickScale(spec.logY !== false, [1, ...xis], panel.y1, panel.y0);
  drawAxes(svg, panel, xs, ys, "delta lambda", "xi (IPR)");

  let idx = 0;
  for (const [lam0, group] of groupBy(rows, "lambda0")) {
    const color = seriesColor(idx);
    const mark = MARKERS[idx % MARKERS.length];
    const sorted = [...group].sort(
      (a, b) => (a.delta_lambda as number) - (b.delta_lambda as number)
    );
    const pts: Array<[number, number]> = sorted.map((row) => [
      xs(row.delta_lambda as number),
      ys(row.xi as number),
    ]);
    svg.path(pts, color, 'stroke-width="1"');
    for (const [px, py] of pts) svg.marker(mark, px, py, color);
    svg.marker(mark, panel.x0 + 12, panel.y0 + 12 + idx * 14, color);
    svg.text(panel.x0 + 22, panel.y0 + 16 + idx * 14, `lambda0 = ${lam0}`);
    idx += 1;
  }
  return svg.render();
}

const RENDERERS: Record<number, (spec: FigureSpec) => string> = {
  1: renderFig1,
  2: renderFig2,
  3: renderFig3,
  4: renderFig4,
};

/** Render a figure to an SVG string; throws SchemaError on bad input. */
export function render(spec: FigureSpec): string {
  for (const table of spec.inputs) {
    checkSchema(table, spec.fig);
  }
  const renderer = RENDERERS[spec.fig];
  return renderer(spec);
}
