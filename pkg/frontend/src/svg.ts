/** Minimal deterministic SVG scene builder: fixed canvas, fixed fonts,
 * no timestamps or randomness, so identical inputs give identical bytes. */

export interface Scale {
  (value: number): number;
  ticks(): number[];
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  const fn = ((v: number) => outLo + ((v - lo) / span) * (outHi - outLo)) as Scale;
  fn.ticks = () => {
    const step = niceStep(span / 5);
    const first = Math.ceil(lo / step) * step;
    const out: number[] = [];
    for (let t = first; t <= hi + 1e-12 * Math.abs(span); t += step) {
      out.push(Number(t.toPrecision(12)));
    }
    return out;
  };
  return fn;
}

export function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo || 1;
  const fn = ((v: number) => outLo + ((Math.log10(v) - llo) / span) * (outHi - outLo)) as Scale;
  fn.ticks = () => {
    const out: number[] = [];
    for (let d = Math.ceil(llo - 1e-12); d <= lhi + 1e-12; d += 1) {
      out.push(Number(Math.pow(10, d).toPrecision(12)));
    }
    return out;
  };
  return fn;
}

function niceStep(rough: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const norm = rough / mag;
  const nice = norm < 1.5 ? 1 : norm < 3.5 ? 2 : norm < 7.5 ? 5 : 10;
  return nice * mag;
}

export function fmtTick(v: number): string {
  if (v !== 0 && (Math.abs(v) < 1e-3 || Math.abs(v) >= 1e4)) {
    return v.toExponential(0).replace("e+", "e").replace("e-", "e-");
  }
  return Number(v.toPrecision(6)).toString();
}

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

export function seriesColor(index: number): string {
  return PALETTE[index % PALETTE.length];
}

export const MARKERS = ["circle", "square", "diamond", "triangle", "cross"] as const;
export type Marker = (typeof MARKERS)[number];

export class Svg {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
    metadata: Record<string, string>
  ) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`
    );
    const meta = Object.entries(metadata)
      .map(([k, v]) => `${k}=${v}`)
      .join(" ");
    this.parts.push(`<metadata>${escapeXml(meta)}</metadata>`);
    this.parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  }

  raw(fragment: string): void {
    this.parts.push(fragment);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, opts = ""): void {
    this.parts.push(
      `<line x1="${r(x1)}" y1="${r(y1)}" x2="${r(x2)}" y2="${r(y2)}" stroke="${stroke}" ${opts}/>`
    );
  }

  path(points: Array<[number, number]>, stroke: string, opts = ""): void {
    const d = points
      .map(([x, y], i) => `${i === 0 ? "M" : "L"}${r(x)} ${r(y)}`)
      .join(" ");
    this.parts.push(`<path d="${d}" fill="none" stroke="${stroke}" ${opts}/>`);
  }

  marker(kind: Marker, x: number, y: number, color: string, size = 3.2): void {
    const s = size;
    switch (kind) {
      case "circle":
        this.parts.push(`<circle cx="${r(x)}" cy="${r(y)}" r="${s}" fill="${color}" fill-opacity="0.75"/>`);
        break;
      case "square":
        this.parts.push(
          `<rect x="${r(x - s)}" y="${r(y - s)}" width="${r(2 * s)}" height="${r(2 * s)}" fill="${color}" fill-opacity="0.75"/>`
        );
        break;
      case "diamond":
        this.parts.push(
          `<path d="M${r(x)} ${r(y - 1.3 * s)} L${r(x + 1.3 * s)} ${r(y)} L${r(x)} ${r(y + 1.3 * s)} L${r(x - 1.3 * s)} ${r(y)} Z" fill="${color}" fill-opacity="0.75"/>`
        );
        break;
      case "triangle":
        this.parts.push(
          `<path d="M${r(x)} ${r(y - 1.2 * s)} L${r(x + 1.2 * s)} ${r(y + s)} L${r(x - 1.2 * s)} ${r(y + s)} Z" fill="${color}" fill-opacity="0.75"/>`
        );
        break;
      case "cross":
        this.parts.push(
          `<path d="M${r(x - s)} ${r(y - s)} L${r(x + s)} ${r(y + s)} M${r(x - s)} ${r(y + s)} L${r(x + s)} ${r(y - s)}" stroke="${color}" stroke-width="1.5"/>`
        );
        break;
    }
  }

  text(x: number, y: number, content: string, opts = ""): void {
    this.parts.push(`<text x="${r(x)}" y="${r(y)}" font-size="11" ${opts}>${escapeXml(content)}</text>`);
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function r(v: number): string {
  return Number(v.toFixed(2)).toString();
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
