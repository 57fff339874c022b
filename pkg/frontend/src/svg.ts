/**
 * Small deterministic SVG helpers. No randomness and fixed number
 * formatting, so the same data always yields byte-identical output.
 */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const MARGIN: Margin = { top: 34, right: 16, bottom: 46, left: 62 };

export function fmt(value: number): string {
  return value.toFixed(2);
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export class LinearScale {
  constructor(
    readonly d0: number,
    readonly d1: number,
    readonly r0: number,
    readonly r1: number,
  ) {}

  apply(v: number): number {
    if (this.d1 === this.d0) {
      return (this.r0 + this.r1) / 2;
    }
    return this.r0 + ((v - this.d0) / (this.d1 - this.d0)) * (this.r1 - this.r0);
  }
}

/** Round-valued ticks covering [min, max] using a 1-2-5 step ladder. */
export function niceTicks(min: number, max: number, target = 5): number[] {
  if (!(max > min)) {
    return [min];
  }
  const span = max - min;
  const rawStep = span / Math.max(1, target);
  const power = Math.floor(Math.log10(rawStep));
  const base = Math.pow(10, power);
  let step = base * 10;
  for (const mult of [1, 2, 5]) {
    if (base * mult >= rawStep) {
      step = base * mult;
      break;
    }
  }
  const ticks: number[] = [];
  const first = Math.ceil(min / step) * step;
  for (let v = first; v <= max + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function tickLabel(v: number): string {
  if (v === 0) {
    return "0";
  }
  const abs = Math.abs(v);
  if (abs >= 1000) {
    return v.toFixed(0);
  }
  if (abs >= 1) {
    return String(Number(v.toFixed(2)));
  }
  return String(Number(v.toFixed(4)));
}

export function group(transform: string, body: string): string {
  return `<g transform="${transform}">\n${body}\n</g>`;
}

export function text(
  x: number,
  y: number,
  content: string,
  attrs = "",
): string {
  return `<text x="${fmt(x)}" y="${fmt(y)}" ${attrs}>${escapeXml(content)}</text>`;
}

/**
 * Axes, tick marks and labels for one plot panel of size w x h in
 * local coordinates (origin at the panel's top-left inner corner).
 */
export function axes(
  sx: LinearScale,
  sy: LinearScale,
  w: number,
  h: number,
  xLabel: string,
  yLabel: string,
  xTicks: number[],
  yTicks: number[],
): string {
  const parts: string[] = [];
  parts.push(`<g class="axes" stroke="#333" fill="none">`);
  parts.push(`<path d="M 0 0 V ${fmt(h)} H ${fmt(w)}"/>`);
  for (const t of xTicks) {
    const x = sx.apply(t);
    parts.push(`<line x1="${fmt(x)}" y1="${fmt(h)}" x2="${fmt(x)}" y2="${fmt(h + 5)}"/>`);
  }
  for (const t of yTicks) {
    const y = sy.apply(t);
    parts.push(`<line x1="-5" y1="${fmt(y)}" x2="0" y2="${fmt(y)}"/>`);
  }
  parts.push(`</g>`);
  parts.push(`<g class="tick-labels" font-size="11" fill="#333">`);
  for (const t of xTicks) {
    const x = sx.apply(t);
    parts.push(text(x, h + 18, tickLabel(t), `text-anchor="middle"`));
  }
  for (const t of yTicks) {
    const y = sy.apply(t);
    parts.push(text(-9, y + 4, tickLabel(t), `text-anchor="end"`));
  }
  parts.push(`</g>`);
  parts.push(`<g class="axis-labels" font-size="12" fill="#111">`);
  parts.push(text(w / 2, h + 36, xLabel, `text-anchor="middle"`));
  parts.push(
    text(-46, h / 2, yLabel, `text-anchor="middle" transform="rotate(-90 ${fmt(-46)} ${fmt(h / 2)})"`),
  );
  parts.push(`</g>`);
  return parts.join("\n");
}

/**
 * Step-after path: hold each y until the next x. When extendToX lies
 * beyond the last sample the final value is held out to it, so a trace
 * that stopped changing early still spans the full axis.
 */
export function stepPath(
  xs: readonly number[],
  ys: readonly number[],
  sx: LinearScale,
  sy: LinearScale,
  extendToX?: number,
): string {
  if (xs.length === 0) {
    return "";
  }
  const parts = [`M ${fmt(sx.apply(xs[0]!))} ${fmt(sy.apply(ys[0]!))}`];
  for (let i = 1; i < xs.length; i++) {
    parts.push(`H ${fmt(sx.apply(xs[i]!))}`);
    parts.push(`V ${fmt(sy.apply(ys[i]!))}`);
  }
  if (extendToX !== undefined && extendToX > xs[xs.length - 1]!) {
    parts.push(`H ${fmt(sx.apply(extendToX))}`);
  }
  return parts.join(" ");
}

export function svgDocument(width: number, height: number, body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    body,
    `</svg>`,
    ``,
  ].join("\n");
}
