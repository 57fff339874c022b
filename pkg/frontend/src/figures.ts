import {
  SchemaError,
  type ComparisonRow,
  type CwndRow,
  type PacketRow,
  type QueueRow,
} from "./schema.js";
import {
  LinearScale,
  MARGIN,
  axes,
  fmt,
  group,
  niceTicks,
  stepPath,
  svgDocument,
  text,
} from "./svg.js";

export interface Figure {
  svg: string;
  warnings: string[];
}

export interface CwndTrace {
  label: string;
  rows: CwndRow[];
}

const PLOT_W = 440;
const PLOT_H = 220;
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

const VARIANTS = ["sack", "new_reno", "vegas"] as const;
const BUFFERS = [200, 20] as const;

function panelAt(ox: number, oy: number, body: string): string {
  return group(`translate(${fmt(ox)},${fmt(oy)})`, body);
}

function title(width: number, content: string): string {
  return text(width / 2, 20, content, `text-anchor="middle" font-size="14" font-weight="bold" fill="#111"`);
}

function emptyAxes(xLabel: string, yLabel: string): string {
  const sx = new LinearScale(0, 1, 0, PLOT_W);
  const sy = new LinearScale(0, 1, PLOT_H, 0);
  return axes(sx, sy, PLOT_W, PLOT_H, xLabel, yLabel, [0, 1], [0, 1]);
}

/**
 * Congestion-window step plot, one panel per flow. The solid line is
 * cwnd and the dashed line ssthresh, both in segments.
 */
export function cwndFigure(traces: CwndTrace[], heading: string): Figure {
  const warnings: string[] = [];
  const tMax = Math.max(0, ...traces.flatMap((t) => t.rows.map((r) => r.time_s)));
  const panels: string[] = [];
  traces.forEach((trace, i) => {
    const oy = MARGIN.top + i * (PLOT_H + MARGIN.bottom + MARGIN.top);
    let body: string;
    if (trace.rows.length === 0) {
      warnings.push(`${trace.label}: no cwnd samples, empty axes`);
      body = emptyAxes("time (s)", "window (segments)");
    } else {
      const rows = [...trace.rows].sort((a, b) => a.time_s - b.time_s);
      const yMax = Math.max(
        ...rows.map((r) => Math.max(r.cwnd_segments, r.ssthresh_segments)),
      );
      const sx = new LinearScale(0, tMax || 1, 0, PLOT_W);
      const sy = new LinearScale(0, yMax * 1.05, PLOT_H, 0);
      const times = rows.map((r) => r.time_s);
      const cwnd = stepPath(times, rows.map((r) => r.cwnd_segments), sx, sy, tMax);
      const ssthresh = stepPath(times, rows.map((r) => r.ssthresh_segments), sx, sy, tMax);
      body = [
        axes(sx, sy, PLOT_W, PLOT_H, "time (s)", "window (segments)",
          niceTicks(0, tMax || 1), niceTicks(0, yMax * 1.05)),
        `<path class="cwnd" d="${cwnd}" fill="none" stroke="${COLORS[i % COLORS.length]}" stroke-width="1.5"/>`,
        `<path class="ssthresh" d="${ssthresh}" fill="none" stroke="#999" stroke-width="1" stroke-dasharray="4 3"/>`,
      ].join("\n");
    }
    body += "\n" + text(PLOT_W - 6, 14, trace.label, `text-anchor="end" font-size="12" fill="#111"`);
    panels.push(panelAt(MARGIN.left, oy, body));
  });
  const width = MARGIN.left + PLOT_W + MARGIN.right;
  const height = Math.max(1, traces.length) * (PLOT_H + MARGIN.bottom + MARGIN.top);
  const svg = svgDocument(width, height, [title(width, heading), ...panels].join("\n"));
  return { svg, warnings };
}

/**
 * Grouped bar chart of game-flow mean queuing delay: one x position
 * per bulk-flow TCP variant, one bar per uplink buffer size.
 *
 * All six (variant, buffer) cells must be present exactly once;
 * anything missing is reported by name.
 */
export function delayBarsFigure(rows: ComparisonRow[]): Figure {
  const byCell = new Map<string, ComparisonRow>();
  for (const row of rows) {
    const key = `${row.variant}_${row.buffer}`;
    if (byCell.has(key)) {
      throw new SchemaError(`comparison data: duplicate cell ${key}`);
    }
    byCell.set(key, row);
  }
  const missing: string[] = [];
  for (const variant of VARIANTS) {
    for (const buffer of BUFFERS) {
      if (!byCell.has(`${variant}_${buffer}`)) {
        missing.push(`${variant}_${buffer}`);
      }
    }
  }
  if (missing.length > 0) {
    throw new SchemaError(`comparison data: missing cells: ${missing.join(", ")}`);
  }

  const yMax = Math.max(...rows.map((r) => r.wow_mean_delay_s)) * 1.15;
  const sy = new LinearScale(0, yMax, PLOT_H, 0);
  const groupWidth = PLOT_W / VARIANTS.length;
  const barWidth = groupWidth / (BUFFERS.length + 1);

  const bars: string[] = [];
  VARIANTS.forEach((variant, vi) => {
    BUFFERS.forEach((buffer, bi) => {
      const row = byCell.get(`${variant}_${buffer}`)!;
      const x = vi * groupWidth + barWidth * (0.5 + bi);
      const y = sy.apply(row.wow_mean_delay_s);
      const h = PLOT_H - y;
      bars.push(
        `<rect class="bar variant-${variant} buffer-${buffer}" x="${fmt(x)}" y="${fmt(y)}" width="${fmt(barWidth)}" height="${fmt(h)}" fill="${bi === 0 ? COLORS[0] : COLORS[1]}"/>`,
      );
      bars.push(
        text(x + barWidth / 2, y - 4, row.wow_mean_delay_s.toFixed(3),
          `text-anchor="middle" font-size="10" fill="#333"`),
      );
    });
    bars.push(
      text(vi * groupWidth + groupWidth / 2, PLOT_H + 18, variant,
        `text-anchor="middle" font-size="12" fill="#333"`),
    );
  });

  const sx = new LinearScale(0, 1, 0, PLOT_W);
  const body = [
    axes(sx, sy, PLOT_W, PLOT_H, "bulk-flow TCP variant", "game mean delay (s)",
      [], niceTicks(0, yMax)),
    ...bars,
    `<g class="legend" font-size="11">`,
    `<rect x="${fmt(PLOT_W - 130)}" y="0" width="12" height="12" fill="${COLORS[0]}"/>`,
    text(PLOT_W - 114, 10, "200-packet buffer", `fill="#333"`),
    `<rect x="${fmt(PLOT_W - 130)}" y="18" width="12" height="12" fill="${COLORS[1]}"/>`,
    text(PLOT_W - 114, 28, "20-packet buffer", `fill="#333"`),
    `</g>`,
  ].join("\n");

  const width = MARGIN.left + PLOT_W + MARGIN.right;
  const height = MARGIN.top + PLOT_H + MARGIN.bottom;
  const svg = svgDocument(width, height, [
    title(width, "Game-flow queuing delay by variant and buffer"),
    panelAt(MARGIN.left, MARGIN.top, body),
  ].join("\n"));
  return { svg, warnings: [] };
}

/**
 * Empirical CDF points for a sample: unique sorted values paired with
 * the cumulative fraction of samples at or below each. A single sample
 * gives the degenerate one-step CDF [[value, 1]].
 */
export function empiricalCdf(values: readonly number[]): Array<[number, number]> {
  const sorted = [...values].sort((a, b) => a - b);
  const points: Array<[number, number]> = [];
  for (let i = 0; i < sorted.length; i++) {
    const v = sorted[i]!;
    const frac = (i + 1) / sorted.length;
    if (points.length > 0 && points[points.length - 1]![0] === v) {
      points[points.length - 1]![1] = frac;
    } else {
      points.push([v, frac]);
    }
  }
  return points;
}

function cdfPanel(
  series: Array<{ label: string; values: number[]; color: string }>,
  xLabel: string,
): string {
  const drawn = series.filter((s) => s.values.length > 0);
  if (drawn.length === 0) {
    return emptyAxes(xLabel, "cumulative fraction");
  }
  const xMax = Math.max(...drawn.flatMap((s) => s.values));
  const sx = new LinearScale(0, xMax || 1, 0, PLOT_W);
  const sy = new LinearScale(0, 1, PLOT_H, 0);
  const parts = [
    axes(sx, sy, PLOT_W, PLOT_H, xLabel, "cumulative fraction",
      niceTicks(0, xMax || 1), [0, 0.25, 0.5, 0.75, 1]),
  ];
  drawn.forEach((s, i) => {
    const points = empiricalCdf(s.values);
    const xs = [points[0]![0], ...points.map((p) => p[0])];
    const ys = [0, ...points.map((p) => p[1])];
    const d = stepPath(xs, ys, sx, sy);
    parts.push(`<path class="cdf ${s.label}" d="${d}" fill="none" stroke="${s.color}" stroke-width="1.5"/>`);
    parts.push(text(PLOT_W - 6, 14 + i * 14, s.label, `text-anchor="end" font-size="11" fill="${s.color}"`));
  });
  return parts.join("\n");
}

/**
 * Two-panel figure: packet-size CDF and inter-packet-time CDF, one
 * line per traffic direction.
 */
export function cdfFigure(rows: PacketRow[], heading: string): Figure {
  const warnings: string[] = [];
  const directions = ["uplink", "downlink"] as const;
  const sizes: Array<{ label: string; values: number[]; color: string }> = [];
  const iats: Array<{ label: string; values: number[]; color: string }> = [];
  directions.forEach((dir, i) => {
    const sub = rows
      .filter((r) => r.direction === dir)
      .sort((a, b) => a.time_s - b.time_s);
    if (sub.length === 0) {
      return;
    }
    const color = COLORS[i % COLORS.length]!;
    sizes.push({ label: dir, values: sub.map((r) => r.wire_bytes), color });
    const gaps: number[] = [];
    for (let k = 1; k < sub.length; k++) {
      gaps.push(sub[k]!.time_s - sub[k - 1]!.time_s);
    }
    if (gaps.length === 0) {
      warnings.push(`${dir}: fewer than 2 packets, no inter-packet times`);
    }
    iats.push({ label: dir, values: gaps, color });
  });
  if (sizes.length === 0) {
    warnings.push("no packets, empty axes");
  }

  const panelSpan = MARGIN.left + PLOT_W + MARGIN.right;
  const body = [
    panelAt(MARGIN.left, MARGIN.top, cdfPanel(sizes, "packet size (bytes)")),
    panelAt(panelSpan + MARGIN.left, MARGIN.top, cdfPanel(iats, "inter-packet time (s)")),
  ].join("\n");
  const width = panelSpan * 2;
  const height = MARGIN.top + PLOT_H + MARGIN.bottom;
  const svg = svgDocument(width, height, [title(width, heading), body].join("\n"));
  return { svg, warnings };
}

/**
 * Queue occupancy step plot with the cumulative drop count noted in
 * the corner.
 */
export function queueFigure(rows: QueueRow[], heading: string): Figure {
  const warnings: string[] = [];
  let body: string;
  if (rows.length === 0) {
    warnings.push("no queue samples, empty axes");
    body = emptyAxes("time (s)", "occupancy (packets)");
  } else {
    const sorted = [...rows].sort((a, b) => a.time_s - b.time_s);
    const tMax = sorted[sorted.length - 1]!.time_s;
    const yMax = Math.max(...sorted.map((r) => r.occupancy_pkts));
    const sx = new LinearScale(0, tMax || 1, 0, PLOT_W);
    const sy = new LinearScale(0, (yMax || 1) * 1.05, PLOT_H, 0);
    const d = stepPath(
      sorted.map((r) => r.time_s),
      sorted.map((r) => r.occupancy_pkts),
      sx,
      sy,
    );
    const drops = sorted[sorted.length - 1]!.drops_cum;
    body = [
      axes(sx, sy, PLOT_W, PLOT_H, "time (s)", "occupancy (packets)",
        niceTicks(0, tMax || 1), niceTicks(0, (yMax || 1) * 1.05)),
      `<path class="occupancy" d="${d}" fill="none" stroke="${COLORS[0]}" stroke-width="1"/>`,
      text(PLOT_W - 6, 14, `drops: ${drops}`, `text-anchor="end" font-size="12" fill="#333"`),
    ].join("\n");
  }
  const width = MARGIN.left + PLOT_W + MARGIN.right;
  const height = MARGIN.top + PLOT_H + MARGIN.bottom;
  const svg = svgDocument(width, height, [
    title(width, heading),
    panelAt(MARGIN.left, MARGIN.top, body),
  ].join("\n"));
  return { svg, warnings };
}
