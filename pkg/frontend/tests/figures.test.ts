import { describe, expect, it } from "vitest";
import {
  cdfFigure,
  cwndFigure,
  delayBarsFigure,
  empiricalCdf,
  queueFigure,
} from "../src/figures.js";
import type { ComparisonRow, PacketRow } from "../src/schema.js";

// Delay means measured from a real shared-seed sweep; the exact values
// do not matter here, only the shape of the table.
const COMPARISON: ComparisonRow[] = [
  { variant: "sack", buffer: 200, wow_mean_delay_s: 1.353, wow_drops: 0, ftp_goodput_bps: 492896 },
  { variant: "sack", buffer: 20, wow_mean_delay_s: 0.214, wow_drops: 6, ftp_goodput_bps: 491728 },
  { variant: "new_reno", buffer: 200, wow_mean_delay_s: 1.353, wow_drops: 0, ftp_goodput_bps: 492896 },
  { variant: "new_reno", buffer: 20, wow_mean_delay_s: 0.189, wow_drops: 3, ftp_goodput_bps: 492896 },
  { variant: "vegas", buffer: 200, wow_mean_delay_s: 0.066, wow_drops: 0, ftp_goodput_bps: 492896 },
  { variant: "vegas", buffer: 20, wow_mean_delay_s: 0.066, wow_drops: 0, ftp_goodput_bps: 492896 },
];

function barHeights(svg: string): Map<string, number> {
  const heights = new Map<string, number>();
  const pattern = /class="bar variant-(\w+) buffer-(\d+)"[^>]*height="([\d.]+)"/g;
  for (const m of svg.matchAll(pattern)) {
    heights.set(`${m[1]}_${m[2]}`, Number(m[3]));
  }
  return heights;
}

describe("delayBarsFigure", () => {
  it("draws six bars for the full sweep", () => {
    const { svg } = delayBarsFigure(COMPARISON);
    expect(barHeights(svg).size).toBe(6);
  });

  it("keeps the vegas bar shortest in each buffer group", () => {
    const heights = barHeights(delayBarsFigure(COMPARISON).svg);
    for (const buffer of [200, 20]) {
      const vegas = heights.get(`vegas_${buffer}`)!;
      expect(vegas).toBeLessThan(heights.get(`sack_${buffer}`)!);
      expect(vegas).toBeLessThan(heights.get(`new_reno_${buffer}`)!);
    }
  });

  it("scales bar heights with the delay values", () => {
    const heights = barHeights(delayBarsFigure(COMPARISON).svg);
    const ratio = heights.get("sack_200")! / heights.get("sack_20")!;
    expect(ratio).toBeCloseTo(1.353 / 0.214, 1);
  });

  it("names every absent grid cell", () => {
    const partial = COMPARISON.filter(
      (r) => !(r.variant === "vegas" || (r.variant === "sack" && r.buffer === 20)),
    );
    expect(() => delayBarsFigure(partial)).toThrowError(
      /missing cells: sack_20, vegas_200, vegas_20/,
    );
  });

  it("rejects a duplicated cell", () => {
    expect(() => delayBarsFigure([...COMPARISON, COMPARISON[0]!])).toThrowError(
      /duplicate cell sack_200/,
    );
  });

  it("is deterministic", () => {
    expect(delayBarsFigure(COMPARISON).svg).toBe(delayBarsFigure(COMPARISON).svg);
  });
});

describe("cwndFigure", () => {
  const rows = [
    { time_s: 0, cwnd_segments: 2, ssthresh_segments: 64 },
    { time_s: 1, cwnd_segments: 4, ssthresh_segments: 64 },
    { time_s: 2, cwnd_segments: 8, ssthresh_segments: 64 },
  ];

  it("renders one panel per flow with a step path", () => {
    const { svg, warnings } = cwndFigure(
      [{ label: "ftp", rows }, { label: "wow up", rows }],
      "test",
    );
    expect(warnings).toEqual([]);
    expect(svg.match(/class="cwnd"/g)).toHaveLength(2);
    expect(svg).toContain("H ");
    expect(svg).toContain("V ");
  });

  it("renders empty axes with a warning for a header-only file", () => {
    const { svg, warnings } = cwndFigure([{ label: "ftp", rows: [] }], "test");
    expect(warnings).toEqual(["ftp: no cwnd samples, empty axes"]);
    expect(svg).toContain('class="axes"');
    expect(svg).not.toContain('class="cwnd"');
  });

  it("holds a converged trace flat out to the longest flow's end", () => {
    const short = [{ time_s: 0, cwnd_segments: 10, ssthresh_segments: 64 }];
    const long = [
      { time_s: 0, cwnd_segments: 2, ssthresh_segments: 64 },
      { time_s: 20, cwnd_segments: 40, ssthresh_segments: 64 },
    ];
    const { svg } = cwndFigure(
      [{ label: "ftp", rows: short }, { label: "wow up", rows: long }],
      "test",
    );
    const paths = [...svg.matchAll(/class="cwnd" d="([^"]+)"/g)].map((m) => m[1]!);
    const lastH = (d: string) => [...d.matchAll(/H ([\d.]+)/g)].at(-1)![1];
    expect(lastH(paths[0]!)).toBe(lastH(paths[1]!));
    expect(paths[0]!.endsWith(`H ${lastH(paths[1]!)}`)).toBe(true);
  });

  it("does not reorder the caller's rows", () => {
    const shuffled = [rows[2]!, rows[0]!, rows[1]!];
    cwndFigure([{ label: "ftp", rows: shuffled }], "test");
    expect(shuffled.map((r) => r.time_s)).toEqual([2, 0, 1]);
  });
});

describe("empiricalCdf", () => {
  it("gives a degenerate one-step CDF for a single sample", () => {
    expect(empiricalCdf([40])).toEqual([[40, 1]]);
  });

  it("accumulates ties into one step", () => {
    expect(empiricalCdf([40, 40, 100, 1500])).toEqual([
      [40, 0.5],
      [100, 0.75],
      [1500, 1],
    ]);
  });

  it("sorts unordered input without mutating it", () => {
    const values = [3, 1, 2];
    expect(empiricalCdf(values)).toEqual([[1, 1 / 3], [2, 2 / 3], [3, 1]]);
    expect(values).toEqual([3, 1, 2]);
  });
});

describe("cdfFigure", () => {
  it("succeeds on a single-packet trace", () => {
    const rows: PacketRow[] = [{ time_s: 0.5, wire_bytes: 40, direction: "uplink" }];
    const { svg, warnings } = cdfFigure(rows, "test");
    expect(svg).toContain('class="cdf uplink"');
    expect(warnings).toEqual(["uplink: fewer than 2 packets, no inter-packet times"]);
  });

  it("splits by direction in both panels", () => {
    const rows: PacketRow[] = [
      { time_s: 0.0, wire_bytes: 133, direction: "uplink" },
      { time_s: 0.155, wire_bytes: 133, direction: "uplink" },
      { time_s: 0.16, wire_bytes: 40, direction: "downlink" },
      { time_s: 0.35, wire_bytes: 314, direction: "downlink" },
    ];
    const { svg, warnings } = cdfFigure(rows, "test");
    expect(warnings).toEqual([]);
    expect(svg.match(/class="cdf uplink"/g)).toHaveLength(2);
    expect(svg.match(/class="cdf downlink"/g)).toHaveLength(2);
  });

  it("warns and draws empty axes when there are no packets", () => {
    const { svg, warnings } = cdfFigure([], "test");
    expect(warnings).toEqual(["no packets, empty axes"]);
    expect(svg).toContain('class="axes"');
  });
});

describe("queueFigure", () => {
  it("plots occupancy and notes the cumulative drops", () => {
    const rows = [
      { time_s: 0, occupancy_pkts: 1, occupancy_bytes: 1500, drops_cum: 0 },
      { time_s: 1, occupancy_pkts: 19, occupancy_bytes: 28500, drops_cum: 0 },
      { time_s: 2, occupancy_pkts: 20, occupancy_bytes: 30000, drops_cum: 3 },
    ];
    const { svg, warnings } = queueFigure(rows, "test");
    expect(warnings).toEqual([]);
    expect(svg).toContain('class="occupancy"');
    expect(svg).toContain("drops: 3");
  });

  it("warns on an empty trace", () => {
    const { warnings } = queueFigure([], "test");
    expect(warnings).toEqual(["no queue samples, empty axes"]);
  });
});
