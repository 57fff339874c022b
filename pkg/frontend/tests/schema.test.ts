import { describe, expect, it } from "vitest";
import {
  COMPARISON_COLUMNS,
  CWND_COLUMNS,
  SchemaError,
  checkHeader,
  comparisonRow,
  cwndRow,
  delayRow,
  packetRow,
  queueRow,
} from "../src/schema.js";

describe("checkHeader", () => {
  it("accepts the exact column set in any order", () => {
    checkHeader("x.csv", ["time_s", "cwnd_segments", "ssthresh_segments"], CWND_COLUMNS);
    checkHeader("x.csv", ["ssthresh_segments", "time_s", "cwnd_segments"], CWND_COLUMNS);
  });

  it("rejects an unknown column by name", () => {
    expect(() =>
      checkHeader("x.csv", [...CWND_COLUMNS, "extra_col"], CWND_COLUMNS),
    ).toThrowError(/unknown column extra_col/);
  });

  it("rejects a missing column by name", () => {
    expect(() =>
      checkHeader("x.csv", ["time_s", "cwnd_segments"], CWND_COLUMNS),
    ).toThrowError(/missing column ssthresh_segments/);
  });

  it("raises SchemaError specifically", () => {
    expect(() => checkHeader("x.csv", [], COMPARISON_COLUMNS)).toThrowError(SchemaError);
  });
});

describe("row schemas", () => {
  it("parses a cwnd row", () => {
    const row = cwndRow.parse({ time_s: 0.5, cwnd_segments: 2, ssthresh_segments: 64 });
    expect(row.cwnd_segments).toBe(2);
  });

  it("rejects negative time", () => {
    expect(() => cwndRow.parse({ time_s: -1, cwnd_segments: 2, ssthresh_segments: 64 })).toThrow();
  });

  it("rejects a non-numeric delay", () => {
    expect(() => delayRow.parse({ enqueue_time_s: 0, delay_s: "fast" })).toThrow();
  });

  it("rejects fractional queue occupancy", () => {
    expect(() =>
      queueRow.parse({ time_s: 0, occupancy_pkts: 1.5, occupancy_bytes: 0, drops_cum: 0 }),
    ).toThrow();
  });

  it("rejects an unknown packet direction", () => {
    expect(() => packetRow.parse({ time_s: 0, wire_bytes: 40, direction: "sideways" })).toThrow();
  });

  it("rejects an unknown comparison variant", () => {
    expect(() =>
      comparisonRow.parse({
        variant: "cubic",
        buffer: 200,
        wow_mean_delay_s: 0.1,
        wow_drops: 0,
        ftp_goodput_bps: 490000,
      }),
    ).toThrow();
  });

  it("accepts a full comparison row", () => {
    const row = comparisonRow.parse({
      variant: "vegas",
      buffer: 20,
      wow_mean_delay_s: 0.066,
      wow_drops: 0,
      ftp_goodput_bps: 492896,
    });
    expect(row.buffer).toBe(20);
  });
});
