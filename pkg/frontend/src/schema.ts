import { z } from "zod";

/** Raised when an input file does not match the expected layout. */
export class SchemaError extends Error {}

const time = z.number().finite().nonnegative();
const count = z.number().int().nonnegative();

export const CWND_COLUMNS = ["time_s", "cwnd_segments", "ssthresh_segments"] as const;
export const DELAY_COLUMNS = ["enqueue_time_s", "delay_s"] as const;
export const QUEUE_COLUMNS = ["time_s", "occupancy_pkts", "occupancy_bytes", "drops_cum"] as const;
export const PACKET_COLUMNS = ["time_s", "wire_bytes", "direction"] as const;
export const COMPARISON_COLUMNS = [
  "variant", "buffer", "wow_mean_delay_s", "wow_drops", "ftp_goodput_bps",
] as const;

export const cwndRow = z.object({
  time_s: time,
  cwnd_segments: z.number().finite().positive(),
  ssthresh_segments: z.number().finite().positive(),
}).strict();

export const delayRow = z.object({
  enqueue_time_s: time,
  delay_s: z.number().finite().nonnegative(),
}).strict();

export const queueRow = z.object({
  time_s: time,
  occupancy_pkts: count,
  occupancy_bytes: count,
  drops_cum: count,
}).strict();

export const packetRow = z.object({
  time_s: time,
  wire_bytes: z.number().int().positive(),
  direction: z.enum(["uplink", "downlink"]),
}).strict();

export const comparisonRow = z.object({
  variant: z.enum(["sack", "new_reno", "vegas"]),
  buffer: z.number().int().positive(),
  wow_mean_delay_s: z.number().finite().nonnegative(),
  wow_drops: count,
  ftp_goodput_bps: z.number().finite().nonnegative(),
}).strict();

export type CwndRow = z.infer<typeof cwndRow>;
export type DelayRow = z.infer<typeof delayRow>;
export type QueueRow = z.infer<typeof queueRow>;
export type PacketRow = z.infer<typeof packetRow>;
export type ComparisonRow = z.infer<typeof comparisonRow>;

/**
 * Check a parsed CSV header against the expected column list.
 * Order does not matter; any missing or unknown column is an error
 * naming that column.
 */
export function checkHeader(
  source: string,
  actual: readonly string[],
  expected: readonly string[],
): void {
  for (const col of expected) {
    if (!actual.includes(col)) {
      throw new SchemaError(`${source}: missing column ${col}`);
    }
  }
  for (const col of actual) {
    if (!expected.includes(col)) {
      throw new SchemaError(`${source}: unknown column ${col}`);
    }
  }
}
