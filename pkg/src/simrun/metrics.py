"""Measurement collection, summary statistics, and output serialization.

All timestamps cross the boundary as integer nanoseconds and are printed
as fixed 9-decimal seconds, so output files are byte-stable across runs
and platforms.
"""

import hashlib
import json
import math
import statistics
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import ConfigError
from .kernel import NS_PER_S


def format_time_ns(t_ns: int) -> str:
    """Render integer nanoseconds as seconds with exactly 9 decimals."""
    if t_ns < 0:
        return "-" + format_time_ns(-t_ns)
    return f"{t_ns // NS_PER_S}.{t_ns % NS_PER_S:09d}"


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


class MetricsRecorder:
    """Accumulates traces during a run; writers below turn them into files."""

    def __init__(self, packet_log: bool = False):
        self.packet_log = packet_log
        self.window_traces: Dict[str, List[Tuple[int, float, float]]] = {}
        self.delay_samples: Dict[str, List[Tuple[int, int]]] = {}
        self.queue_traces: Dict[str, List[Tuple[int, int, int, int]]] = {}
        self.packets: List[Tuple[int, int, str]] = []

    def record_window(self, flow: str, t_ns: int, cwnd: float,
                      ssthresh: float) -> None:
        self.window_traces.setdefault(flow, []).append((t_ns, cwnd, ssthresh))

    def window_hook(self, flow: str):
        self.window_traces.setdefault(flow, [])
        return lambda t_ns, cwnd, ssthresh: self.record_window(
            flow, t_ns, cwnd, ssthresh)

    def record_delay(self, flow: str, t_enqueued_ns: int, wait_ns: int) -> None:
        if wait_ns < 0:
            raise ConfigError("negative queuing delay sample")
        self.delay_samples.setdefault(flow, []).append((t_enqueued_ns, wait_ns))

    def record_queue(self, name: str, t_ns: int, occupancy_pkts: int,
                     occupancy_bytes: int, drops_cum: int) -> None:
        self.queue_traces.setdefault(name, []).append(
            (t_ns, occupancy_pkts, occupancy_bytes, drops_cum))

    def queue_hook(self, name: str):
        self.queue_traces.setdefault(name, [])
        return lambda t_ns, pkts, nbytes, drops: self.record_queue(
            name, t_ns, pkts, nbytes, drops)

    def record_packet(self, t_ns: int, wire_bytes: int, direction: str) -> None:
        if self.packet_log:
            self.packets.append((t_ns, wire_bytes, direction))


def summarize_samples(samples: Iterable[Tuple[int, int]], t0_ns: int,
                      t1_ns: int) -> dict:
    """Mean/median/p95 (nearest-rank) of waits whose enqueue time is in [t0, t1)."""
    if t1_ns <= t0_ns:
        raise ConfigError("measurement window must have positive length")
    waits = sorted(w for t, w in samples if t0_ns <= t < t1_ns)
    n = len(waits)
    if n == 0:
        return {"count": 0, "mean_s": None, "median_s": None, "p95_s": None}
    rank = max(1, math.ceil(0.95 * n))
    return {
        "count": n,
        "mean_s": statistics.mean(waits) / NS_PER_S,
        "median_s": statistics.median(waits) / NS_PER_S,
        "p95_s": waits[rank - 1] / NS_PER_S,
    }


def analytic_delay_oracle(window_segments: float, wire_bytes: int,
                          rate_bps: int, base_rtt_s: float) -> float:
    """Steady-state queuing delay of a window-limited sender on one bottleneck.

    With W segments in flight the cycle time is max(RTT, W*T_s); the excess
    W*T_s - RTT, when positive, is time spent queued.
    """
    if window_segments <= 0 or wire_bytes <= 0 or rate_bps <= 0:
        raise ConfigError("oracle arguments must be positive")
    ts = wire_bytes * 8.0 / rate_bps
    return max(0.0, window_segments * ts - base_rtt_s)


def time_weighted_mean(points: Iterable[Tuple[int, float]], t0_ns: int,
                       t1_ns: int) -> Optional[float]:
    """Mean of a right-continuous step function over [t0, t1)."""
    if t1_ns <= t0_ns:
        raise ConfigError("measurement window must have positive length")
    pts = list(points)
    value = None
    for t, v in pts:
        if t <= t0_ns:
            value = v
        else:
            break
    inside = [(t, v) for t, v in pts if t0_ns < t < t1_ns]
    if value is None:
        if not inside:
            return None
        origin = inside[0][0]
    else:
        origin = t0_ns
    acc = 0.0
    cur_t, cur_v = origin, value
    for t, v in inside:
        if cur_v is not None:
            acc += cur_v * (t - cur_t)
        cur_t, cur_v = t, v
    acc += cur_v * (t1_ns - cur_t)
    return acc / (t1_ns - origin)


def _write_lines(path: str, header: str, rows: Iterable[str]) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")


def write_cwnd_csv(path: str, trace: List[Tuple[int, float, float]]) -> None:
    _write_lines(path, "time_s,cwnd_segments,ssthresh_segments",
                 (f"{format_time_ns(t)},{cwnd!r},{ssthresh!r}"
                  for t, cwnd, ssthresh in trace))


def write_delay_csv(path: str, samples: List[Tuple[int, int]]) -> None:
    _write_lines(path, "enqueue_time_s,delay_s",
                 (f"{format_time_ns(t)},{format_time_ns(w)}"
                  for t, w in samples))


def write_queue_csv(path: str, trace: List[Tuple[int, int, int, int]]) -> None:
    _write_lines(path, "time_s,occupancy_pkts,occupancy_bytes,drops_cum",
                 (f"{format_time_ns(t)},{pkts},{nbytes},{drops}"
                  for t, pkts, nbytes, drops in trace))


def write_packets_csv(path: str, packets: List[Tuple[int, int, str]]) -> None:
    _write_lines(path, "time_s,wire_bytes,direction",
                 (f"{format_time_ns(t)},{wire},{direction}"
                  for t, wire, direction in packets))


def write_comparison_csv(path: str, rows: List[dict]) -> None:
    _write_lines(path, "variant,buffer,wow_mean_delay_s,wow_drops,ftp_goodput_bps",
                 (f"{r['variant']},{r['buffer']},{r['wow_mean_delay_s']!r},"
                  f"{r['wow_drops']},{r['ftp_goodput_bps']!r}"
                  for r in rows))


def write_json(path: str, obj: dict) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(json.dumps(obj, sort_keys=True, indent=2))
        fh.write("\n")
