"""Run orchestration: build a scenario, simulate it, summarize, emit files.

A run owns its kernel, topology, RNG streams, and probes, so multiple runs
(e.g. sweep cells) can execute in separate processes with no shared state.
"""

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from ._version import __version__
from .config import ScenarioConfig, load_traffic_params, parse_scenario
from .errors import ConfigError, SimulationError
from .kernel import Kernel, NS_PER_S, s_to_ticks
from .metrics import (MetricsRecorder, file_sha256, summarize_samples,
                      time_weighted_mean, write_comparison_csv, write_cwnd_csv,
                      write_delay_csv, write_json, write_packets_csv,
                      write_queue_csv)
from .netstack import UPLINK, build_dumbbell
from .tcp import TcpFlow
from .traffic import ApduSource, FtpSource, MixtureDistribution

MANIFEST_FORMAT = "simrun-manifest-v1"

SWEEP_CELLS = (("sack", 200), ("sack", 20), ("new_reno", 200),
               ("new_reno", 20), ("vegas", 200), ("vegas", 20))


def make_rng(seed: int, purpose: str) -> np.random.Generator:
    """Independent substream per (seed, purpose); stable across runs and cells."""
    entropy = [seed] + list(purpose.encode("ascii"))
    return np.random.default_rng(np.random.SeedSequence(entropy))


@dataclass
class RunResult:
    summary: dict
    out_dir: Optional[str]
    recorder: MetricsRecorder
    kernel: Kernel
    topology: object
    flows: Dict[str, TcpFlow]
    sources: dict


def _empty_delay() -> dict:
    return {"count": 0, "mean_s": None, "median_s": None, "p95_s": None}


def run_scenario(cfg: ScenarioConfig, seed: Optional[int] = None,
                 out_dir: Optional[str] = None,
                 pre_run_hook: Optional[Callable] = None) -> RunResult:
    """Simulate one scenario and (optionally) write its result bundle."""
    if seed is None:
        seed = cfg.seed
    kernel = Kernel()
    topo = build_dumbbell(
        kernel,
        uplink_rate_bps=cfg.uplink_rate_bps,
        downlink_rate_bps=cfg.downlink_rate_bps,
        lan_rate_bps=cfg.lan_rate_bps,
        one_way_delay_s=cfg.one_way_delay_s,
        uplink_buffer_pkts=cfg.uplink_buffer_pkts,
        downlink_buffer_pkts=cfg.downlink_buffer_pkts,
        lan_delay_s=cfg.lan_delay_s,
        access_delay_s=cfg.access_delay_s,
    )
    recorder = MetricsRecorder(packet_log=cfg.packet_log)

    def uplink_delay_probe(packet, wait_ns):
        # the measured population: data packets crossing the uplink queue
        if not packet.header.is_ack:
            recorder.record_delay(packet.flow, packet.t_enqueued, wait_ns)

    topo.uplink_iface.on_delay = uplink_delay_probe
    topo.uplink_queue.probe = recorder.queue_hook("uplink")
    topo.downlink_queue.probe = recorder.queue_hook("downlink")
    if cfg.packet_log:
        home = topo.nodes["home"]
        home.on_packet = lambda pkt: recorder.record_packet(
            kernel.now, pkt.wire_bytes, pkt.direction)

    pid_counter = itertools.count()

    def next_pid() -> int:
        return next(pid_counter)

    flows: Dict[str, TcpFlow] = {}
    sources: dict = {}

    wow_cfg = cfg.flow_by_role("wow")
    if wow_cfg is not None:
        params = load_traffic_params(cfg.traffic_params_path)
        up = TcpFlow(kernel, "wow_up", "wow", topo.nodes["wow_client"],
                     topo.nodes["wow_server"], variant=wow_cfg.tcp_variant,
                     data_direction=UPLINK, next_pid=next_pid,
                     adv_window=wow_cfg.adv_window_segments,
                     on_window=recorder.window_hook("wow_up"))
        down = TcpFlow(kernel, "wow_down", "wow", topo.nodes["wow_server"],
                       topo.nodes["wow_client"], variant=wow_cfg.tcp_variant,
                       data_direction="downlink", next_pid=next_pid,
                       adv_window=wow_cfg.adv_window_segments,
                       on_window=recorder.window_hook("wow_down"))
        flows["wow_up"] = up
        flows["wow_down"] = down
        sources["wow_client"] = ApduSource(
            kernel, up.sender,
            MixtureDistribution(params["client"]["apdu_bytes"],
                                make_rng(seed, "wow.client.size")),
            MixtureDistribution(params["client"]["iat_s"],
                                make_rng(seed, "wow.client.iat")),
            start_s=wow_cfg.start_s, name="wow-client-source")
        sources["wow_server"] = ApduSource(
            kernel, down.sender,
            MixtureDistribution(params["server"]["apdu_bytes"],
                                make_rng(seed, "wow.server.size")),
            MixtureDistribution(params["server"]["iat_s"],
                                make_rng(seed, "wow.server.iat")),
            start_s=wow_cfg.start_s, name="wow-server-source")

    ftp_cfg = cfg.flow_by_role("ftp")
    if ftp_cfg is not None:
        ftp = TcpFlow(kernel, "ftp", "ftp", topo.nodes["ftp_client"],
                      topo.nodes["ftp_server"], variant=ftp_cfg.tcp_variant,
                      data_direction=UPLINK, next_pid=next_pid,
                      adv_window=ftp_cfg.adv_window_segments,
                      on_window=recorder.window_hook("ftp"))
        flows["ftp"] = ftp
        sources["ftp"] = FtpSource(kernel, ftp.sender, start_s=ftp_cfg.start_s)

    duration_ns = s_to_ticks(cfg.duration_s)
    t0_ns = s_to_ticks(cfg.measurement_window[0])
    t1_ns = min(s_to_ticks(cfg.measurement_window[1]), duration_ns)
    snapshots = {"t0": {}, "t1": {}}

    def snap(which):
        def _take(_arg):
            for name, flow in flows.items():
                snapshots[which][name] = flow.sender.snd_una
        return _take

    kernel.schedule(t0_ns, snap("t0"), None, kind="measurement-window-edge")
    kernel.schedule(t1_ns, snap("t1"), None, kind="measurement-window-edge")

    if pre_run_hook is not None:
        pre_run_hook(kernel, topo, flows, sources)

    stats = kernel.run_until(duration_ns)

    window_len_s = (t1_ns - t0_ns) / NS_PER_S
    flows_summary = {}
    for name, flow in flows.items():
        sender = flow.sender
        if flow.data_direction == UPLINK:
            samples = recorder.delay_samples.get(flow.packet_flow, [])
            delay = summarize_samples(samples, t0_ns, t1_ns)
        else:
            delay = _empty_delay()
        acked_window = (snapshots["t1"].get(name, sender.snd_una)
                        - snapshots["t0"].get(name, 0))
        trace = recorder.window_traces.get(name, [])
        mean_cwnd = time_weighted_mean(((t, c) for t, c, _ in trace),
                                       t0_ns, t1_ns)
        flows_summary[name] = {
            "variant": sender.variant,
            "delay": delay,
            "bytes_acked_window": acked_window,
            "bytes_acked_total": sender.snd_una,
            "goodput_bps": acked_window * 8.0 / window_len_s,
            "mean_cwnd_segments": mean_cwnd,
            "retransmitted_segments": sender.retransmitted_total,
            "timeouts": sender.timeouts_total,
            "fast_recoveries": sender.fast_recoveries_total,
        }

    queues_summary = {}
    for qname in ("uplink", "downlink"):
        q = topo.queues[qname]
        queues_summary[qname] = {
            "capacity_pkts": q.capacity_pkts,
            "max_occupancy_pkts": q.max_occupancy,
            "accepted_total": q.accepted_total,
            "dequeued_total": q.dequeued_total,
            "drops_total": q.dropped_total,
            "drops_by_flow": dict(sorted(q.drops_by_flow.items())),
        }

    traffic_summary = {}
    for sname, src in sources.items():
        if isinstance(src, ApduSource):
            traffic_summary[sname] = {"messages": src.messages,
                                      "app_bytes_offered": src.bytes_offered}
        else:
            traffic_summary[sname] = {"app_bytes_granted": src.bytes_granted}

    summary = {
        "seed": seed,
        "config": cfg.to_dict(),
        "measurement_window_ns": [t0_ns, t1_ns],
        "flows": flows_summary,
        "queues": queues_summary,
        "traffic": traffic_summary,
        "kernel": {"events_processed": stats.processed,
                   "final_clock_ns": stats.clock},
    }

    if out_dir is not None:
        _write_bundle(out_dir, cfg, seed, recorder, flows, summary)

    return RunResult(summary=summary, out_dir=out_dir, recorder=recorder,
                     kernel=kernel, topology=topo, flows=flows,
                     sources=sources)


def _write_bundle(out_dir: str, cfg: ScenarioConfig, seed: int,
                  recorder: MetricsRecorder, flows: Dict[str, TcpFlow],
                  summary: dict) -> None:
    os.makedirs(out_dir, exist_ok=True)
    written = []

    for name in sorted(flows):
        path = os.path.join(out_dir, f"cwnd_{name}.csv")
        write_cwnd_csv(path, recorder.window_traces.get(name, []))
        written.append(f"cwnd_{name}.csv")

    for name, flow in sorted(flows.items()):
        if flow.data_direction != UPLINK:
            continue
        path = os.path.join(out_dir, f"delay_{flow.packet_flow}.csv")
        write_delay_csv(path, recorder.delay_samples.get(flow.packet_flow, []))
        written.append(f"delay_{flow.packet_flow}.csv")

    for qname in ("uplink", "downlink"):
        path = os.path.join(out_dir, f"queue_{qname}.csv")
        write_queue_csv(path, recorder.queue_traces.get(qname, []))
        written.append(f"queue_{qname}.csv")

    if recorder.packet_log:
        write_packets_csv(os.path.join(out_dir, "packets.csv"),
                          recorder.packets)
        written.append("packets.csv")

    write_json(os.path.join(out_dir, "summary.json"), summary)
    written.append("summary.json")

    manifest = {
        "format": MANIFEST_FORMAT,
        "tool": "simrun",
        "version": __version__,
        "seed": seed,
        "scenario_sha256": cfg.sha256(),
        "outputs": {name: file_sha256(os.path.join(out_dir, name))
                    for name in sorted(written)},
    }
    write_json(os.path.join(out_dir, "manifest.json"), manifest)


def _comparison_row(summary: dict, variant: str, buffer_pkts: int) -> dict:
    wow = summary["flows"].get("wow_up")
    if wow is None:
        raise SimulationError("sweep scenarios need a wow flow")
    mean = wow["delay"]["mean_s"]
    if mean is None:
        raise SimulationError("no wow delay samples in the measurement window")
    drops = summary["queues"]["uplink"]["drops_by_flow"].get("wow", 0)
    ftp = summary["flows"].get("ftp")
    if ftp is None:
        raise SimulationError("sweep scenarios need an ftp flow")
    return {"variant": variant, "buffer": buffer_pkts,
            "wow_mean_delay_s": mean, "wow_drops": drops,
            "ftp_goodput_bps": ftp["goodput_bps"]}


def _cell_config(cfg: ScenarioConfig, variant: str, buffer_pkts: int) -> dict:
    raw = cfg.to_dict()
    raw["uplink_buffer_pkts"] = buffer_pkts
    for flow in raw["flows"]:
        if flow["role"] == "ftp":
            flow["tcp_variant"] = variant
    return raw


def _sweep_worker(args: tuple) -> dict:
    raw, seed, cell_dir, variant, buffer_pkts = args
    cfg = parse_scenario(raw)
    result = run_scenario(cfg, seed=seed, out_dir=cell_dir)
    return _comparison_row(result.summary, variant, buffer_pkts)


def sweep_workers() -> int:
    value = os.environ.get("SIMRUN_THREADS")
    if value is None:
        return len(SWEEP_CELLS)
    try:
        n = int(value)
    except ValueError as exc:
        raise ConfigError(f"SIMRUN_THREADS: not an integer: {value!r}") from exc
    if n < 1:
        raise ConfigError("SIMRUN_THREADS: must be at least 1")
    return min(n, len(SWEEP_CELLS))


def sweep(cfg: ScenarioConfig, out_root: str,
          seed: Optional[int] = None) -> list:
    """Run the 3-variant x 2-buffer grid and emit comparison.csv.

    Cells run concurrently in worker processes (capped by SIMRUN_THREADS);
    a failing cell aborts the sweep, leaving completed cell directories in
    place.
    """
    if seed is None:
        seed = cfg.seed
    if cfg.flow_by_role("wow") is None or cfg.flow_by_role("ftp") is None:
        raise ConfigError("sweep: scenario must define both a wow and an ftp flow")
    os.makedirs(out_root, exist_ok=True)
    jobs = []
    for variant, buffer_pkts in SWEEP_CELLS:
        cell_dir = os.path.join(out_root, f"{variant}_{buffer_pkts}")
        jobs.append((_cell_config(cfg, variant, buffer_pkts), seed, cell_dir,
                     variant, buffer_pkts))
    rows = []
    with ProcessPoolExecutor(max_workers=sweep_workers()) as pool:
        futures = [pool.submit(_sweep_worker, job) for job in jobs]
        error = None
        for future in futures:
            if error is not None:
                future.cancel()
                continue
            try:
                rows.append(future.result())
            except Exception as exc:
                error = exc
        if error is not None:
            raise SimulationError(f"sweep cell failed: {error}") from error
    write_comparison_csv(os.path.join(out_root, "comparison.csv"), rows)
    return rows
