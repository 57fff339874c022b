"""Command-line entry point: run one scenario, sweep the grid, or validate."""

import argparse
import sys
from typing import List, Optional

from ._version import __version__
from .config import (TCP_VARIANTS, load_raw_scenario, load_scenario,
                     parse_scenario)
from .errors import ConfigError, SimulationError
from .runner import run_scenario, sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simrun",
        description="Discrete-event simulator for a game flow and a bulk "
                    "upload sharing an asymmetric access link.")
    parser.add_argument("--version", action="version",
                        version=f"simrun {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate one scenario")
    run_p.add_argument("--scenario", required=True, help="scenario JSON file")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override the scenario seed")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--ftp-variant", choices=TCP_VARIANTS, default=None,
                       help="override the ftp flow's TCP variant")
    run_p.add_argument("--uplink-buffer", type=int, default=None,
                       help="override the uplink buffer size in packets")
    run_p.add_argument("--duration", type=float, default=None,
                       help="override the run duration in seconds")

    sweep_p = sub.add_parser(
        "sweep", help="run the 3-variant x 2-buffer grid with a shared seed")
    sweep_p.add_argument("--scenario", required=True)
    sweep_p.add_argument("--out", required=True)

    val_p = sub.add_parser("validate", help="parse a scenario and report")
    val_p.add_argument("--scenario", required=True)
    return parser


def _cmd_run(args) -> int:
    raw = load_raw_scenario(args.scenario)
    if args.duration is not None:
        raw["duration_s"] = args.duration
        if "measurement_window" not in raw:
            raw["measurement_window"] = [0.8 * args.duration, args.duration]
    if args.uplink_buffer is not None:
        raw["uplink_buffer_pkts"] = args.uplink_buffer
    if args.ftp_variant is not None:
        flows = raw.get("flows")
        if flows is None:
            flows = [{"role": "wow"}, {"role": "ftp"}]
            raw["flows"] = flows
        if not isinstance(flows, list):
            raise ConfigError("flows: must be a non-empty list")
        hit = False
        for flow in flows:
            if isinstance(flow, dict) and flow.get("role") == "ftp":
                flow["tcp_variant"] = args.ftp_variant
                hit = True
        if not hit:
            raise ConfigError("--ftp-variant: the scenario has no ftp flow")
    cfg = parse_scenario(raw)
    result = run_scenario(cfg, seed=args.seed, out_dir=args.out)
    print(f"wrote {result.out_dir}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = load_scenario(args.scenario)
    rows = sweep(cfg, args.out)
    for row in rows:
        print(f"{row['variant']}_{row['buffer']}: "
              f"wow_mean_delay_s={row['wow_mean_delay_s']:.6f} "
              f"wow_drops={row['wow_drops']} "
              f"ftp_goodput_bps={row['ftp_goodput_bps']:.1f}")
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    load_scenario(args.scenario)
    print(f"{args.scenario}: ok")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_validate(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
