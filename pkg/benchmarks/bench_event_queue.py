"""Compare the compiled and pure-Python event queue backends.

Two views:
  1. Raw queue throughput on a steady-state churn pattern (a resident set
     of pending events, push one / pop one), the access pattern a running
     simulation produces.
  2. End-to-end wall-clock time of the default scenario, each backend in
     its own interpreter (the backend is chosen at import time).

Usage: python benchmarks/bench_event_queue.py [--events N] [--resident K]
"""

import argparse
import os
import random
import statistics
import subprocess
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

from simrun._core._evqueue_py import EventQueue as PyEventQueue  # noqa: E402

try:
    from simrun._core._evqueue import EventQueue as CEventQueue  # noqa: E402
except ImportError:
    CEventQueue = None


def churn(queue_cls, events: int, resident: int, seed: int = 7) -> float:
    """Seconds to run `events` push+pop pairs around a resident set."""
    rng = random.Random(seed)
    q = queue_cls()
    seq = 0
    now = 0
    for _ in range(resident):
        q.push(now + rng.randrange(1, 50_000_000), seq, None)
        seq += 1
    t0 = time.perf_counter()
    for _ in range(events):
        now = q.pop()[0]
        q.push(now + rng.randrange(1, 50_000_000), seq, None)
        seq += 1
    return time.perf_counter() - t0


def bench_raw(events: int, resident: int, repeats: int) -> None:
    print(f"raw churn: {events} push+pop pairs, {resident} resident events, "
          f"best of {repeats}")
    results = {}
    for name, cls in (("python", PyEventQueue), ("compiled", CEventQueue)):
        if cls is None:
            print(f"  {name:>8}: extension not built, skipped")
            continue
        times = [churn(cls, events, resident) for _ in range(repeats)]
        best = min(times)
        results[name] = best
        rate = events / best / 1e6
        print(f"  {name:>8}: {best:.3f} s  ({rate:.2f} M ops/s, "
              f"median {statistics.median(times):.3f} s)")
    if len(results) == 2:
        print(f"  speedup: {results['python'] / results['compiled']:.2f}x")


def bench_scenario() -> None:
    code = (
        "import json, sys, time, tempfile\n"
        "from simrun import parse_scenario, run_scenario\n"
        "from simrun._core import BACKEND\n"
        "cfg = parse_scenario({'seed': 42})\n"
        "t0 = time.perf_counter()\n"
        "result = run_scenario(cfg)\n"
        "dt = time.perf_counter() - t0\n"
        "events = result.summary['kernel']['events_processed']\n"
        "print(json.dumps({'backend': BACKEND, 'seconds': dt,"
        " 'events': events}))\n"
    )
    print("end-to-end: default scenario, 1000 simulated seconds")
    for name, env_value in (("python", "1"), ("compiled", None)):
        env = dict(os.environ)
        env.pop("SIMRUN_PURE_PYTHON", None)
        if env_value is not None:
            env["SIMRUN_PURE_PYTHON"] = env_value
        proc = subprocess.run([sys.executable, "-c", code], env=env,
                              capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"  {name:>8}: failed: {proc.stderr.strip()}")
            continue
        import json
        row = json.loads(proc.stdout)
        if row["backend"] != name:
            print(f"  {name:>8}: backend mismatch ({row['backend']}), skipped")
            continue
        print(f"  {name:>8}: {row['seconds']:.2f} s "
              f"({row['events']} events, "
              f"{row['events'] / row['seconds'] / 1e6:.2f} M events/s)")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--events", type=int, default=2_000_000,
                        help="push+pop pairs in the raw benchmark")
    parser.add_argument("--resident", type=int, default=1_000,
                        help="events kept pending throughout")
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--skip-scenario", action="store_true",
                        help="only run the raw queue benchmark")
    args = parser.parse_args()
    bench_raw(args.events, args.resident, args.repeats)
    if not args.skip_scenario:
        bench_scenario()


if __name__ == "__main__":
    main()
