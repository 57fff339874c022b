"""Session-scoped whole-system runs shared by the acceptance tests."""

import json
import time

import pytest

from simrun import parse_scenario, run_scenario, sweep
from simrun.cli import main


@pytest.fixture(scope="session")
def reference_run_pair(tmp_path_factory):
    """The default scenario at seed 42, run twice through the CLI, timed."""
    base = tmp_path_factory.mktemp("reference")
    scenario = base / "scenario.json"
    scenario.write_text(json.dumps({"seed": 42}))
    outs, elapsed = [], []
    for tag in ("a", "b"):
        out = str(base / tag)
        t0 = time.perf_counter()
        rc = main(["run", "--scenario", str(scenario), "--out", out])
        elapsed.append(time.perf_counter() - t0)
        assert rc == 0
        outs.append(out)
    return outs[0], outs[1], elapsed


@pytest.fixture(scope="session")
def sweep_result(tmp_path_factory):
    """3 variants x 2 buffers at a shared seed, full duration."""
    out_root = str(tmp_path_factory.mktemp("sweep") / "grid")
    cfg = parse_scenario({"seed": 42})
    rows = sweep(cfg, out_root)
    return out_root, rows


@pytest.fixture(scope="session")
def wow_only_run():
    cfg = parse_scenario({"seed": 42, "flows": [{"role": "wow"}],
                          "packet_log": True})
    return run_scenario(cfg)


@pytest.fixture(scope="session")
def ftp_window20_run():
    cfg = parse_scenario({
        "seed": 42,
        "measurement_window": [100, 1000],
        "flows": [{"role": "ftp", "tcp_variant": "sack",
                   "adv_window_segments": 20}],
    })
    return run_scenario(cfg)


@pytest.fixture(scope="session")
def ftp_vegas_run():
    cfg = parse_scenario({
        "seed": 42,
        "measurement_window": [100, 1000],
        "flows": [{"role": "ftp", "tcp_variant": "vegas"}],
    })
    return run_scenario(cfg)
