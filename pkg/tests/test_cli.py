"""Command-line behavior: exit codes, overrides, and output layout."""

import json
import os
import subprocess
import sys

import pytest

from simrun.cli import main


def scenario_file(tmp_path, payload):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(payload))
    return str(path)


def test_validate_ok(tmp_path, capsys):
    path = scenario_file(tmp_path, {"seed": 1})
    assert main(["validate", "--scenario", path]) == 0
    assert capsys.readouterr().out.strip() == f"{path}: ok"


def test_validate_bad_scenario_exits_2(tmp_path, capsys):
    path = scenario_file(tmp_path, {"uplink_rate_bps": 0})
    assert main(["validate", "--scenario", path]) == 2
    assert "uplink_rate_bps" in capsys.readouterr().err


def test_validate_missing_file_exits_2(tmp_path, capsys):
    assert main(["validate", "--scenario", str(tmp_path / "nope.json")]) == 2


def test_run_writes_bundle_with_duration_override(tmp_path, capsys):
    path = scenario_file(tmp_path, {"seed": 3})
    out = str(tmp_path / "out")
    assert main(["run", "--scenario", path, "--out", out,
                 "--duration", "2"]) == 0
    assert capsys.readouterr().out.strip() == f"wrote {out}"
    summary = json.load(open(os.path.join(out, "summary.json")))
    assert summary["config"]["duration_s"] == 2.0
    # window tracks the shortened run: last fifth of the duration
    assert summary["config"]["measurement_window"] == [1.6, 2.0]
    assert os.path.isfile(os.path.join(out, "manifest.json"))


def test_run_explicit_window_survives_duration_override(tmp_path):
    path = scenario_file(tmp_path, {"measurement_window": [0.5, 2]})
    out = str(tmp_path / "out")
    assert main(["run", "--scenario", path, "--out", out,
                 "--duration", "2"]) == 0
    summary = json.load(open(os.path.join(out, "summary.json")))
    assert summary["config"]["measurement_window"] == [0.5, 2.0]


def test_run_overrides_buffer_variant_and_seed(tmp_path):
    path = scenario_file(tmp_path, {"seed": 3})
    out = str(tmp_path / "out")
    assert main(["run", "--scenario", path, "--out", out, "--duration", "1",
                 "--uplink-buffer", "20", "--ftp-variant", "vegas",
                 "--seed", "9"]) == 0
    summary = json.load(open(os.path.join(out, "summary.json")))
    assert summary["config"]["uplink_buffer_pkts"] == 20
    assert summary["seed"] == 9
    flows = {f["role"]: f for f in summary["config"]["flows"]}
    assert flows["ftp"]["tcp_variant"] == "vegas"
    assert flows["wow"]["tcp_variant"] == "sack"


def test_run_ftp_variant_without_ftp_flow_exits_2(tmp_path, capsys):
    path = scenario_file(tmp_path, {"flows": [{"role": "wow"}]})
    assert main(["run", "--scenario", path, "--out", str(tmp_path / "o"),
                 "--ftp-variant", "vegas"]) == 2
    assert "no ftp flow" in capsys.readouterr().err


def test_run_invalid_override_exits_2(tmp_path):
    path = scenario_file(tmp_path, {})
    assert main(["run", "--scenario", path, "--out", str(tmp_path / "o"),
                 "--uplink-buffer", "0"]) == 2


def test_sweep_tiny_grid(tmp_path, capsys):
    path = scenario_file(tmp_path, {"duration_s": 2.0,
                                    "measurement_window": [1, 2], "seed": 5})
    out = str(tmp_path / "grid")
    assert main(["sweep", "--scenario", path, "--out", out]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[-1] == f"wrote {out}"
    assert len(lines) == 7
    assert lines[0].startswith("sack_200:")
    dirs = sorted(d for d in os.listdir(out)
                  if os.path.isdir(os.path.join(out, d)))
    assert dirs == ["new_reno_20", "new_reno_200", "sack_20", "sack_200",
                    "vegas_20", "vegas_200"]
    assert os.path.isfile(os.path.join(out, "comparison.csv"))


def test_sweep_invalid_thread_env_exits_2(tmp_path, monkeypatch):
    path = scenario_file(tmp_path, {"duration_s": 2.0,
                                    "measurement_window": [1, 2]})
    monkeypatch.setenv("SIMRUN_THREADS", "zero")
    assert main(["sweep", "--scenario", path, "--out", str(tmp_path / "g")]) == 2


def test_console_script_version():
    out = subprocess.run([sys.executable, "-m", "simrun.cli", "--version"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.startswith("simrun ")
