"""CLI integration tests, driven through subprocess against the built binary."""

import csv
import json
import os
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("SYNCDRIVE_CLI")
SCENARIO_DIR = os.environ.get("SYNCDRIVE_SCENARIO_DIR")

pytestmark = pytest.mark.skipif(CLI is None, reason="SYNCDRIVE_CLI not set")


def run_cli(*args, **kwargs):
    return subprocess.run([CLI, *args], capture_output=True, text=True, timeout=300, **kwargs)


@pytest.fixture()
def quick_config(tmp_path):
    config = {
        "run_name": "quick",
        "seed": 5,
        "duration_s": 4.0,
        "lead_profile": {"kind": "sine", "amplitude_mps2": 0.5, "period_s": 30.0},
        "network": {"base_latency_ms": 40.0, "jitter_ms": 10.0, "loss_prob": 0.01},
    }
    path = tmp_path / "quick.json"
    path.write_text(json.dumps(config))
    return path


def test_run_happy_path(quick_config, tmp_path):
    out_dir = tmp_path / "out"
    proc = run_cli("run", str(quick_config), "--out", str(out_dir))
    assert proc.returncode == 0, proc.stderr
    assert "rms=" in proc.stdout and "final_mode=" in proc.stdout

    trace = out_dir / "quick_seed5_trace.csv"
    events = out_dir / "quick_seed5_trace_events.csv"
    metrics = out_dir / "quick_seed5_metrics.json"
    assert trace.exists() and events.exists() and metrics.exists()

    with trace.open() as f:
        header = f.readline().strip()
    assert header == "time_s,lead_v,lead_a,lead_x,fol_v,fol_a,fol_x,cmd_a,mode,latency_ms"

    parsed = json.loads(metrics.read_text())
    assert parsed["messages_sent"] == parsed["messages_delivered"] + parsed["messages_dropped"]
    assert "latency_stats" in parsed


def test_run_set_override_and_seed(quick_config, tmp_path):
    out_dir = tmp_path / "out"
    proc = run_cli(
        "run", str(quick_config), "--set", "network.loss_prob=0", "--seed", "9",
        "--out", str(out_dir),
    )
    assert proc.returncode == 0, proc.stderr
    metrics = json.loads((out_dir / "quick_seed9_metrics.json").read_text())
    assert metrics["messages_dropped"] == 0


def test_run_missing_file():
    proc = run_cli("run", "/nonexistent/missing.json")
    assert proc.returncode != 0
    assert "no such file" in proc.stderr


def test_run_invalid_override_key(quick_config):
    proc = run_cli("run", str(quick_config), "--set", "mpc.horizonn=3")
    assert proc.returncode != 0
    assert "horizonn" in proc.stderr
    assert "valid keys" in proc.stderr


def test_run_invariant_violation(quick_config):
    proc = run_cli("run", str(quick_config), "--set", "mpc.horizon=0")
    assert proc.returncode != 0
    assert "horizon" in proc.stderr


def test_env_var_output_dir(quick_config, tmp_path):
    out_dir = tmp_path / "env_out"
    env = dict(os.environ, SYNCDRIVE_OUT_DIR=str(out_dir))
    proc = subprocess.run(
        [CLI, "run", str(quick_config)], capture_output=True, text=True, env=env, timeout=300
    )
    assert proc.returncode == 0, proc.stderr
    assert (out_dir / "quick_seed5_trace.csv").exists()


def test_sweep(quick_config, tmp_path):
    out_dir = tmp_path / "sweep_out"
    proc = run_cli(
        "sweep", str(quick_config), "--param", "network.loss_prob",
        "--values", "0,0.05", "--out", str(out_dir),
    )
    assert proc.returncode == 0, proc.stderr

    summary = out_dir / "sweep_summary.csv"
    assert summary.exists()
    with summary.open() as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 2
    assert rows[0]["param"] == "network.loss_prob"
    assert {r["value"] for r in rows} == {"0", "0.05"}
    # Same seed across sweep points: message counts match, drops differ.
    assert rows[0]["messages_sent"] == rows[1]["messages_sent"]
    assert int(rows[0]["messages_dropped"]) == 0
    assert (out_dir / "quick_network.loss_prob=0_seed5_trace.csv").exists()


def test_latency_probe_unreachable_broker():
    proc = run_cli("latency-probe", "--broker", "tcp://127.0.0.1:1", "--count", "1")
    assert proc.returncode != 0
    assert "error" in proc.stderr


def test_scenario_files_load(tmp_path):
    if SCENARIO_DIR is None:
        pytest.skip("SYNCDRIVE_SCENARIO_DIR not set")
    for name in Path(SCENARIO_DIR).glob("*.json"):
        proc = run_cli(
            "run", str(name), "--set", "duration_s=2.0", "--out", str(tmp_path / name.stem)
        )
        assert proc.returncode == 0, f"{name}: {proc.stderr}"
