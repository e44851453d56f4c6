"""Fixtures generating real cnlslab artifacts through its CLI.

The figure package consumes the primary tool only through its documented
file formats, so the tests drive the installed `cnlslab` command line in a
scratch directory with small, fast configurations.
"""

import json
import subprocess
import sys

import pytest


def run_cli(args):
    proc = subprocess.run(
        [sys.executable, "-m", "cnlslab.cli", *args],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


def family(v=4.0):
    return {
        "first": {"omega": 1.0, "gamma": 0.0, "x0": 0.0, "v": v, "mu": 1.0},
        "second": {"omega": 1.0, "gamma": 0.0, "x0": 0.0, "v": -v, "mu": 1.0},
    }


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory):
    root = tmp_path_factory.mktemp("artifacts")

    construct_cfg = root / "construct.json"
    construct_cfg.write_text(json.dumps({
        "schema": 1,
        "grid": {"dim": 1, "n": 1024, "length": 128.0},
        "family": family(),
        "evolve": {"dt": 2e-3, "mu1": 1.0, "mu2": 1.0, "beta": 0.5, "record_every": 5},
        "experiment": {"T0": 1.0, "Tn_schedule": [2.0, 3.0]},
        "output": {"directory": str(root / "construct")},
    }))
    run_cli(["construct", "--config", str(construct_cfg)])

    evolve_cfg = root / "evolve.json"
    evolve_cfg.write_text(json.dumps({
        "schema": 1,
        "grid": {"dim": 1, "n": 1024, "length": 128.0},
        "family": {
            "first": {"omega": 1.0, "gamma": 0.0, "x0": -8.0, "v": 2.0, "mu": 1.0},
            "second": {"omega": 1.0, "gamma": 0.0, "x0": 8.0, "v": -2.0, "mu": 1.0},
        },
        "evolve": {"dt": 1e-3, "mu1": 1.0, "mu2": 1.0, "beta": 1.0, "record_every": 100},
        "time": {"t_from": 0.0, "t_to": 2.0},
        "initial_data": {"kind": "soliton_pair"},
        "output": {"directory": str(root / "evolve"), "snapshot_every": 5},
    }))
    run_cli(["evolve", "--config", str(evolve_cfg)])

    scan_cfg = root / "scan.json"
    scan_cfg.write_text(json.dumps({
        "schema": 1,
        "grid": {"dim": 1, "n": 1024, "length": 128.0},
        "family": family(),
        "evolve": {"dt": 2e-3, "mu1": 1.0, "mu2": 1.0, "beta": 0.5, "record_every": 5},
        "experiment": {"T0": 1.0, "Tn_schedule": [2.0]},
        "scan": {"v_list": [6.0, 8.0]},
        "output": {"directory": str(root / "scan")},
    }))
    run_cli(["scan", "--config", str(scan_cfg)])

    return root
