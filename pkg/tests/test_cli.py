"""Command-line interface: subcommands, overrides, exit codes."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from chronosqueeze.cli import main

FAST = ["--override", "numerics.grid_points=4097",
        "--override", "numerics.omega_points=2048"]


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in ("fig1", "fig2b", "fig2d", "fig3bc", "figS2", "figS3"):
        assert name in out
    assert "half_cycle_sech" in out


def test_check_preset(capsys):
    code = main(["check", "fig2b", *FAST])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is True
    assert payload["checks"]["r2_s+1"]["causality_ok"] is True
    assert payload["checks"]["r2_s+1"]["budget"] == pytest.approx(12.83, abs=0.01)


def test_check_catches_acausal_drive(capsys):
    with pytest.warns(UserWarning):
        code = main(["check", "fig2b", "--override", "r_values=[700]", *FAST])
    assert code == 2
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is False


def test_run_with_overrides(tmp_path, capsys):
    code = main([
        "run", "fig2b", "--out", str(tmp_path),
        "--override", "r_values=[0.5]",
        "--override", "delays_fs=[-10, 10, 5]",
        *FAST,
    ])
    assert code == 0
    printed = capsys.readouterr().out.splitlines()
    assert str(tmp_path / "summary.json") in printed
    assert (tmp_path / "trace_half_cycle_sech_r0.5_tp0.49fs.csv").exists()
    assert (tmp_path / "pt_reference.csv").exists()


def test_run_acausal_exits_2(tmp_path, capsys):
    with pytest.warns(UserWarning):
        code = main(["run", "fig2b", "--out", str(tmp_path),
                     "--override", "r_values=[700]",
                     "--override", "delays_fs=[0, 0, 1]", *FAST])
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ValidityError"


def test_bad_override_key(capsys):
    code = main(["run", "fig2b", "--override", "bogus=1"])
    assert code == 1
    err = json.loads(capsys.readouterr().err)
    assert "bogus" in err["message"]


def test_unknown_preset(capsys):
    code = main(["run", "does-not-exist"])
    assert code == 1
    err = json.loads(capsys.readouterr().err)
    assert "neither a preset" in err["message"]


def test_run_json_config_file(tmp_path, capsys):
    cfg = tmp_path / "probe.json"
    cfg.write_text(json.dumps({
        "pulse_shape": "half_cycle_sech",
        "r_values": [0.3],
        "probe_fwhm_fs": [5.9],
        "delays_fs": [-5, 5, 5],
        "products": ["trace"],
        "numerics": {"grid_points": 4097, "omega_points": 2048},
    }))
    out = tmp_path / "out"
    assert main(["run", str(cfg), "--out", str(out)]) == 0
    capsys.readouterr()
    assert (out / "trace_half_cycle_sech_r0.3_tp5.9fs.csv").exists()


def test_installed_entry_point():
    proc = subprocess.run([sys.executable, "-m", "chronosqueeze.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "run" in proc.stdout and "check" in proc.stdout
    proc = subprocess.run(["chronosqueeze", "list"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "fig2d" in proc.stdout
