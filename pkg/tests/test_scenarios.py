"""Scenario configs, presets, and reproducible runs."""

from __future__ import annotations

import filecmp
import json

import numpy as np
import pytest

from chronosqueeze.errors import ValidityError
from chronosqueeze.scenarios import (
    NumericsConfig,
    ScenarioConfig,
    _delay_grid_fs,
    list_presets,
    load_config,
    run_scenario,
)

FAST_NUMERICS = NumericsConfig(grid_points=4097, omega_points=2048)


def tiny_config(**kwargs) -> ScenarioConfig:
    defaults = dict(
        name="tiny",
        pulse_shape="half_cycle_sech",
        r_values=(0.5,),
        probe_fwhm_fs=(5.9,),
        delays_fs=(-10.0, 10.0, 2.5),
        products=("trace",),
        numerics=FAST_NUMERICS,
    )
    defaults.update(kwargs)
    return ScenarioConfig(**defaults)


def test_dict_roundtrip():
    config = tiny_config()
    data = config.to_dict()
    assert isinstance(data["r_values"], list)  # JSON-safe
    assert ScenarioConfig.from_dict(data) == config


def test_from_dict_rejects_unknown_keys():
    data = tiny_config().to_dict()
    data["typo"] = 1
    with pytest.raises(ValueError, match="unknown config keys"):
        ScenarioConfig.from_dict(data)
    data = tiny_config().to_dict()
    data["numerics"]["typo"] = 1
    with pytest.raises(ValueError, match="unknown numerics keys"):
        ScenarioConfig.from_dict(data)


@pytest.mark.parametrize("kwargs", [
    dict(products=("nonsense",)),
    dict(polarities=(2,)),
    dict(delays_fs=(0.0, 10.0, -1.0)),
    dict(r_values=()),
    dict(pulse_shape="sampled"),  # no sampled_csv given
    dict(pulse_shape="triangle"),
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        tiny_config(**kwargs)


def test_overrides():
    config = tiny_config()
    new = config.with_overrides(["r_values=0.25"])  # scalar wraps to list
    assert new.r_values == (0.25,)
    new = config.with_overrides(['probe_fwhm_fs=[0.49, 5.9]'])
    assert new.probe_fwhm_fs == (0.49, 5.9)
    new = config.with_overrides(["numerics.omega_points=1024"])
    assert new.numerics.omega_points == 1024
    assert config.numerics.omega_points == 2048  # original untouched
    new = config.with_overrides(["pulse_shape=single_cycle"])
    assert new.pulse_shape == "single_cycle"
    with pytest.raises(ValueError, match="unknown config key"):
        config.with_overrides(["nope=3"])
    with pytest.raises(ValueError, match="not found"):
        config.with_overrides(["nope.deep=3"])
    with pytest.raises(ValueError, match="key=value"):
        config.with_overrides(["junk"])


def test_config_hash():
    config = tiny_config()
    h = config.config_hash()
    assert len(h) == 64 and int(h, 16) >= 0
    assert h == tiny_config().config_hash()
    assert h != config.with_overrides(["r_values=0.25"]).config_hash()


def test_delay_grid_inclusive():
    grid = _delay_grid_fs((-40.0, 40.0, 0.5))
    assert grid.size == 161
    assert grid[0] == -40.0
    assert grid[-1] == pytest.approx(40.0, abs=1e-12)
    single = _delay_grid_fs((3.0, 3.0, 1.0))
    assert single.size == 1 and single[0] == 3.0


def test_presets_complete():
    presets = list_presets()
    assert set(presets) == {"fig1", "fig2b", "fig2d", "fig3bc", "figS2",
                            "figS3"}
    assert "sweep_fit" in presets["fig3bc"].products
    assert "pt_reference" in presets["fig2b"].products
    assert set(presets["figS2"].causality_shapes) == {"half_cycle_sech",
                                                      "single_cycle"}
    assert presets["fig3bc"].polarities == (1, -1)


def test_load_config(tmp_path):
    path = tmp_path / "myscenario.json"
    path.write_text(json.dumps({"pulse_shape": "single_cycle",
                                "r_values": [0.3]}))
    config = load_config(path)
    assert config.name == "myscenario"  # stem fills in the name
    assert config.pulse_shape == "single_cycle"
    assert config.r_values == (0.3,)


def test_run_products_and_reproducibility(tmp_path):
    config = tiny_config(
        products=("trace", "pt_reference", "map", "worldlines",
                  "causality_curve"),
        causality_r=(0.0, 1.0, 3),
        worldline_entrances=(-2.0, 2.0, 5),
        worldline_depths=9,
    )
    first = run_scenario(config, tmp_path / "a")
    names = sorted(p.name for p in first.written)
    assert names == [
        "causality_half_cycle_sech.csv",
        "map_half_cycle_sech_r0.5.csv",
        "pt_reference.csv",
        "summary.json",
        "trace_half_cycle_sech_r0.5_tp5.9fs.csv",
        "worldlines_half_cycle_sech_r0.5.csv",
    ]

    # every file opens with the config hash, and the summary repeats it
    chash = config.config_hash()
    for path in first.written:
        if path.suffix == ".csv":
            assert path.read_text().splitlines()[0] == f"# config_sha256={chash}"
        else:
            assert json.loads(path.read_text())["config_sha256"] == chash
    summary = first.summary
    assert summary["validity"]["half_cycle_sech_s+1"]["causality_ok"]
    assert "trace_half_cycle_sech_r0.5_tp5.9fs.csv" in summary["products"]["trace"]

    # the trace CSV carries the documented columns; degree stays blank
    # because no sweep_fit calibrated it
    lines = (tmp_path / "a" / "trace_half_cycle_sech_r0.5_tp5.9fs.csv"
             ).read_text().splitlines()
    assert lines[1] == "t_d_fs,V,rdv,rdv_simplified,degree_pct"
    assert len(lines) == 2 + 9
    assert lines[2].endswith(",")

    # the perturbative reference is odd in the delay
    body = (tmp_path / "a" / "pt_reference.csv").read_text().splitlines()[2:]
    vals = np.array([float(row.split(",")[1]) for row in body])
    np.testing.assert_allclose(vals, -vals[::-1], atol=1e-12)

    # rerunning the identical config reproduces every byte
    second = run_scenario(config, tmp_path / "b")
    for p1, p2 in zip(first.written, second.written):
        assert p1.name == p2.name
        assert filecmp.cmp(p1, p2, shallow=False), p1.name


def test_run_sweep_fit_feeds_degree_column(tmp_path):
    config = tiny_config(
        name="sweeptiny",
        pulse_shape="single_cycle",
        products=("trace", "sweep_fit"),
        sweep_r=(0.2, 1.0, 4),
        delays_fs=(-5.0, 5.0, 2.5),
    )
    result = run_scenario(config, tmp_path)
    report = json.loads((tmp_path / "fit_report.json").read_text())
    assert set(report) == {"config_sha256", "A1", "A2", "residual_rms",
                           "branch", "r_values"}
    assert report["branch"] == "squeezing"
    assert report["A1"] > 0 and report["A2"] > 0
    assert report["r_values"] == [0.2, 0.2 + 0.8 / 3, 0.2 + 1.6 / 3, 1.0]

    for branch in ("squeezing", "anti_squeezing"):
        assert (tmp_path / f"extrema_{branch}.csv").exists()
    both = result.summary["products"]["sweep_fit"]
    assert both["anti_squeezing"]["A2"] > 0

    lines = (tmp_path / "trace_single_cycle_r0.5_tp5.9fs.csv"
             ).read_text().splitlines()
    degree = [float(row.split(",")[4]) for row in lines[2:]]
    assert any(d != 0 for d in degree)  # calibrated column is filled


def test_run_refuses_acausal_drive(tmp_path):
    config = tiny_config(r_values=(700.0,), delays_fs=(0.0, 0.0, 1.0))
    # the envelope-approximation warning fires first, then the hard gate
    with pytest.warns(UserWarning, match="envelope"):
        with pytest.raises(ValidityError, match="budget"):
            run_scenario(config, tmp_path)
    assert not (tmp_path / "summary.json").exists()
