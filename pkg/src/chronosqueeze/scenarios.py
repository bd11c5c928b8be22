"""Reproducible figure-style scenario runs.

A scenario bundles one pulse/crystal/probe configuration with a list of
products to emit (variance traces, exit maps, world-line bundles,
causality curves, strength sweeps with exponential fits).  Every emitted
file starts with a ``# config_sha256=...`` comment so data can always be
traced back to the exact configuration, and a rerun of the same
configuration reproduces every file byte for byte: no clocks, no RNG,
fixed iteration order.

Configurations are plain JSON; the bundled presets cover the standard
demonstration set (``chronosqueeze list`` prints them).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .conformal import (
    CrystalConfig,
    build_conformal_map,
    causality_g,
    check_validity,
    worldline_bundle,
)
from .detection import ProbeKernel, rdv_trace, verify_convergence
from .errors import ValidityError
from .fitting import FitBranch, extrema_vs_r, fit_exponential
from .perturbation import pt_rdv_shape
from .pulses import DrivingPulse, PulseShape

__all__ = [
    "NumericsConfig",
    "ScenarioConfig",
    "ScenarioResult",
    "list_presets",
    "load_config",
    "run_scenario",
]

PRODUCTS = ("trace", "pt_reference", "map", "worldlines", "causality_curve",
            "sweep_fit")

FS = 1e-15


@dataclass(frozen=True)
class NumericsConfig:
    """Resolution knobs; the defaults satisfy the built-in accuracy gates."""

    grid_span: float = 60.0
    grid_points: int = 2**14 + 1
    rtol: float = 1e-11
    atol: float = 1e-12
    omega_points: int = 4096
    check_convergence: bool = True


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one run needs, JSON-serializable and hashable.

    Times are in femtoseconds, lengths in micrometers and rates in THz at
    this boundary; conversion to SI happens once, inside the run.
    """

    name: str
    pulse_shape: str = "half_cycle_sech"
    polarities: tuple[int, ...] = (1,)
    r_values: tuple[float, ...] = (1.0,)
    crystal_n: float = 2.57
    crystal_length_um: float = 15.0
    gamma0_thz: float = 26.0
    probe_fwhm_fs: tuple[float, ...] = (0.49,)
    delays_fs: tuple[float, float, float] = (-40.0, 40.0, 0.5)
    products: tuple[str, ...] = ("trace",)
    sweep_r: tuple[float, float, int] = (0.05, 2.0, 16)
    causality_r: tuple[float, float, int] = (0.0, 8.0, 33)
    causality_shapes: tuple[str, ...] = ()
    worldline_entrances: tuple[float, float, int] = (-8.0, 8.0, 33)
    worldline_depths: int = 65
    sampled_csv: str | None = None
    numerics: NumericsConfig = field(default_factory=NumericsConfig)

    def __post_init__(self) -> None:
        shapes = {s.value for s in PulseShape}
        if self.pulse_shape not in shapes:
            raise ValueError(f"unknown pulse_shape {self.pulse_shape!r}")
        for s in self.causality_shapes:
            if s not in shapes:
                raise ValueError(f"unknown causality shape {s!r}")
        for p in self.polarities:
            if p not in (-1, 1):
                raise ValueError("polarities must contain only +1 / -1")
        for prod in self.products:
            if prod not in PRODUCTS:
                raise ValueError(f"unknown product {prod!r}; known: {PRODUCTS}")
        start, stop, step = self.delays_fs
        if step <= 0 or stop < start:
            raise ValueError("delays_fs must be (start, stop, step>0) with stop>=start")
        if any(r < 0 for r in self.r_values) or not self.r_values:
            raise ValueError("r_values must be nonempty and nonnegative")
        if self.pulse_shape == PulseShape.SAMPLED.value and not self.sampled_csv:
            raise ValueError("sampled pulse shape needs sampled_csv")

    # -- (de)serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["numerics"] = dataclasses.asdict(self.numerics)
        return _tuples_to_lists(d)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        data = dict(data)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "numerics" in data and not isinstance(data["numerics"], NumericsConfig):
            num = dict(data["numerics"])
            num_known = {f.name for f in dataclasses.fields(NumericsConfig)}
            bad = set(num) - num_known
            if bad:
                raise ValueError(f"unknown numerics keys: {sorted(bad)}")
            data["numerics"] = NumericsConfig(**num)
        for f in dataclasses.fields(cls):
            if f.name in data and isinstance(data[f.name], list):
                data[f.name] = _listed_to_tuple(data[f.name])
        return cls(**data)

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True,
                               separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    def with_overrides(self, pairs: list[str]) -> "ScenarioConfig":
        """Apply ``key=value`` overrides; dotted keys reach into numerics."""
        data = self.to_dict()
        for pair in pairs:
            key, sep, raw = pair.partition("=")
            if not sep:
                raise ValueError(f"override {pair!r} is not of the form key=value")
            try:
                value = json.loads(raw)
            except json.JSONDecodeError:
                value = raw
            target = data
            parts = key.split(".")
            for part in parts[:-1]:
                if part not in target or not isinstance(target[part], dict):
                    raise ValueError(f"override path {key!r} not found")
                target = target[part]
            leaf = parts[-1]
            if leaf not in target:
                raise ValueError(f"unknown config key {key!r}")
            if isinstance(target[leaf], list) and not isinstance(value, list):
                value = [value]
            target[leaf] = value
        return ScenarioConfig.from_dict(data)


def _tuples_to_lists(obj):
    if isinstance(obj, tuple):
        return [_tuples_to_lists(v) for v in obj]
    if isinstance(obj, list):
        return [_tuples_to_lists(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _tuples_to_lists(v) for k, v in obj.items()}
    return obj


def _listed_to_tuple(values):
    return tuple(_listed_to_tuple(v) if isinstance(v, list) else v for v in values)


def load_config(path: str | Path) -> ScenarioConfig:
    """Read a scenario from a JSON file; the file stem names it if absent."""
    path = Path(path)
    data = json.loads(path.read_text())
    data.setdefault("name", path.stem)
    return ScenarioConfig.from_dict(data)


# -- presets -----------------------------------------------------------------


def list_presets() -> dict[str, ScenarioConfig]:
    """The bundled demonstration scenarios, keyed by name."""
    presets = [
        ScenarioConfig(
            name="fig1",
            pulse_shape="half_cycle_sech",
            r_values=(5.0,),
            products=("map", "worldlines"),
            worldline_entrances=(-8.0, 8.0, 33),
        ),
        ScenarioConfig(
            name="fig2b",
            pulse_shape="half_cycle_sech",
            r_values=(0.1, 0.5, 2.0),
            probe_fwhm_fs=(0.49,),
            delays_fs=(-40.0, 40.0, 0.25),
            products=("trace", "pt_reference"),
        ),
        ScenarioConfig(
            name="fig2d",
            pulse_shape="half_cycle_sech",
            r_values=(2.0,),
            probe_fwhm_fs=(0.49, 5.9, 14.7),
            delays_fs=(-60.0, 60.0, 0.4),
            products=("trace",),
        ),
        ScenarioConfig(
            name="fig3bc",
            pulse_shape="single_cycle",
            polarities=(1, -1),
            r_values=(0.5,),
            probe_fwhm_fs=(5.9,),
            delays_fs=(-30.0, 30.0, 0.25),
            products=("trace", "sweep_fit"),
            sweep_r=(0.05, 2.0, 16),
        ),
        ScenarioConfig(
            name="figS2",
            pulse_shape="half_cycle_sech",
            r_values=(1.0,),
            products=("causality_curve",),
            causality_r=(0.0, 8.0, 33),
            causality_shapes=("half_cycle_sech", "single_cycle"),
        ),
        ScenarioConfig(
            name="figS3",
            pulse_shape="single_cycle",
            r_values=(0.5, 1.0, 2.0),
            probe_fwhm_fs=(0.49,),
            delays_fs=(-30.0, 30.0, 0.25),
            products=("trace",),
        ),
    ]
    return {p.name: p for p in presets}


# -- running -----------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioResult:
    config: ScenarioConfig
    out_dir: Path
    written: tuple[Path, ...]
    summary: dict


def _fmt(value: float) -> str:
    return f"{value:.12e}"


def _write_csv(path: Path, config_hash: str, header: list[str],
               columns: list[np.ndarray | list]) -> None:
    lines = [f"# config_sha256={config_hash}", ",".join(header)]
    n = len(columns[0])
    for i in range(n):
        cells = []
        for col in columns:
            v = col[i]
            cells.append("" if v is None else _fmt(float(v)) if isinstance(
                v, (int, float, np.floating, np.integer)) else str(v))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, config_hash: str, payload: dict) -> None:
    body = {"config_sha256": config_hash, **payload}
    path.write_text(json.dumps(body, sort_keys=True, indent=2) + "\n")


def _delay_grid_fs(delays_fs: tuple[float, float, float]) -> np.ndarray:
    start, stop, step = delays_fs
    count = int(round((stop - start) / step)) + 1
    return start + step * np.arange(count)


def _build_pulse(shape_value: str, strength: float, polarity: int,
                 sampled_csv: str | None) -> DrivingPulse:
    shape = PulseShape(shape_value)
    if shape is PulseShape.SAMPLED:
        return DrivingPulse.sampled_from_csv(sampled_csv, strength, polarity)
    return DrivingPulse(shape, strength, polarity)


def run_scenario(config: ScenarioConfig, out_dir: str | Path) -> ScenarioResult:
    """Execute every product of ``config`` into ``out_dir``.

    Raises :class:`ValidityError` when the strongest requested drive fails
    the causality gate (the CLI maps that to exit code 2) and lets
    :class:`NumericsError` subclasses propagate (exit code 3).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    chash = config.config_hash()
    num = config.numerics
    crystal = CrystalConfig.from_practical(
        config.crystal_n, config.crystal_length_um, config.gamma0_thz)
    build_kwargs = dict(span=num.grid_span, points=num.grid_points,
                        rtol=num.rtol, atol=num.atol)
    map_cache: dict = {}

    def cmap_for(shape_value: str, r: float, polarity: int):
        key = (shape_value, float(r), polarity)
        if key not in map_cache:
            pulse = _build_pulse(shape_value, r, polarity, config.sampled_csv)
            map_cache[key] = build_conformal_map(pulse, crystal, **build_kwargs)
        return map_cache[key]

    written: list[Path] = []
    summary: dict = {"name": config.name, "config": config.to_dict(),
                     "validity": {}, "products": {}}

    # validity gate at the strongest drive each polarity will see
    sweep_rs = np.linspace(*config.sweep_r) if "sweep_fit" in config.products \
        else np.array([])
    max_r = max(
        max(config.r_values),
        float(sweep_rs.max()) if sweep_rs.size else 0.0,
        config.causality_r[1] if "causality_curve" in config.products else 0.0,
    )
    gate_shapes = set(config.causality_shapes) if "causality_curve" in \
        config.products else set()
    gate_shapes.add(config.pulse_shape)
    for shape_value in sorted(gate_shapes):
        for polarity in config.polarities:
            pulse = _build_pulse(shape_value, max_r, polarity, config.sampled_csv)
            cmap = cmap_for(shape_value, max_r, polarity)
            report = check_validity(pulse, crystal, cmap=cmap)
            summary["validity"][f"{shape_value}_s{polarity:+d}"] = {
                "strength": max_r,
                "r_max": report.r_max,
                "budget": report.budget,
                "g": report.g,
                "svaa_ok": report.svaa_ok,
                "causality_ok": report.causality_ok,
            }
            if not report.causality_ok:
                raise ValidityError(
                    f"{shape_value} at strength {max_r:g}: conformal advance "
                    f"{report.g:g} exceeds the budget {report.budget:g}")

    delays_fs = _delay_grid_fs(config.delays_fs)
    delays_s = delays_fs * FS
    gamma0 = crystal.gamma0

    # sweep first: traces want the fitted amplitude for their degree column
    fit = None
    if "sweep_fit" in config.products:
        probe = ProbeKernel(config.probe_fwhm_fs[0] * FS)
        shape = PulseShape(config.pulse_shape)
        branch_data = {}
        for polarity, branch in ((1, FitBranch.SQUEEZING),
                                 (-1, FitBranch.ANTI_SQUEEZING)):
            values = extrema_vs_r(
                shape, crystal, probe, sweep_rs, polarity=polarity,
                map_cache=map_cache, omega_points=num.omega_points,
                **build_kwargs)
            branch_data[branch] = values
            fname = out / f"extrema_{branch.value}.csv"
            _write_csv(fname, chash, ["r", "rdv_center"], [sweep_rs, values])
            written.append(fname)
        fit = fit_exponential(sweep_rs, branch_data[FitBranch.SQUEEZING],
                              FitBranch.SQUEEZING)
        fit_anti = fit_exponential(sweep_rs, branch_data[FitBranch.ANTI_SQUEEZING],
                                   FitBranch.ANTI_SQUEEZING)
        fpath = out / "fit_report.json"
        _write_json(fpath, chash, {**fit.as_dict(),
                                   "r_values": list(map(float, sweep_rs))})
        written.append(fpath)
        summary["products"]["sweep_fit"] = {
            "squeezing": fit.as_dict(),
            "anti_squeezing": fit_anti.as_dict(),
        }

    if "trace" in config.products:
        trace_info = {}
        for r in config.r_values:
            for fwhm_fs in config.probe_fwhm_fs:
                for polarity in config.polarities:
                    cmap = cmap_for(config.pulse_shape, r, polarity)
                    probe = ProbeKernel(fwhm_fs * FS)
                    trace = rdv_trace(cmap, probe, delays_s,
                                      omega_points=num.omega_points)
                    if num.check_convergence:
                        peak = delays_s[int(np.argmax(np.abs(trace.rdv)))]
                        verify_convergence(cmap, probe, peak,
                                           omega_points=num.omega_points,
                                           raise_on_failure=True)
                    if fit is not None:
                        trace = trace.with_degree(fit.a1)
                    suffix = "" if polarity > 0 else "_flip"
                    fname = out / (
                        f"trace_{config.pulse_shape}_r{r:g}_tp{fwhm_fs:g}fs"
                        f"{suffix}.csv")
                    degree_col = ([None] * delays_fs.size
                                  if trace.degree_pct is None else trace.degree_pct)
                    _write_csv(
                        fname, chash,
                        ["t_d_fs", "V", "rdv", "rdv_simplified", "degree_pct"],
                        [delays_fs, trace.variance * FS**2, trace.rdv,
                         trace.rdv_simplified, degree_col])
                    written.append(fname)
                    trace_info[fname.name] = {
                        "min_rdv": float(trace.rdv.min()),
                        "max_rdv": float(trace.rdv.max()),
                        "argmin_fs": float(delays_fs[int(np.argmin(trace.rdv))]),
                        "argmax_fs": float(delays_fs[int(np.argmax(trace.rdv))]),
                    }
        summary["products"]["trace"] = trace_info

    if "pt_reference" in config.products:
        pulse = _build_pulse(config.pulse_shape, max(config.r_values), 1,
                             config.sampled_csv)
        shape_vals = pt_rdv_shape(pulse, delays_fs * FS * gamma0)
        fname = out / "pt_reference.csv"
        _write_csv(fname, chash, ["t_d_fs", "shape_unit_peak"],
                   [delays_fs, shape_vals])
        written.append(fname)

    if "map" in config.products:
        for r in config.r_values:
            for polarity in config.polarities:
                cmap = cmap_for(config.pulse_shape, r, polarity)
                suffix = "" if polarity > 0 else "_flip"
                fname = out / f"map_{config.pulse_shape}_r{r:g}{suffix}.csv"
                _write_csv(fname, chash, ["theta", "tau_out", "slope"],
                           [cmap.theta_grid, cmap.tau_out, cmap.slope])
                written.append(fname)

    if "worldlines" in config.products:
        ent = np.linspace(config.worldline_entrances[0],
                          config.worldline_entrances[1],
                          int(config.worldline_entrances[2]))
        zs = np.linspace(0.0, 1.0, config.worldline_depths)
        for r in config.r_values:
            for polarity in config.polarities:
                pulse = _build_pulse(config.pulse_shape, r, polarity,
                                     config.sampled_csv)
                lines = worldline_bundle(pulse, ent, zs,
                                         rtol=num.rtol, atol=num.atol)
                ids = np.repeat(np.arange(ent.size), zs.size)
                suffix = "" if polarity > 0 else "_flip"
                fname = out / (f"worldlines_{config.pulse_shape}_r{r:g}"
                               f"{suffix}.csv")
                _write_csv(fname, chash, ["worldline_id", "z_frac", "theta"],
                           [ids.astype(float), np.tile(zs, ent.size),
                            lines.ravel()])
                written.append(fname)

    if "causality_curve" in config.products:
        shapes = config.causality_shapes or (config.pulse_shape,)
        r_lo, r_hi, r_n = config.causality_r
        r_grid = np.linspace(r_lo, r_hi, int(r_n))
        curve_info = {}
        for shape_value in shapes:
            gs = np.empty(r_grid.size)
            for i, r in enumerate(r_grid):
                pulse = _build_pulse(shape_value, float(r), 1,
                                     config.sampled_csv)
                gs[i] = causality_g(pulse, crystal,
                                    cmap=cmap_for(shape_value, float(r), 1))
            fname = out / f"causality_{shape_value}.csv"
            _write_csv(fname, chash, ["r", "g"], [r_grid, gs])
            written.append(fname)
            nz = r_grid > 0
            curve_info[shape_value] = {
                "small_r_slope": float(gs[nz][0] / r_grid[nz][0]) if nz.any()
                else 0.0,
                "g_max": float(gs.max()),
            }
        summary["products"]["causality_curve"] = curve_info

    spath = out / "summary.json"
    _write_json(spath, chash, summary)
    written.append(spath)
    return ScenarioResult(config=config, out_dir=out,
                          written=tuple(written), summary=summary)
