"""Command-line front end.

Three subcommands: ``run`` executes a preset or JSON config into an output
directory, ``list`` shows the bundled presets, ``check`` evaluates the
validity gate without producing data files.

Exit codes: 0 success, 2 validity failure (causality budget exceeded or a
config that fails its checks), 3 numeric non-convergence.  Errors are
reported as a single JSON line on stderr so wrappers can parse them.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .conformal import CrystalConfig, check_validity
from .errors import NumericsError, ValidityError
from .pulses import DrivingPulse, PulseShape
from .scenarios import ScenarioConfig, list_presets, load_config, run_scenario

EXIT_OK = 0
EXIT_VALIDITY = 2
EXIT_NUMERICS = 3


def _resolve_config(ref: str, overrides: list[str]) -> ScenarioConfig:
    presets = list_presets()
    if ref in presets:
        config = presets[ref]
    else:
        path = Path(ref)
        if not path.exists():
            raise ValueError(
                f"{ref!r} is neither a preset ({', '.join(sorted(presets))}) "
                f"nor a config file")
        config = load_config(path)
    if overrides:
        config = config.with_overrides(overrides)
    return config


def _cmd_run(args: argparse.Namespace) -> int:
    config = _resolve_config(args.config, args.override)
    out_dir = Path(args.out) if args.out else Path(f"out_{config.name}")
    result = run_scenario(config, out_dir)
    for path in result.written:
        print(path)
    return EXIT_OK


def _cmd_list(_args: argparse.Namespace) -> int:
    for name, config in sorted(list_presets().items()):
        rs = ",".join(f"{r:g}" for r in config.r_values)
        print(f"{name:8s} {config.pulse_shape:20s} r={rs:12s} "
              f"products={','.join(config.products)}")
    return EXIT_OK


def _cmd_check(args: argparse.Namespace) -> int:
    config = _resolve_config(args.config, args.override)
    crystal = CrystalConfig.from_practical(
        config.crystal_n, config.crystal_length_um, config.gamma0_thz)
    num = config.numerics
    report_all = {}
    ok = True
    for r in sorted(set(config.r_values) | {max(config.r_values)}):
        for polarity in config.polarities:
            shape = PulseShape(config.pulse_shape)
            if shape is PulseShape.SAMPLED:
                pulse = DrivingPulse.sampled_from_csv(
                    config.sampled_csv, float(r), polarity)
            else:
                pulse = DrivingPulse(shape, float(r), polarity)
            report = check_validity(pulse, crystal, span=num.grid_span,
                                    points=num.grid_points,
                                    rtol=num.rtol, atol=num.atol)
            ok = ok and report.causality_ok
            report_all[f"r{r:g}_s{polarity:+d}"] = {
                "r_max": report.r_max,
                "budget": report.budget,
                "g": report.g,
                "svaa_ok": report.svaa_ok,
                "causality_ok": report.causality_ok,
            }
    print(json.dumps({"name": config.name, "ok": ok, "checks": report_all},
                     sort_keys=True, indent=2))
    return EXIT_OK if ok else EXIT_VALIDITY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chronosqueeze",
        description="Time-domain squeezed vacuum from subcycle drives.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a preset or JSON config")
    p_run.add_argument("config", help="preset name or path to a JSON config")
    p_run.add_argument("--out", help="output directory (default: out_<name>)")
    p_run.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="override a config entry, e.g. numerics.rtol=1e-9")
    p_run.set_defaults(func=_cmd_run)

    p_list = sub.add_parser("list", help="show bundled presets")
    p_list.set_defaults(func=_cmd_list)

    p_check = sub.add_parser("check", help="run the validity gate only")
    p_check.add_argument("config", help="preset name or path to a JSON config")
    p_check.add_argument("--override", action="append", default=[],
                         metavar="KEY=VALUE")
    p_check.set_defaults(func=_cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidityError as exc:
        _report_error(exc)
        return EXIT_VALIDITY
    except NumericsError as exc:
        _report_error(exc)
        return EXIT_NUMERICS
    except (ValueError, OSError) as exc:
        _report_error(exc)
        return 1


def _report_error(exc: Exception) -> None:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
          file=sys.stderr)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
