"""Command-line interface.

Subcommands:

* ``simulate``  sample raw-count tables (both wire schemas) from the model;
* ``optimize``  locate one source setting's balanced analyzer angle;
* ``sweep``     run the full protocol over a grid of source settings;
* ``analyze``   reduce raw-count tables (bundled ones by default);
* ``verify``    run the self-check battery.

Exit codes: 0 success, 2 usage or configuration error, 3 I/O error,
4 self-check failure.  Reports go to stdout or ``--out``; when ``--out`` is
given the report's figures render as PNG files next to it (disable with
``--no-figures``, redirect with ``--figures DIR``).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .control import (
    DEFAULT_GRID_DEG,
    balance_phi_m_for_state,
    balance_phi_m_probed,
    sampled_counts_probe,
    simulated_raw_counts,
    sweep_phi_s,
)
from .counting import angle_key, derive_rng
from .dataio import (
    ParseError,
    analyze,
    emit_report,
    load_bundled,
    load_raw_counts,
    serialize_raw_counts,
    write_report,
)
from .optics import Angle
from .qstate import pure_to_density
from .source import SourceConfig, calibrate_noise, ideal_state, noisy_state
from .verify import REFERENCE_NOISE, run_checks

GRID_PRESETS = {"table2": DEFAULT_GRID_DEG}

_DEFAULT_BUDGET = 11400.0

_COMMON_DEFAULTS = {
    "seed": 0,
    "duration": 10.0,
    "probe_step": 3.0,
    "noise_from": None,
    "ideal": None,
    "config": None,
}

_DEFAULTS = {
    "simulate": {**_COMMON_DEFAULTS, "grid": "table2", "budget": None,
                 "raw_out": "simulated"},
    "optimize": {**_COMMON_DEFAULTS, "phi_s": None, "mode": None, "budget": None,
                 "out": None, "format": None, "figures": None, "no_figures": None},
    "sweep": {**_COMMON_DEFAULTS, "grid": "table2", "mode": None, "budget": None,
              "criterion": "max-K", "out": None, "format": None,
              "figures": None, "no_figures": None, "raw_out": None},
    "analyze": {"a1": None, "a2": None, "duration": 10.0, "out": None,
                "format": None, "figures": None, "no_figures": None, "config": None},
    "verify": {"config": None},
}


class UsageError(ValueError):
    """Bad flag combination or configuration value."""


def _parse_noise_from(text):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).split(",")
    if len(parts) != 2:
        raise UsageError("--noise-from expects two comma-separated visibilities")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"bad --noise-from value {text!r}") from None


def _parse_grid(value):
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    text = str(value).strip()
    if text in GRID_PRESETS:
        return GRID_PRESETS[text]
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise UsageError(f"bad grid {value!r}; use a preset name or comma-separated degrees") from None


def _load_config(path):
    if path is None:
        return {}
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return data


def _merge_options(args, command: str) -> dict:
    defaults = _DEFAULTS[command]
    config_path = getattr(args, "config", None)
    if config_path is None:
        config_path = _DEFAULTS[command].get("config")
    merged = dict(defaults)
    for key, value in _load_config(config_path).items():
        if key not in defaults or key == "config":
            raise UsageError(f"unknown config key {key!r} for {command}")
        merged[key] = value
    for key in defaults:
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            merged[key] = cli_value
    return merged


def _source_config(options) -> SourceConfig:
    if options.get("ideal") and options.get("noise_from") is not None:
        raise UsageError("--ideal and --noise-from are mutually exclusive")
    if options.get("ideal"):
        return SourceConfig(Angle(0.0))
    pair = _parse_noise_from(options.get("noise_from"))
    if pair is None:
        pair = REFERENCE_NOISE
    w, d = calibrate_noise(*pair)
    return SourceConfig(Angle(0.0), white_noise_w=w, hv_dephasing_d=d)


def _mode_and_budget(options):
    mode = options.get("mode")
    budget = options.get("budget")
    if mode is None:
        mode = "counted" if budget is not None else "exact"
    if budget is None:
        budget = _DEFAULT_BUDGET
    return mode, float(budget)


def _emit(report, options, default_stem: str):
    out = options.get("out")
    fmt = options.get("format")
    if out is None:
        sys.stdout.buffer.write(emit_report(report, fmt or "json"))
        out_dir, stem = None, default_stem
    else:
        out = Path(out)
        write_report(report, out, fmt)
        out_dir, stem = out.parent, (out.stem or default_stem)
    if options.get("no_figures"):
        return None, None
    figures_dir = options.get("figures")
    if figures_dir is not None:
        return Path(figures_dir), stem
    if out_dir is not None:
        return out_dir, stem
    return None, None


def _note(path):
    print(f"wrote {path}", file=sys.stderr)


def _write_raw_tables(a1, a2, prefix) -> list:
    paths = []
    for table, tag in ((a1, "a1"), (a2, "a2")):
        path = Path(f"{prefix}_{tag}.csv")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(serialize_raw_counts(table), encoding="utf-8")
        paths.append(path)
    return paths


def cmd_simulate(args) -> int:
    options = _merge_options(args, "simulate")
    config = _source_config(options)
    grid = _parse_grid(options["grid"])
    budget = float(options["budget"]) if options["budget"] is not None else _DEFAULT_BUDGET
    a1, a2 = simulated_raw_counts(
        grid, config, budget=budget, seed=int(options["seed"]),
        probe_step=Angle(float(options["probe_step"])),
        duration_s=float(options["duration"]),
    )
    for path in _write_raw_tables(a1, a2, options["raw_out"]):
        print(path)
    return 0


def cmd_optimize(args) -> int:
    options = _merge_options(args, "optimize")
    if options["phi_s"] is None:
        raise UsageError("--phi-s is required for optimize")
    config = _source_config(options)
    mode, budget = _mode_and_budget(options)
    phi_s = Angle(float(options["phi_s"]))
    seed = int(options["seed"])
    step = Angle(float(options["probe_step"]))
    duration = float(options["duration"])
    report = sweep_phi_s(
        (phi_s,), config, mode=mode, budget=budget, seed=seed,
        probe_step=step, duration_s=duration,
    )
    figures_dir, stem = _emit(report, options, "optimize")
    if figures_dir is not None and mode == "counted":
        from .figures import save_balance_fit_figure

        cfg = config.with_phi_s(phi_s)
        rho = noisy_state(cfg)
        guess = balance_phi_m_for_state(pure_to_density(ideal_state(phi_s)))
        rng = derive_rng(seed, angle_key(phi_s.degrees), 101)
        probe = sampled_counts_probe(rho, budget, rng, duration)
        collected = []

        def tracing_probe(angle):
            result = probe(angle)
            collected.append(result)
            return result

        crossing = balance_phi_m_probed(tracing_probe, guess, step)
        _note(save_balance_fit_figure(
            collected, crossing, figures_dir / f"{stem}_balance_fit.png"
        ))
    return 0


def cmd_sweep(args) -> int:
    options = _merge_options(args, "sweep")
    config = _source_config(options)
    mode, budget = _mode_and_budget(options)
    grid = _parse_grid(options["grid"])
    seed = int(options["seed"])
    step = Angle(float(options["probe_step"]))
    duration = float(options["duration"])
    report = sweep_phi_s(
        grid, config, mode=mode, budget=budget, seed=seed,
        criterion=options["criterion"], probe_step=step, duration_s=duration,
    )
    figures_dir, stem = _emit(report, options, "sweep")
    if figures_dir is not None:
        from .figures import save_protocol_figures

        for path in save_protocol_figures(report, figures_dir, stem):
            _note(path)
    if options.get("raw_out"):
        a1, a2 = simulated_raw_counts(
            grid, config, budget=budget, seed=seed, probe_step=step, duration_s=duration,
        )
        for path in _write_raw_tables(a1, a2, options["raw_out"]):
            _note(path)
    return 0


def cmd_analyze(args) -> int:
    options = _merge_options(args, "analyze")
    if (options["a1"] is None) != (options["a2"] is None):
        raise UsageError("provide both --a1 and --a2, or neither for the bundled data")
    if options["a1"] is None:
        a1, a2 = load_bundled()
    else:
        a1 = load_raw_counts(options["a1"], "A1")
        a2 = load_raw_counts(options["a2"], "A2")
    report = analyze(a1, a2, duration_s=float(options["duration"]))
    figures_dir, stem = _emit(report, options, "analysis")
    if figures_dir is not None:
        from .figures import save_analysis_figures

        for path in save_analysis_figures(report, figures_dir, stem):
            _note(path)
    return 0


def cmd_verify(args) -> int:
    _merge_options(args, "verify")
    results = run_checks()
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status} {result.name}: {result.detail}")
    return 0 if all(r.passed for r in results) else 4


def _add_noise_flags(parser):
    parser.add_argument("--noise-from", dest="noise_from", default=None, metavar="C_HV,C_PM",
                        help="calibrate the noise model from two zero-angle visibilities")
    parser.add_argument("--ideal", action="store_true", default=None,
                        help="use the noiseless model")


def _add_report_flags(parser):
    parser.add_argument("--out", default=None, help="report file (default: stdout)")
    parser.add_argument("--format", choices=("json", "csv"), default=None,
                        help="report format (default: by suffix, else json)")
    parser.add_argument("--figures", default=None, metavar="DIR",
                        help="directory for figures (default: alongside --out)")
    parser.add_argument("--no-figures", dest="no_figures", action="store_true", default=None,
                        help="skip figure rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairctx",
        description="Simulate, optimize and analyze the two-photon paradox protocol.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="sample raw-count tables from the model")
    p.add_argument("--grid", default=None,
                   help="comma-separated source angles in degrees, or a preset name")
    p.add_argument("--budget", type=float, default=None, help="mean pairs per context")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--probe-step", dest="probe_step", type=float, default=None, metavar="DEG")
    p.add_argument("--duration", type=float, default=None, metavar="S")
    p.add_argument("--raw-out", dest="raw_out", default=None, metavar="PREFIX",
                   help="prefix for the two output tables (default: simulated)")
    p.add_argument("--config", default=None, help="JSON file with option defaults")
    _add_noise_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="locate the balanced analyzer angle for one setting")
    p.add_argument("--phi-s", dest="phi_s", type=float, default=None, metavar="DEG",
                   help="source angle in degrees")
    p.add_argument("--mode", choices=("exact", "counted"), default=None,
                   help="exact model or counted simulation (default: exact, counted with --budget)")
    p.add_argument("--budget", type=float, default=None, help="mean pairs per context")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--probe-step", dest="probe_step", type=float, default=None, metavar="DEG")
    p.add_argument("--duration", type=float, default=None, metavar="S")
    p.add_argument("--config", default=None, help="JSON file with option defaults")
    _add_noise_flags(p)
    _add_report_flags(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="run the protocol over a grid of source settings")
    p.add_argument("--grid", default=None,
                   help="comma-separated source angles in degrees, or a preset name")
    p.add_argument("--mode", choices=("exact", "counted"), default=None,
                   help="exact model or counted simulation (default: exact, counted with --budget)")
    p.add_argument("--budget", type=float, default=None, help="mean pairs per context")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--criterion", choices=("max-K", "min-P11"), default=None)
    p.add_argument("--probe-step", dest="probe_step", type=float, default=None, metavar="DEG")
    p.add_argument("--duration", type=float, default=None, metavar="S")
    p.add_argument("--raw-out", dest="raw_out", default=None, metavar="PREFIX",
                   help="also write the sampled raw-count tables")
    p.add_argument("--config", default=None, help="JSON file with option defaults")
    _add_noise_flags(p)
    _add_report_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("analyze", help="reduce raw-count tables (bundled data by default)")
    p.add_argument("--a1", default=None, help="zero-angle table (schema A1)")
    p.add_argument("--a2", default=None, help="optimized-context table (schema A2)")
    p.add_argument("--duration", type=float, default=None, metavar="S")
    p.add_argument("--config", default=None, help="JSON file with option defaults")
    _add_report_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="run the self-check battery")
    p.add_argument("--config", default=None, help="JSON file with option defaults")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())
