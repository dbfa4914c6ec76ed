"""Command-line interface.

Verbs::

    proxsamp run <config>                 run the benchmark grid, write CSV + JSON
    proxsamp reference <config>           build (or load) the reference ensemble
    proxsamp plotdata <rows.csv> --axis=step-size|dimension [--out PATH]
    proxsamp schedule key=value [...]     print theorem-derived schedules as JSON

``run`` and ``reference`` read the flat key-value config documented in
:mod:`proxsamp.bench`. The reference cache directory resolves as
``--cache-dir`` > ``PROXSAMP_CACHE_DIR`` > the user cache directory.

``schedule`` accepts assignments for the problem constants — required:
``smoothness`` (L), ``alpha``, ``sigma2``, ``dim``, ``epsilon``; optional:
``n_components``, ``grad0_sq``, ``moment_bound``, ``kind`` (sgld | mala |
both, default both), and ``mult.<name>`` constant multipliers — and prints the
derived schedules as JSON (a derivation outside its regime reports an
``error`` entry instead of aborting the other).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .bench import (
    ConfigError,
    emit_plot_data,
    parse_config_file,
    parse_rows_csv,
    run_experiment,
)
from .reference import reference_ensemble
from .schedules import ScheduleInputs, derive_mala_schedule, derive_sgld_schedule

__all__ = ["main"]

_SCHEDULE_INT_KEYS = ("dim", "n_components")
_SCHEDULE_FLOAT_KEYS = ("smoothness", "alpha", "sigma2", "epsilon", "grad0_sq", "moment_bound")
_SCHEDULE_REQUIRED = ("smoothness", "alpha", "sigma2", "dim", "epsilon")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proxsamp",
        description="Stochastic proximal sampler benchmark harness.",
    )
    sub = parser.add_subparsers(dest="verb", required=True, metavar="verb")

    p = sub.add_parser("run", help="run a benchmark config (CSV rows + JSON summary)")
    p.add_argument("config", help="path to the key-value config file")
    p.add_argument("--cache-dir", default=None, help="reference cache directory override")

    p = sub.add_parser("reference", help="build or load the config's reference ensemble")
    p.add_argument("config", help="path to the key-value config file")
    p.add_argument("--cache-dir", default=None, help="reference cache directory override")

    p = sub.add_parser("plotdata", help="aggregate a rows CSV into plot-ready series")
    p.add_argument("rows", help="path to a rows CSV emitted by 'run'")
    p.add_argument(
        "--axis", required=True, choices=("step-size", "dimension"), help="x-axis variable"
    )
    p.add_argument("--out", default=None, help="write to this path instead of stdout")

    p = sub.add_parser("schedule", help="print theorem-derived schedules for given constants")
    p.add_argument("assignments", nargs="+", metavar="key=value")
    return parser


def _cmd_run(args) -> int:
    config = parse_config_file(args.config)
    rows = run_experiment(config, cache_dir=args.cache_dir)
    print(f"wrote {config.out_csv} ({len(rows)} rows)")
    print(f"wrote {config.out_summary}")
    summary = json.loads(Path(config.out_summary).read_text(encoding="utf-8"))
    for alg in sorted(summary["algorithms"]):
        best = summary["algorithms"][alg]["best"]
        hypers = " ".join(
            f"{k}={best[k]:g}" for k in ("tau", "S", "eta", "h") if k in best
        )
        print(f"best {alg}: {hypers} mean_tv={best['mean_tv']:.4f} stderr={best['stderr']:.4f}")
    return 0


def _cmd_reference(args) -> int:
    config = parse_config_file(args.config)
    result = reference_ensemble(
        config.make_target(),
        budget=config.reference_budget,
        seed=config.reference_seed,
        n_chains=config.reference_chains,
        burn_in=config.reference_burn_in,
        thin=config.reference_thin,
        min_particles=config.reference_min_particles,
        step_size=config.reference_step,
        cache=True,
        cache_dir=args.cache_dir,
    )
    print(f"reference: {result.path}")
    print(f"particles: {result.particles.shape[0]} x {result.particles.shape[1]}")
    print(f"accept_rate: {result.accept_rate:.4f}")
    print(f"from_cache: {'yes' if result.from_cache else 'no'}")
    return 0


def _cmd_plotdata(args) -> int:
    rows = parse_rows_csv(Path(args.rows).read_text(encoding="utf-8"))
    text = emit_plot_data(rows, args.axis)
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
        print(f"wrote {args.out}")
    return 0


def _cmd_schedule(args) -> int:
    fields: dict[str, float | int] = {}
    multipliers: dict[str, float] = {}
    kind = "both"
    for item in args.assignments:
        key, sep, value = item.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ValueError(f"expected key=value, got {item!r}")
        if key == "kind":
            if value not in ("sgld", "mala", "both"):
                raise ValueError(f"kind must be sgld, mala or both, got {value!r}")
            kind = value
        elif key.startswith("mult."):
            multipliers[key[len("mult."):]] = float(value)
        elif key in _SCHEDULE_INT_KEYS:
            fields[key] = int(value)
        elif key in _SCHEDULE_FLOAT_KEYS:
            fields[key] = float(value)
        else:
            raise ValueError(f"unknown schedule input {key!r}")
    missing = [k for k in _SCHEDULE_REQUIRED if k not in fields]
    if missing:
        raise ValueError(f"missing required schedule inputs: {', '.join(missing)}")

    inputs = ScheduleInputs(**fields, constant_multipliers=multipliers or None)
    out: dict[str, object] = {"inputs": dataclasses.asdict(inputs)}
    if kind in ("sgld", "both"):
        try:
            out["sgld"] = dataclasses.asdict(derive_sgld_schedule(inputs))
        except ValueError as exc:
            out["sgld"] = {"error": str(exc)}
    if kind in ("mala", "both"):
        try:
            out["mala"] = dataclasses.asdict(derive_mala_schedule(inputs))
        except ValueError as exc:
            out["mala"] = {"error": str(exc)}
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def main(argv: list[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage/help
        return int(exc.code or 0)
    commands = {
        "run": _cmd_run,
        "reference": _cmd_reference,
        "plotdata": _cmd_plotdata,
        "schedule": _cmd_schedule,
    }
    try:
        return commands[args.verb](args)
    except (ConfigError, ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
