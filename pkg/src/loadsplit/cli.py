"""Command-line entry points.

Four subcommands cover the experiment loop:

* ``synth`` — draw a synthetic scene from a YAML spec.
* ``fit``   — fit the model to an interval CSV or matrix CSV.
* ``eval``  — score a fitted model against ground-truth matrices.
* ``plot``  — render a day's disaggregation and the objective trace.

Exit codes: 0 success, 1 usage error, 2 data/configuration error,
3 numerical failure during fitting. Relative ``--out`` paths resolve under
``$LOADSPLIT_OUT_DIR`` when that variable is set.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from datetime import date
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, NumericalError
from .evaluate import evaluate, format_report
from .model import UPDATE_RULES, ORDERS, EnergyDataset
from .pipeline import (
    export_disaggregation,
    ingest_csv,
    load_appliance_config,
    load_ground_truth,
    load_model,
    read_matrix_dataset,
    save_model,
    write_matrix_csv,
)
from .synth import generate, load_synth_spec
from .trainer import fit

OUT_DIR_ENV = "LOADSPLIT_OUT_DIR"


class _Parser(argparse.ArgumentParser):
    """argparse variant that reserves exit code 1 for usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _resolve_out(raw: str) -> Path:
    path = Path(raw)
    if path.is_absolute():
        return path
    base = os.environ.get(OUT_DIR_ENV)
    return Path(base) / path if base else path


def _parse_date_range(raw: str) -> tuple[date, date]:
    try:
        lo_raw, hi_raw = raw.split(":")
        lo, hi = date.fromisoformat(lo_raw), date.fromisoformat(hi_raw)
    except ValueError as exc:
        raise DataError(f"bad --date-range {raw!r} (expected YYYY-MM-DD:YYYY-MM-DD): {exc}") from exc
    if lo > hi:
        raise DataError(f"--date-range start {lo} is after end {hi}")
    return lo, hi


def _sniff_matrix_csv(path: Path) -> bool:
    """True when the file is a matrix CSV (header starts with 'slot')."""
    if not path.exists():
        raise DataError(f"input file does not exist: {path}")
    with path.open(newline="") as handle:
        header = next(csv.reader(handle), None)
    return bool(header) and header[0] == "slot"


def _load_input(args) -> EnergyDataset:
    path = Path(args.input)
    if _sniff_matrix_csv(path):
        return read_matrix_dataset(path)
    date_range = _parse_date_range(args.date_range) if args.date_range else None
    column_map = {}
    if args.timestamp_column:
        column_map["timestamp"] = args.timestamp_column
    if args.kwh_column:
        column_map["kwh"] = args.kwh_column
    result = ingest_csv(
        path,
        interval_minutes=args.interval_minutes,
        date_range=date_range,
        weekday_filter=args.weekday_filter,
        column_map=column_map or None,
    )
    for day, reason in result.rejected_days:
        print(f"rejected {day}: {reason}", file=sys.stderr)
    return result.dataset


def cmd_synth(args) -> int:
    spec = load_synth_spec(args.spec)
    if args.seed is not None:
        spec.rng_seed = args.seed
    if args.sigma is not None:
        spec.noise_sigma = args.sigma
        spec.validate()
    dataset, truth, true_model = generate(spec)

    out = _resolve_out(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix_csv(out / "aggregate.csv", dataset.values, dataset.day_labels)
    for name, matrix in truth.profiles.items():
        write_matrix_csv(out / f"truth_{name}.csv", matrix, truth.day_labels)
    save_model(true_model, out / "true_model", dataset.day_labels)
    print(
        f"wrote {dataset.num_slots} x {dataset.num_days} scene with "
        f"{len(truth.profiles)} classes to {out}"
    )
    return 0


def cmd_fit(args) -> int:
    cfg = load_appliance_config(args.config)
    if args.update_rule is not None:
        cfg.update_rule = args.update_rule
    if args.max_iterations is not None:
        cfg.max_iterations = args.max_iterations
    if args.tol is not None:
        cfg.convergence_tol = args.tol
    if args.seed is not None:
        cfg.rng_seed = args.seed
    if args.fixed_rank is not None:
        cfg.fixed_rank = args.fixed_rank
    if args.sample_order is not None:
        cfg.sample_order = args.sample_order
    if args.class_order is not None:
        cfg.class_order = args.class_order
    cfg.validate()

    dataset = _load_input(args)
    print(f"fitting {dataset.num_slots} x {dataset.num_days} dataset, {len(cfg.classes)} classes")

    def progress(iteration, objective, _model):
        if not args.quiet:
            print(f"iter {iteration:4d}  objective {objective:.12e}")

    model, report = fit(dataset, cfg, progress=progress)
    out = _resolve_out(args.out)
    export_disaggregation(model, dataset, report, out)
    print(
        f"{report.termination} after {report.iterations_run} iterations, "
        f"objective {report.objective_trace[-1]:.12e} "
        f"({report.wall_time:.2f} s); wrote {out}"
    )
    return 0


def _model_root(raw: str) -> tuple[Path, Path]:
    """Resolve an export root or bare model directory to (root, model_dir)."""
    root = Path(raw)
    if (root / "model" / "model.json").exists():
        return root, root / "model"
    if (root / "model.json").exists():
        return root.parent, root
    raise DataError(f"no model.json under {root} or {root}/model")


def cmd_eval(args) -> int:
    _, model_dir = _model_root(args.model_dir)
    model, _labels = load_model(model_dir)
    truth = load_ground_truth(args.truth)
    dataset = None
    input_path = Path(args.input) if args.input else model_dir / "input.csv"
    if input_path.exists():
        dataset = read_matrix_dataset(input_path)
    report = evaluate(model, truth, dataset)
    print(format_report(report), end="")
    return 0


def cmd_plot(args) -> int:
    from .plotting import plot_disaggregation, plot_objective_trace

    root, model_dir = _model_root(args.model_dir)
    model, labels = load_model(model_dir)
    input_path = Path(args.input) if args.input else model_dir / "input.csv"
    dataset = read_matrix_dataset(input_path)

    truth_profiles = None
    if args.truth:
        truth_profiles = load_ground_truth(args.truth).profiles

    out = _resolve_out(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    plot_disaggregation(dataset, model, args.day, out, truth_profiles=truth_profiles)
    print(f"wrote {out}")

    if args.trace_out:
        trace_csv = root / "objective_trace.csv"
        if not trace_csv.exists():
            raise DataError(f"no objective trace at {trace_csv}")
        with trace_csv.open(newline="") as handle:
            reader = csv.reader(handle)
            next(reader)
            trace = [float(row[1]) for row in reader]
        trace_out = _resolve_out(args.trace_out)
        trace_out.parent.mkdir(parents=True, exist_ok=True)
        plot_objective_trace(np.asarray(trace), trace_out)
        print(f"wrote {trace_out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="loadsplit", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic scene")
    p.add_argument("--spec", required=True, help="YAML scene description")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override the spec's rng_seed")
    p.add_argument("--sigma", type=float, default=None, help="override the spec's noise_sigma")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit", help="fit a model to a dataset")
    p.add_argument("--input", required=True, help="interval CSV or matrix CSV")
    p.add_argument("--config", required=True, help="YAML model configuration")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--update-rule", choices=UPDATE_RULES, default=None)
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--tol", type=float, default=None, help="convergence tolerance")
    p.add_argument("--seed", type=int, default=None, help="override rng_seed")
    p.add_argument("--fixed-rank", type=int, default=None)
    p.add_argument("--sample-order", choices=ORDERS, default=None)
    p.add_argument("--class-order", choices=ORDERS, default=None)
    p.add_argument("--interval-minutes", type=int, default=1, help="interval CSV resolution")
    p.add_argument("--weekday-filter", action="store_true", help="drop weekend days")
    p.add_argument("--date-range", default=None, help="keep only YYYY-MM-DD:YYYY-MM-DD")
    p.add_argument("--timestamp-column", default=None, help="timestamp column name")
    p.add_argument("--kwh-column", default=None, help="energy column name")
    p.add_argument("--quiet", action="store_true", help="suppress per-iteration progress")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="score a fitted model against ground truth")
    p.add_argument("--model-dir", required=True, help="fit output directory (or its model/)")
    p.add_argument("--truth", required=True, help="directory of truth_<name>.csv files")
    p.add_argument("--input", default=None, help="aggregate matrix CSV (default: input echo)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("plot", help="render a day's disaggregation")
    p.add_argument("--model-dir", required=True, help="fit output directory (or its model/)")
    p.add_argument("--out", required=True, help="output SVG path")
    p.add_argument("--day", type=int, default=0, help="day index to draw")
    p.add_argument("--input", default=None, help="aggregate matrix CSV (default: input echo)")
    p.add_argument("--truth", default=None, help="overlay truth_<name>.csv from this directory")
    p.add_argument("--trace-out", default=None, help="also render the objective trace here")
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataError, ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
