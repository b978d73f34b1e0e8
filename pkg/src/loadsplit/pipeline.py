"""File ingestion, configuration loading, and serialization.

Three file families are handled here:

* **interval CSV** — raw meter readings, one row per (timestamp, kwh) with
  ISO-8601 timestamps; extra columns are treated as sub-metered appliance
  ground truth. `ingest_csv` assembles complete days into a D x N matrix.
* **matrix CSV** — a D x N matrix with a one-line header ``slot,<day>,...``;
  lossless round-trip via Python's shortest float representation.
* **YAML configs** — appliance/duty-cycle parameters and generator specs.

Model directories written by `export_disaggregation` contain per-component
reconstructions, the objective trace, a report, and a reloadable model.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, fields
from datetime import date, datetime
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError, DataError, DimensionMismatchError
from .model import (
    DisaggregationModel,
    EnergyDataset,
    FixedLoadFactors,
    ModelConfig,
    ShiftableClassConfig,
    ShiftableLoadClass,
    SparseBinaryBasis,
)
from .trainer import FitReport

MINUTES_PER_DAY = 1440


@dataclass(eq=False)
class ApplianceGroundTruth:
    """Sub-metered per-appliance usage aligned with an aggregate dataset."""

    profiles: dict[str, np.ndarray]
    day_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        shapes = {name: m.shape for name, m in self.profiles.items()}
        if len(set(shapes.values())) > 1:
            raise DimensionMismatchError(f"ground-truth matrices disagree on shape: {shapes}")
        for name, m in self.profiles.items():
            if np.any(m < 0):
                raise ValueError(f"ground truth for {name!r} has negative entries")

    def names(self) -> list[str]:
        return list(self.profiles)


@dataclass(eq=False)
class IngestResult:
    """An assembled dataset plus the days that had to be rejected."""

    dataset: EnergyDataset
    ground_truth: ApplianceGroundTruth | None
    rejected_days: list[tuple[str, str]] = field(default_factory=list)


def _parse_timestamp(raw: str, line_no: int) -> datetime:
    try:
        return datetime.fromisoformat(raw.strip())
    except ValueError as exc:
        raise DataError(f"line {line_no}: bad timestamp {raw!r}: {exc}") from exc


def _parse_energy(raw: str, line_no: int, column: str) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError) as exc:
        raise DataError(f"line {line_no}: bad {column} value {raw!r}") from exc
    if not np.isfinite(value):
        raise DataError(f"line {line_no}: non-finite {column} value {raw!r}")
    if value < 0:
        raise DataError(f"line {line_no}: negative {column} value {raw!r}")
    return value


def ingest_csv(
    path: str | Path,
    interval_minutes: int = 1,
    date_range: tuple[date, date] | None = None,
    weekday_filter: bool = False,
    column_map: dict[str, str] | None = None,
) -> IngestResult:
    """Assemble an interval CSV into a D x N dataset of complete days.

    The file must carry a header naming a ``timestamp`` and a ``kwh`` column
    (``column_map`` adapts other exports, e.g. ``{"timestamp": "localminute",
    "kwh": "usage"}``); any remaining columns are collected as per-appliance
    ground truth. Weekend days are dropped when ``weekday_filter`` is set.
    Days with a missing or duplicated interval are rejected and reported, not
    silently patched. Day columns come out in chronological order.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"input file does not exist: {path}")
    if MINUTES_PER_DAY % interval_minutes != 0:
        raise DataError(f"interval_minutes {interval_minutes} does not divide {MINUTES_PER_DAY}")
    slots_per_day = MINUTES_PER_DAY // interval_minutes
    column_map = column_map or {}
    ts_col = column_map.get("timestamp", "timestamp")
    kwh_col = column_map.get("kwh", "kwh")

    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file")
        if ts_col not in reader.fieldnames or kwh_col not in reader.fieldnames:
            raise DataError(
                f"{path}: header must contain {ts_col!r} and {kwh_col!r} columns, "
                f"found {reader.fieldnames}"
            )
        appliance_cols = [c for c in reader.fieldnames if c not in (ts_col, kwh_col)]

        days: dict[date, np.ndarray] = {}
        truth_days: dict[date, dict[str, np.ndarray]] = {}
        seen: dict[date, np.ndarray] = {}
        duplicated: set[date] = set()
        for row in reader:
            line_no = reader.line_num
            stamp = _parse_timestamp(row.get(ts_col) or "", line_no)
            day = stamp.date()
            if date_range is not None and not (date_range[0] <= day <= date_range[1]):
                continue
            if weekday_filter and stamp.weekday() >= 5:
                continue
            minute = stamp.hour * 60 + stamp.minute
            slot = minute // interval_minutes
            if day not in days:
                days[day] = np.zeros(slots_per_day)
                seen[day] = np.zeros(slots_per_day, dtype=bool)
                truth_days[day] = {c: np.zeros(slots_per_day) for c in appliance_cols}
            if seen[day][slot]:
                duplicated.add(day)
                continue
            seen[day][slot] = True
            days[day][slot] = _parse_energy(row.get(kwh_col), line_no, kwh_col)
            for c in appliance_cols:
                truth_days[day][c][slot] = _parse_energy(row.get(c), line_no, c)

    kept, rejected = [], []
    for day in sorted(days):
        if day in duplicated:
            rejected.append((day.isoformat(), "duplicate interval"))
        elif not seen[day].all():
            missing = int((~seen[day]).sum())
            rejected.append((day.isoformat(), f"{missing} missing intervals"))
        else:
            kept.append(day)
    if not kept:
        raise DataError(f"{path}: no complete days survived ingestion")

    values = np.column_stack([days[d] for d in kept])
    labels = [d.isoformat() for d in kept]
    ground_truth = None
    if appliance_cols:
        ground_truth = ApplianceGroundTruth(
            profiles={c: np.column_stack([truth_days[d][c] for d in kept]) for c in appliance_cols},
            day_labels=labels,
        )
    dataset = EnergyDataset(values=values, interval_minutes=interval_minutes, day_labels=labels)
    return IngestResult(dataset=dataset, ground_truth=ground_truth, rejected_days=rejected)


def load_appliance_config(path: str | Path) -> ModelConfig:
    """Read a YAML model configuration (class list plus trainer knobs)."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"config file does not exist: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")

    class_entries = raw.pop("classes", [])
    if class_entries is None:
        class_entries = []
    classes = []
    for entry in class_entries:
        if not isinstance(entry, dict) or "name" not in entry:
            raise ConfigError(f"{path}: every class needs at least a name: {entry!r}")
        known = {f.name for f in fields(ShiftableClassConfig)}
        unknown = set(entry) - known
        if unknown:
            raise ConfigError(f"{path}: class {entry['name']!r} has unknown keys {sorted(unknown)}")
        try:
            classes.append(ShiftableClassConfig(**entry))
        except TypeError as exc:
            raise ConfigError(f"{path}: class {entry['name']!r}: {exc}") from exc

    known = {f.name for f in fields(ModelConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    cfg = ModelConfig(classes=classes, **raw)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# matrix CSV round-trip


def write_matrix_csv(path: str | Path, matrix: np.ndarray, day_labels: list[str]):
    """Write a D x N matrix with header ``slot,<label>,...`` at full precision."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[1] != len(day_labels):
        raise DimensionMismatchError(
            f"matrix shape {matrix.shape} does not match {len(day_labels)} day labels"
        )
    integral = np.issubdtype(matrix.dtype, np.integer)
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["slot", *day_labels])
        for d in range(matrix.shape[0]):
            if integral:
                writer.writerow([d, *(int(v) for v in matrix[d])])
            else:
                writer.writerow([d, *(repr(float(v)) for v in matrix[d])])


def read_matrix_csv(path: str | Path) -> tuple[np.ndarray, list[str]]:
    """Read a matrix CSV written by `write_matrix_csv`; returns (matrix, labels)."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"matrix file does not exist: {path}")
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if not header or header[0] != "slot":
            raise DataError(f"{path}: expected a matrix CSV with a 'slot' header column")
        labels = header[1:]
        rows = []
        for row in reader:
            if len(row) != len(header):
                raise DataError(f"{path}: line {reader.line_num}: expected {len(header)} fields")
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise DataError(f"{path}: line {reader.line_num}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: no data rows")
    return np.array(rows), labels


def read_matrix_dataset(path: str | Path, interval_minutes: int | None = None) -> EnergyDataset:
    """Load a matrix CSV as an EnergyDataset (interval inferred from D when possible)."""
    values, labels = read_matrix_csv(path)
    if interval_minutes is None:
        d = values.shape[0]
        interval_minutes = MINUTES_PER_DAY // d if d and MINUTES_PER_DAY % d == 0 else 1
    return EnergyDataset(values=values, interval_minutes=interval_minutes, day_labels=labels)


def load_ground_truth(directory: str | Path) -> ApplianceGroundTruth:
    """Collect ``truth_<name>.csv`` files from a directory (as written by the
    synth command) into an ApplianceGroundTruth."""
    directory = Path(directory)
    files = sorted(directory.glob("truth_*.csv"))
    if not files:
        raise DataError(f"no truth_*.csv files under {directory}")
    profiles = {}
    labels: list[str] | None = None
    for f in files:
        name = f.stem[len("truth_"):]
        matrix, file_labels = read_matrix_csv(f)
        if labels is None:
            labels = file_labels
        elif labels != file_labels:
            raise DataError(f"{f}: day labels disagree with {files[0].name}")
        profiles[name] = matrix
    return ApplianceGroundTruth(profiles=profiles, day_labels=labels or [])


# ---------------------------------------------------------------------------
# model directories


def save_model(model: DisaggregationModel, directory: str | Path, day_labels: list[str]):
    """Write a reloadable model: structure as JSON, factor matrices as CSV."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    meta = {
        "fixed_rank": model.fixed.rank,
        "day_labels": day_labels,
        "classes": [
            {
                "name": cls.name,
                "peak": cls.peak,
                "l0_budget": cls.l0_budget,
                "rows": cls.basis.rows,
                "support_sets": [s.tolist() for s in cls.basis.support_sets],
            }
            for cls in model.shiftable
        ],
    }
    (directory / "model.json").write_text(json.dumps(meta, indent=1))
    rank_labels = [f"f{k}" for k in range(model.fixed.rank)]
    write_matrix_csv(directory / "fixed_basis.csv", model.fixed.basis, rank_labels)
    write_matrix_csv(directory / "fixed_weights.csv", model.fixed.weights, day_labels)
    for cls in model.shiftable:
        write_matrix_csv(directory / f"weights_{cls.name}.csv", cls.weights, day_labels)


def load_model(directory: str | Path) -> tuple[DisaggregationModel, list[str]]:
    """Reload a model directory written by `save_model`."""
    directory = Path(directory)
    meta_path = directory / "model.json"
    if not meta_path.exists():
        raise DataError(f"not a model directory (no model.json): {directory}")
    meta = json.loads(meta_path.read_text())
    basis, _ = read_matrix_csv(directory / "fixed_basis.csv")
    weights, _ = read_matrix_csv(directory / "fixed_weights.csv")
    shiftable = []
    for entry in meta["classes"]:
        class_basis = SparseBinaryBasis(
            rows=entry["rows"],
            support_sets=tuple(np.array(s, dtype=np.intp) for s in entry["support_sets"]),
        )
        class_weights, _ = read_matrix_csv(directory / f"weights_{entry['name']}.csv")
        shiftable.append(
            ShiftableLoadClass(
                name=entry["name"],
                peak=entry["peak"],
                l0_budget=entry["l0_budget"],
                basis=class_basis,
                weights=class_weights.astype(np.int8),
            )
        )
    model = DisaggregationModel(
        fixed=FixedLoadFactors(basis=basis, weights=weights), shiftable=shiftable
    )
    model.validate()
    return model, list(meta["day_labels"])


def render_report(report: FitReport) -> str:
    """FitReport as a structured text document.

    Wall-clock time is deliberately left out so identical runs produce
    byte-identical files; it is reported on stdout by the CLI instead.
    """
    lines = [
        f"iterations_run: {report.iterations_run}",
        f"termination: {report.termination}",
        f"objective_initial: {report.objective_trace[0]!r}",
        f"objective_final: {report.objective_trace[-1]!r}",
    ]
    cfg = report.config_echo
    if cfg is not None:
        lines.append("config:")
        lines.append(f"  fixed_rank: {cfg.fixed_rank}")
        lines.append(f"  update_rule: {cfg.update_rule}")
        lines.append(f"  epsilon: {cfg.epsilon!r}")
        lines.append(f"  max_iterations: {cfg.max_iterations}")
        lines.append(f"  convergence_tol: {cfg.convergence_tol!r}")
        lines.append(f"  sample_order: {cfg.sample_order}")
        lines.append(f"  class_order: {cfg.class_order}")
        lines.append(f"  rng_seed: {cfg.rng_seed}")
        lines.append("  classes:")
        for cls in cfg.classes:
            lines.append(
                f"    - name: {cls.name}, peak: {cls.peak!r}, l0_budget: {cls.l0_budget}, "
                f"basis_kind: {cls.basis_kind}, pulse_width: {cls.pulse_width}"
            )
    return "\n".join(lines) + "\n"


def export_disaggregation(
    model: DisaggregationModel,
    dataset: EnergyDataset,
    report: FitReport,
    out_dir: str | Path,
):
    """Write the full disaggregation of a fit: per-class and fixed
    reconstructions, the aggregate reconstruction, the objective trace, the
    report, and a reloadable copy of the model (plus the input echo)."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise DataError(f"output directory is not writable: {out_dir}: {exc}") from exc

    labels = dataset.day_labels
    write_matrix_csv(out_dir / "fixed.csv", model.fixed.contribution(), labels)
    total = model.fixed.contribution()
    for cls in model.shiftable:
        contribution = cls.contribution()
        total += contribution
        write_matrix_csv(out_dir / f"class_{cls.name}.csv", contribution, labels)
    write_matrix_csv(out_dir / "reconstruction.csv", total, labels)

    with (out_dir / "objective_trace.csv").open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["iteration", "objective"])
        for i, phi in enumerate(report.objective_trace):
            writer.writerow([i, repr(float(phi))])

    (out_dir / "report.txt").write_text(render_report(report))
    save_model(model, out_dir / "model", labels)
    write_matrix_csv(out_dir / "model" / "input.csv", dataset.values, labels)
