"""Synthetic household generator with known per-appliance ground truth.

A generated scene is the sum of a smooth fixed profile and a handful of
duty-cycled appliance classes, each firing a configured number of ON slots
per day as non-overlapping rectangular pulses. Because the aggregate is
assembled from an actual `DisaggregationModel`, a noise-free generation is
*exactly* reconstructible: it defines the global optimum any solver should
be able to find.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from datetime import date, timedelta
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError, DataError
from .model import (
    _NAME_RE,
    DisaggregationModel,
    EnergyDataset,
    FixedLoadFactors,
    ShiftableLoadClass,
    make_basis,
    reconstruct,
)
from .pipeline import MINUTES_PER_DAY, ApplianceGroundTruth

FIXED_PROFILES = ("constant", "sinusoidal-day")
DISTRIBUTIONS = ("uniform", "clustered", "staggered")


@dataclass
class SynthClassSpec:
    """One appliance class to synthesize.

    Args:
        name: filesystem-safe class name.
        peak: per-slot power draw while ON.
        l0_budget: L0 budget the solver will be given for this class; the
            true activity never exceeds it.
        on_count: ON slots per day (must be a multiple of pulse_width).
        pulse_width: length of each rectangular pulse in slots.
        distribution: "uniform" places pulses anywhere in the day,
            "clustered" confines them to `window`, and "staggered" assigns
            each pulse a fixed lane of the window and slides it
            deterministically across days. Staggered placement keeps every
            slot's ON share across days low, which is what makes a class
            distinguishable from the fixed load: a pulse that recurs at the
            same slot on most days is indistinguishable from base load.
        window: half-open slot range for clustered/staggered placement;
            defaults to the middle third of the day.
    """

    name: str
    peak: float
    l0_budget: int
    on_count: int
    pulse_width: int = 1
    distribution: str = "uniform"
    window: tuple[int, int] | None = None

    def validate(self, num_slots: int):
        if not _NAME_RE.match(self.name):
            raise ConfigError(f"class name {self.name!r} is not filesystem-safe")
        if self.peak <= 0:
            raise ConfigError(f"{self.name}: peak must be positive, got {self.peak}")
        if self.l0_budget < 1:
            raise ConfigError(f"{self.name}: l0_budget must be >= 1, got {self.l0_budget}")
        if self.pulse_width < 1:
            raise ConfigError(f"{self.name}: pulse_width must be >= 1")
        if self.on_count < 0:
            raise ConfigError(f"{self.name}: on_count must be >= 0, got {self.on_count}")
        if self.on_count % self.pulse_width != 0:
            raise ConfigError(
                f"{self.name}: on_count {self.on_count} is not a multiple of "
                f"pulse_width {self.pulse_width}"
            )
        if self.on_count > self.l0_budget:
            raise ConfigError(
                f"{self.name}: on_count {self.on_count} exceeds l0_budget {self.l0_budget}"
            )
        if self.distribution not in DISTRIBUTIONS:
            raise ConfigError(
                f"{self.name}: distribution must be one of {DISTRIBUTIONS}, "
                f"got {self.distribution!r}"
            )
        lo, hi = self.placement_window(num_slots)
        if not (0 <= lo < hi <= num_slots):
            raise ConfigError(f"{self.name}: window {(lo, hi)} not inside [0, {num_slots})")
        if hi - lo < self.on_count:
            raise ConfigError(
                f"{self.name}: cannot fit {self.on_count} ON slots inside "
                f"window {(lo, hi)}"
            )
        if self.distribution == "staggered" and self.on_count > 0:
            lanes = self.on_count // self.pulse_width
            if (hi - lo) // lanes < self.pulse_width:
                raise ConfigError(
                    f"{self.name}: window {(lo, hi)} too small for {lanes} "
                    f"staggered lanes of width {self.pulse_width}"
                )

    def placement_window(self, num_slots: int) -> tuple[int, int]:
        if self.distribution == "uniform":
            return (0, num_slots)
        if self.window is not None:
            return (int(self.window[0]), int(self.window[1]))
        return (num_slots // 3, 2 * num_slots // 3)


@dataclass
class SynthSpec:
    """Scene description consumed by `generate`."""

    num_slots: int = 1440
    num_days: int = 15
    fixed_profile: str = "sinusoidal-day"
    fixed_scale: float = 0.4
    classes: list[SynthClassSpec] = field(default_factory=list)
    noise_sigma: float = 0.0
    rng_seed: int = 0
    start_date: str = "2019-04-01"

    def validate(self):
        if self.num_slots < 1 or self.num_days < 1:
            raise ConfigError(
                f"num_slots and num_days must be positive, got "
                f"{self.num_slots} x {self.num_days}"
            )
        if isinstance(self.fixed_profile, str):
            if self.fixed_profile not in FIXED_PROFILES:
                raise ConfigError(
                    f"fixed_profile must be one of {FIXED_PROFILES} or an explicit "
                    f"vector, got {self.fixed_profile!r}"
                )
        else:
            profile = np.asarray(self.fixed_profile, dtype=float)
            if profile.shape != (self.num_slots,):
                raise ConfigError(
                    f"explicit fixed_profile must have shape ({self.num_slots},), "
                    f"got {profile.shape}"
                )
            if np.any(profile < 0) or not np.all(np.isfinite(profile)):
                raise ConfigError("explicit fixed_profile must be finite and non-negative")
        if self.fixed_scale < 0:
            raise ConfigError(f"fixed_scale must be >= 0, got {self.fixed_scale}")
        if self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        names = [cls.name for cls in self.classes]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate class names: {names}")
        for cls in self.classes:
            cls.validate(self.num_slots)
        try:
            date.fromisoformat(self.start_date)
        except ValueError as exc:
            raise ConfigError(f"bad start_date {self.start_date!r}: {exc}") from exc


def _fixed_profile_vector(spec: SynthSpec) -> np.ndarray:
    if not isinstance(spec.fixed_profile, str):
        return np.asarray(spec.fixed_profile, dtype=float).copy()
    d = spec.num_slots
    if spec.fixed_profile == "constant":
        return np.full(d, spec.fixed_scale)
    # sinusoidal-day: one smooth hump peaking mid-day, never below 25 % of scale
    phase = np.arange(d) / d
    return spec.fixed_scale * (0.25 + 0.75 * 0.5 * (1.0 - np.cos(2.0 * np.pi * phase)))


def weekday_labels(start: str, count: int) -> list[str]:
    """ISO dates of `count` consecutive weekdays starting at `start`
    (itself moved forward to a weekday if needed)."""
    day = date.fromisoformat(start)
    labels = []
    while len(labels) < count:
        if day.weekday() < 5:
            labels.append(day.isoformat())
        day += timedelta(days=1)
    return labels


def _place_pulses(
    rng: np.random.Generator, window: tuple[int, int], pulses: int, width: int
) -> np.ndarray:
    """Sample `pulses` non-overlapping width-`width` start slots inside the
    half-open `window`, uniformly over all feasible placements."""
    lo, hi = window
    slack = (hi - lo) - pulses * width
    gaps = np.sort(rng.integers(0, slack + 1, size=pulses))
    return lo + gaps + np.arange(pulses) * width


def _staggered_starts(
    window: tuple[int, int], pulses: int, width: int, day: int, num_days: int
) -> np.ndarray:
    """Deterministic start slots: pulse i lives in lane i of the window and
    slides along it as the day index advances, so cross-day coverage of any
    single slot stays low and roughly even."""
    lo, hi = window
    if pulses == 0:
        return np.zeros(0, dtype=int)
    stride = (hi - lo) // pulses
    travel = stride - width
    offset = (day * travel) // max(num_days - 1, 1) if travel > 0 else 0
    return lo + np.arange(pulses) * stride + offset


def generate(
    spec: SynthSpec,
) -> tuple[EnergyDataset, ApplianceGroundTruth, DisaggregationModel]:
    """Draw one synthetic scene.

    Returns the aggregate dataset, the per-class ground-truth matrices, and
    the true model that produced them. With ``noise_sigma == 0`` the dataset
    equals ``reconstruct(true_model)`` bit for bit.
    """
    spec.validate()
    rng = np.random.default_rng(spec.rng_seed)
    d, n = spec.num_slots, spec.num_days

    profile = _fixed_profile_vector(spec)
    norm = float(np.linalg.norm(profile))
    if norm > 0:
        basis = (profile / norm)[:, None]
        weights = np.full((1, n), norm)
    else:
        basis = np.full((d, 1), 1.0 / np.sqrt(d))
        weights = np.zeros((1, n))
    fixed = FixedLoadFactors(basis=basis, weights=weights)

    shiftable = []
    for cls in spec.classes:
        window = cls.placement_window(d)
        pulses = cls.on_count // cls.pulse_width
        h = np.zeros((d, n), dtype=np.int8)
        for day in range(n):
            if cls.distribution == "staggered":
                starts = _staggered_starts(window, pulses, cls.pulse_width, day, n)
            else:
                starts = _place_pulses(rng, window, pulses, cls.pulse_width)
            for s in starts:
                h[s : s + cls.pulse_width, day] = 1
        shiftable.append(
            ShiftableLoadClass(
                name=cls.name,
                peak=cls.peak,
                l0_budget=cls.l0_budget,
                basis=make_basis("identity", d),
                weights=h,
            )
        )

    true_model = DisaggregationModel(fixed=fixed, shiftable=shiftable)
    true_model.validate()

    clean = reconstruct(true_model)
    if spec.noise_sigma > 0:
        values = np.clip(clean + rng.normal(0.0, spec.noise_sigma, size=(d, n)), 0.0, None)
    else:
        values = clean

    labels = weekday_labels(spec.start_date, n)
    interval = MINUTES_PER_DAY // d if MINUTES_PER_DAY % d == 0 else 1
    dataset = EnergyDataset(values=values, interval_minutes=interval, day_labels=labels)
    truth = ApplianceGroundTruth(
        profiles={cls.name: cls.contribution() for cls in shiftable},
        day_labels=labels,
    )
    return dataset, truth, true_model


def load_synth_spec(path: str | Path) -> SynthSpec:
    """Read a YAML scene description into a SynthSpec."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"spec file does not exist: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")

    class_entries = raw.pop("classes", [])
    classes = []
    for entry in class_entries or []:
        if not isinstance(entry, dict) or "name" not in entry:
            raise ConfigError(f"{path}: every class needs at least a name: {entry!r}")
        known = {f.name for f in fields(SynthClassSpec)}
        unknown = set(entry) - known
        if unknown:
            raise ConfigError(f"{path}: class {entry['name']!r} has unknown keys {sorted(unknown)}")
        if "window" in entry and entry["window"] is not None:
            entry["window"] = tuple(entry["window"])
        try:
            classes.append(SynthClassSpec(**entry))
        except TypeError as exc:
            raise ConfigError(f"{path}: class {entry['name']!r}: {exc}") from exc

    known = {f.name for f in fields(SynthSpec)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    spec = SynthSpec(classes=classes, **raw)
    spec.validate()
    return spec
