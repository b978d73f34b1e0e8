"""Core domain types: datasets, factor matrices, model configuration.

Conventions used throughout the package:

* energy matrices are D x N (time slots down the rows, days across the
  columns), stored as dense float arrays;
* the fixed load is a real-valued non-negative factor pair (basis, weights);
* each shiftable load class has a binary basis kept in support-set form plus
  a binary weight matrix, and contributes ``peak * basis @ weights`` to the
  reconstruction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionMismatchError

UPDATE_RULES = ("paper-kl", "frobenius")
ORDERS = ("sequential", "random")
BASIS_KINDS = ("identity", "rectangular-pulses")

_NAME_RE = re.compile(r"^[A-Za-z0-9_-]+$")


@dataclass(eq=False)
class EnergyDataset:
    """A D x N matrix of non-negative energy readings with day metadata."""

    values: np.ndarray
    interval_minutes: int = 1
    day_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise DimensionMismatchError(
                f"dataset values must be 2-D, got shape {self.values.shape}"
            )
        if not np.isfinite(self.values).all():
            raise ValueError("dataset contains non-finite energy readings")
        if np.any(self.values < 0):
            raise ValueError("dataset contains negative energy readings")
        if self.interval_minutes < 1:
            raise ValueError("interval_minutes must be a positive integer")
        if not self.day_labels:
            self.day_labels = [f"day-{n:03d}" for n in range(self.values.shape[1])]
        if len(self.day_labels) != self.values.shape[1]:
            raise DimensionMismatchError(
                f"{len(self.day_labels)} day labels for {self.values.shape[1]} columns"
            )

    @property
    def num_slots(self) -> int:
        return self.values.shape[0]

    @property
    def num_days(self) -> int:
        return self.values.shape[1]


@dataclass(eq=False)
class FixedLoadFactors:
    """Real-valued non-negative factors for the fixed (background) load.

    ``basis`` is D x F with unit-norm columns after any update cycle;
    ``weights`` is F x N.
    """

    basis: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.basis = np.asarray(self.basis, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.basis.ndim != 2 or self.weights.ndim != 2:
            raise DimensionMismatchError("fixed factors must be 2-D matrices")
        if self.basis.shape[1] != self.weights.shape[0]:
            raise DimensionMismatchError(
                f"fixed basis has {self.basis.shape[1]} columns but weights has "
                f"{self.weights.shape[0]} rows"
            )
        if not (np.isfinite(self.basis).all() and np.isfinite(self.weights).all()):
            raise ValueError("fixed load factors must be finite")
        if np.any(self.basis < 0) or np.any(self.weights < 0):
            raise ValueError("fixed load factors must be non-negative")

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def contribution(self) -> np.ndarray:
        """The D x N fixed-load component of the reconstruction."""
        return self.basis @ self.weights

    def copy(self) -> "FixedLoadFactors":
        return FixedLoadFactors(self.basis.copy(), self.weights.copy())


@dataclass(eq=False)
class SparseBinaryBasis:
    """A D x S binary basis stored as one support set of row indices per column."""

    rows: int
    support_sets: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.rows < 1:
            raise ValueError("basis must have at least one row")
        sets = []
        for k, idx in enumerate(self.support_sets):
            idx = np.asarray(idx, dtype=np.intp)
            if idx.ndim != 1:
                raise ValueError(f"support set {k} is not a flat index sequence")
            if idx.size and (idx.min() < 0 or idx.max() >= self.rows):
                raise ValueError(f"support set {k} has indices outside [0, {self.rows})")
            if len(np.unique(idx)) != len(idx):
                raise ValueError(f"support set {k} contains duplicate indices")
            sets.append(np.sort(idx))
        self.support_sets = tuple(sets)
        # flat layout for vectorized per-column sums during hill climbing
        self._sizes = np.array([len(s) for s in self.support_sets], dtype=np.intp)
        self._flat_rows = (
            np.concatenate(self.support_sets) if self.support_sets else np.empty(0, np.intp)
        )
        self._flat_cols = np.repeat(np.arange(self.num_columns, dtype=np.intp), self._sizes)

    @property
    def num_columns(self) -> int:
        return len(self.support_sets)

    @property
    def column_sizes(self) -> np.ndarray:
        return self._sizes

    def column_sums(self, vector: np.ndarray) -> np.ndarray:
        """For each column k, the sum of ``vector`` over the support set D_k."""
        return np.bincount(
            self._flat_cols, weights=vector[self._flat_rows], minlength=self.num_columns
        )

    def apply(self, weights_column: np.ndarray) -> np.ndarray:
        """Dense matrix-vector product ``W @ h`` using the support sets."""
        out = np.zeros(self.rows)
        for k in np.flatnonzero(weights_column):
            out[self.support_sets[k]] += weights_column[k]
        return out

    def apply_matrix(self, weights: np.ndarray) -> np.ndarray:
        """Dense matrix product ``W @ H`` for an S x N weight matrix."""
        if weights.shape[0] != self.num_columns:
            raise DimensionMismatchError(
                f"weights has {weights.shape[0]} rows for a {self.num_columns}-column basis"
            )
        return np.column_stack([self.apply(weights[:, n]) for n in range(weights.shape[1])])

    def to_dense(self) -> np.ndarray:
        """The equivalent dense D x S binary matrix (float 0/1 entries)."""
        dense = np.zeros((self.rows, self.num_columns))
        for k, idx in enumerate(self.support_sets):
            dense[idx, k] = 1.0
        return dense


@dataclass(eq=False)
class ShiftableLoadClass:
    """One duty-cycled appliance class: peak energy per ON slot, an L0 budget,
    an immutable binary basis, and binary weights (one column per day)."""

    name: str
    peak: float
    l0_budget: int
    basis: SparseBinaryBasis
    weights: np.ndarray

    def __post_init__(self):
        if self.peak <= 0:
            raise ValueError(f"class {self.name!r}: peak must be positive")
        if self.l0_budget < 1:
            raise ValueError(f"class {self.name!r}: l0_budget must be >= 1")
        self.weights = np.asarray(self.weights)
        if self.weights.dtype != np.int8:
            self.weights = self.weights.astype(np.int8)
        if self.weights.ndim != 2 or self.weights.shape[0] != self.basis.num_columns:
            raise DimensionMismatchError(
                f"class {self.name!r}: weights shape {self.weights.shape} does not match "
                f"basis with {self.basis.num_columns} columns"
            )
        if not np.isin(self.weights, (0, 1)).all():
            raise ValueError(f"class {self.name!r}: weights must be binary")
        counts = self.weights.sum(axis=0)
        if np.any(counts > self.l0_budget):
            raise ValueError(
                f"class {self.name!r}: a weight column exceeds the L0 budget "
                f"({int(counts.max())} > {self.l0_budget})"
            )

    def contribution(self) -> np.ndarray:
        """The D x N component this class adds to the reconstruction."""
        return self.peak * self.basis.apply_matrix(self.weights.astype(float))

    def contribution_column(self, n: int) -> np.ndarray:
        return self.peak * self.basis.apply(self.weights[:, n].astype(float))

    def copy(self) -> "ShiftableLoadClass":
        return ShiftableLoadClass(
            self.name, self.peak, self.l0_budget, self.basis, self.weights.copy()
        )


@dataclass(eq=False)
class DisaggregationModel:
    """A fixed-load factor pair plus an ordered sequence of shiftable classes."""

    fixed: FixedLoadFactors
    shiftable: list[ShiftableLoadClass] = field(default_factory=list)

    def validate(self):
        d, n = self.fixed.basis.shape[0], self.fixed.weights.shape[1]
        for cls in self.shiftable:
            if cls.basis.rows != d:
                raise DimensionMismatchError(
                    f"shiftable class {cls.name!r}: basis has {cls.basis.rows} rows, "
                    f"fixed basis has {d}"
                )
            if cls.weights.shape[1] != n:
                raise DimensionMismatchError(
                    f"shiftable class {cls.name!r}: weights cover {cls.weights.shape[1]} "
                    f"days, fixed weights cover {n}"
                )

    @property
    def num_slots(self) -> int:
        return self.fixed.basis.shape[0]

    @property
    def num_days(self) -> int:
        return self.fixed.weights.shape[1]

    def class_names(self) -> list[str]:
        return [cls.name for cls in self.shiftable]

    def copy(self) -> "DisaggregationModel":
        return DisaggregationModel(self.fixed.copy(), [c.copy() for c in self.shiftable])


def reconstruct(model: DisaggregationModel) -> np.ndarray:
    """The model's D x N reconstruction: fixed part plus peak-scaled binary parts."""
    model.validate()
    out = model.fixed.contribution()
    for cls in model.shiftable:
        out += cls.contribution()
    return out


def make_basis(kind: str, rows: int, pulse_width: int = 1) -> SparseBinaryBasis:
    """Build a binary basis of the given kind.

    ``identity`` gives one column per time slot (pulse_width is ignored);
    ``rectangular-pulses`` gives one column per window of ``pulse_width``
    consecutive slots, so S = rows - pulse_width + 1.
    """
    if kind not in BASIS_KINDS:
        raise ConfigError(f"unknown basis kind {kind!r}; expected one of {BASIS_KINDS}")
    if rows < 1:
        raise ConfigError("basis must have at least one row")
    if pulse_width < 1:
        raise ConfigError("pulse_width must be >= 1")
    if kind == "identity":
        sets = tuple(np.array([k], dtype=np.intp) for k in range(rows))
    else:
        if pulse_width > rows:
            raise ConfigError(f"pulse_width {pulse_width} exceeds basis rows {rows}")
        sets = tuple(
            np.arange(k, k + pulse_width, dtype=np.intp)
            for k in range(rows - pulse_width + 1)
        )
    return SparseBinaryBasis(rows=rows, support_sets=sets)


@dataclass
class ShiftableClassConfig:
    """Per-appliance configuration: duty-cycle peak, L0 budget, basis choice."""

    name: str
    peak: float
    l0_budget: int
    basis_kind: str = "identity"
    pulse_width: int = 1


@dataclass
class ModelConfig:
    """Everything `fit` needs besides the data itself."""

    fixed_rank: int = 1
    classes: list[ShiftableClassConfig] = field(default_factory=list)
    update_rule: str = "paper-kl"
    epsilon: float = 1e-12
    max_iterations: int = 200
    convergence_tol: float = 1e-6
    sample_order: str = "sequential"
    class_order: str = "sequential"
    rng_seed: int = 0

    def validate(self):
        if self.fixed_rank < 1:
            raise ConfigError("fixed_rank must be >= 1")
        if self.update_rule not in UPDATE_RULES:
            raise ConfigError(
                f"update_rule must be one of {UPDATE_RULES}, got {self.update_rule!r}"
            )
        if self.sample_order not in ORDERS or self.class_order not in ORDERS:
            raise ConfigError(f"sample_order and class_order must be one of {ORDERS}")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if self.convergence_tol < 0:
            raise ConfigError("convergence_tol must be >= 0")
        seen = set()
        for cls in self.classes:
            if not _NAME_RE.match(cls.name):
                raise ConfigError(
                    f"class name {cls.name!r} must match [A-Za-z0-9_-]+ "
                    "(names become file names)"
                )
            if cls.name in seen:
                raise ConfigError(f"duplicate class name {cls.name!r}")
            seen.add(cls.name)
            if cls.peak <= 0:
                raise ConfigError(f"class {cls.name!r}: peak must be positive")
            if cls.l0_budget < 1:
                raise ConfigError(f"class {cls.name!r}: l0_budget must be >= 1")
            if cls.basis_kind not in BASIS_KINDS:
                raise ConfigError(
                    f"class {cls.name!r}: basis_kind must be one of {BASIS_KINDS}"
                )
            if cls.pulse_width < 1:
                raise ConfigError(f"class {cls.name!r}: pulse_width must be >= 1")
