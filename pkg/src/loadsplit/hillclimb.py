"""Greedy binary weight solver for shiftable loads, plus an exhaustive oracle.

The solver minimizes ``||r - W h||_2^2`` over binary h with at most L ones,
where W is a sparse binary basis and r a peak-normalized residual. Because a
selected column k only touches the rows in its support set D_k, adding column
k changes the squared error by

    delta_k = sum_{d in D_k} (1 - 2 r_d),

and committing the selection is the in-place decrement ``r[D_k] -= 1``. The
greedy loop repeatedly takes the most negative delta_k until the L0 budget is
exhausted or no delta_k is negative (for a one-slot-per-column basis that is
the moment every remaining residual entry drops below 0.5). Candidate deltas
are rescanned from the support sets each step; instances here are far too
small to justify a priority structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import DimensionMismatchError
from .model import DisaggregationModel, SparseBinaryBasis

BUDGET_EXHAUSTED = "budget-exhausted"
NO_IMPROVING_MOVE = "no-improving-move"


@dataclass(eq=False)
class Residual:
    """A single day's unexplained energy, already scaled by 1/peak.

    Entries may be negative when other classes over-subtract.
    """

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise DimensionMismatchError("residual must be a flat vector")
        if not np.isfinite(self.values).all():
            raise ValueError("residual contains non-finite entries")


@dataclass(eq=False)
class HillClimbTrace:
    """Per-step record of one greedy run."""

    selected_indices: list[int] = field(default_factory=list)
    objective_before: list[float] = field(default_factory=list)
    objective_after: list[float] = field(default_factory=list)
    termination: str = NO_IMPROVING_MOVE


def compute_residual(
    X: np.ndarray, model: DisaggregationModel, class_index: int, sample_index: int
) -> Residual:
    """Day ``sample_index`` minus every component except class ``class_index``,
    scaled by that class's peak."""
    X = np.asarray(X, dtype=float)
    cls = model.shiftable[class_index]
    r = X[:, sample_index] - model.fixed.basis @ model.fixed.weights[:, sample_index]
    for j, other in enumerate(model.shiftable):
        if j != class_index:
            r -= other.contribution_column(sample_index)
    return Residual(values=r / cls.peak)


def hill_climb(
    basis: SparseBinaryBasis, residual: Residual | np.ndarray, budget: int
) -> tuple[np.ndarray, HillClimbTrace]:
    """Greedily build a binary weight vector with at most ``budget`` ones.

    Returns the int8 selection vector and the trace of accepted steps. Each
    accepted step strictly lowers the squared error; an index never re-enters
    the candidate set once selected.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    r = np.array(residual.values if isinstance(residual, Residual) else residual, dtype=float)
    if r.shape != (basis.rows,):
        raise DimensionMismatchError(
            f"residual has {r.shape[0]} entries for a {basis.rows}-row basis"
        )
    sizes = basis.column_sizes.astype(float)
    h = np.zeros(basis.num_columns, dtype=np.int8)
    trace = HillClimbTrace()

    while len(trace.selected_indices) < budget:
        delta = sizes - 2.0 * basis.column_sums(r)
        delta[h == 1] = np.inf  # selected columns leave the candidate set
        k = int(np.argmin(delta))  # first minimum: lowest-index tie-break
        if not delta[k] < 0:
            trace.termination = NO_IMPROVING_MOVE
            return h, trace
        phi_before = float(r @ r)
        h[k] = 1
        r[basis.support_sets[k]] -= 1.0
        trace.selected_indices.append(k)
        trace.objective_before.append(phi_before)
        trace.objective_after.append(phi_before + float(delta[k]))

    trace.termination = BUDGET_EXHAUSTED
    return h, trace


def brute_force_best(
    basis: SparseBinaryBasis, residual: Residual | np.ndarray, budget: int
) -> tuple[np.ndarray, float]:
    """Exhaustively minimize ``||r - W h||_2^2`` over binary h with at most
    ``budget`` ones. Ties keep the first optimum in size-then-index
    enumeration order, mirroring the greedy's preference for fewer columns
    and lower indices.

    Only intended as a validation oracle; refuses more than 20 columns.
    """
    if basis.num_columns > 20:
        raise ValueError(
            f"exhaustive search over {basis.num_columns} columns is not tractable (max 20)"
        )
    if budget < 1:
        raise ValueError("budget must be >= 1")
    r = np.asarray(residual.values if isinstance(residual, Residual) else residual, dtype=float)
    if r.shape != (basis.rows,):
        raise DimensionMismatchError(
            f"residual has {r.shape[0]} entries for a {basis.rows}-row basis"
        )
    dense = basis.to_dense()
    best_h = np.zeros(basis.num_columns, dtype=np.int8)
    best_obj = float(r @ r)
    for size in range(1, min(budget, basis.num_columns) + 1):
        for combo in combinations(range(basis.num_columns), size):
            diff = r - dense[:, combo].sum(axis=1)
            obj = float(diff @ diff)
            if obj < best_obj:
                best_obj = obj
                best_h = np.zeros(basis.num_columns, dtype=np.int8)
                best_h[list(combo)] = 1
    return best_h, best_obj
