"""Block-coordinate training loop.

Each outer iteration updates the fixed-load basis, renormalizes its columns
(pushing the scale into the weights so the product is unchanged), updates the
fixed-load weights, and then sweeps every (day, class) pair rebuilding the
binary weight column with the greedy solver. The combined loop interleaves
two different descent directions, so the recorded objective trace is not
guaranteed monotone; monotonicity holds per block (see tests).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import NumericalError
from .hillclimb import compute_residual, hill_climb
from .model import (
    DisaggregationModel,
    EnergyDataset,
    FixedLoadFactors,
    ModelConfig,
    ShiftableLoadClass,
    make_basis,
)
from .objective import frobenius_objective
from .updates import (
    normalize_basis_columns,
    normalize_fixed_factors,
    update_fixed_basis,
    update_fixed_weights,
)

ProgressHook = Callable[[int, float, DisaggregationModel], None]

CONVERGED = "converged"
MAX_ITERATIONS = "max-iterations"


@dataclass(eq=False)
class FitReport:
    """Objective trace and bookkeeping for one training run.

    ``objective_trace`` has ``iterations_run + 1`` entries: the objective of
    the initial model followed by one value per completed iteration.
    """

    objective_trace: list[float] = field(default_factory=list)
    iterations_run: int = 0
    termination: str = MAX_ITERATIONS
    wall_time: float = 0.0
    config_echo: ModelConfig | None = None


def initialize_model(
    num_slots: int, num_days: int, cfg: ModelConfig, rng: np.random.Generator
) -> DisaggregationModel:
    """Fresh starting point: strictly positive fixed factors (uniform (0, 1],
    basis columns normalized) and all-zero binary weights."""
    basis, _ = normalize_basis_columns(
        1.0 - rng.random((num_slots, cfg.fixed_rank)), cfg.epsilon
    )
    weights = 1.0 - rng.random((cfg.fixed_rank, num_days))
    shiftable = []
    for c in cfg.classes:
        class_basis = make_basis(c.basis_kind, num_slots, c.pulse_width)
        shiftable.append(
            ShiftableLoadClass(
                name=c.name,
                peak=c.peak,
                l0_budget=c.l0_budget,
                basis=class_basis,
                weights=np.zeros((class_basis.num_columns, num_days), dtype=np.int8),
            )
        )
    return DisaggregationModel(
        fixed=FixedLoadFactors(basis=basis, weights=weights), shiftable=shiftable
    )


def fit(
    dataset: EnergyDataset,
    cfg: ModelConfig,
    progress: ProgressHook | None = None,
) -> tuple[DisaggregationModel, FitReport]:
    """Train a disaggregation model on the dataset.

    The progress hook, when given, is called after the initial objective
    evaluation and after every iteration with (iteration index, objective,
    current model). Identical (dataset, cfg) inputs give bit-identical output;
    when an order is "random" the permutations come from the seeded generator
    (a fresh class permutation is drawn per day).
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.rng_seed)
    X = dataset.values
    num_slots, num_days = X.shape

    started = time.perf_counter()
    model = initialize_model(num_slots, num_days, cfg, rng)

    phi = frobenius_objective(X, model).total
    if not np.isfinite(phi):
        raise NumericalError("objective is non-finite at initialization")
    report = FitReport(objective_trace=[phi], config_echo=cfg)
    if progress is not None:
        progress(0, phi, model)

    for iteration in range(1, cfg.max_iterations + 1):
        try:
            new_basis = update_fixed_basis(X, model, cfg)
            model.fixed = FixedLoadFactors(basis=new_basis, weights=model.fixed.weights)
            model.fixed = normalize_fixed_factors(model.fixed, cfg.epsilon)
            new_weights = update_fixed_weights(X, model, cfg)
            model.fixed = FixedLoadFactors(basis=model.fixed.basis, weights=new_weights)
        except ValueError as exc:
            raise NumericalError(
                f"fixed-factor update failed at iteration {iteration}: {exc}"
            ) from exc

        if cfg.sample_order == "random":
            day_order = rng.permutation(num_days)
        else:
            day_order = np.arange(num_days)
        for n in day_order:
            if cfg.class_order == "random":
                class_order = rng.permutation(len(model.shiftable))
            else:
                class_order = np.arange(len(model.shiftable))
            for j in class_order:
                cls = model.shiftable[j]
                residual = compute_residual(X, model, int(j), int(n))
                h, _ = hill_climb(cls.basis, residual, cls.l0_budget)
                cls.weights[:, n] = h

        previous = phi
        phi = frobenius_objective(X, model).total
        if not np.isfinite(phi):
            raise NumericalError(f"objective became non-finite at iteration {iteration}")
        report.objective_trace.append(phi)
        report.iterations_run = iteration
        if progress is not None:
            progress(iteration, phi, model)

        if abs(phi - previous) / max(previous, cfg.epsilon) < cfg.convergence_tol:
            report.termination = CONVERGED
            break
    else:
        report.termination = MAX_ITERATIONS

    report.wall_time = time.perf_counter() - started
    return model, report
