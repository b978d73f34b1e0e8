"""Figure helpers (headless backend, vector output)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import DataError
from .model import DisaggregationModel, EnergyDataset, reconstruct


def plot_disaggregation(
    dataset: EnergyDataset,
    model: DisaggregationModel,
    day_index: int,
    out_path: str | Path,
    truth_profiles: dict[str, np.ndarray] | None = None,
) -> Path:
    """One day's disaggregation as stacked panels.

    Top panel: observed aggregate with the model reconstruction overlaid.
    Second panel: the fixed-load contribution. One further panel per
    shiftable class, optionally with its ground-truth profile behind it.
    Returns the path written (SVG).
    """
    if not (0 <= day_index < dataset.num_days):
        raise DataError(
            f"day_index {day_index} out of range for {dataset.num_days} days"
        )
    label = dataset.day_labels[day_index]
    slots = np.arange(dataset.num_slots)
    observed = dataset.values[:, day_index]
    reconstructed = reconstruct(model)[:, day_index]

    panels = 2 + len(model.shiftable)
    fig, axes = plt.subplots(
        panels, 1, figsize=(10, 2.0 * panels), sharex=True, constrained_layout=True
    )
    axes = np.atleast_1d(axes)

    axes[0].plot(slots, observed, lw=0.8, color="0.3", label="observed")
    axes[0].plot(slots, reconstructed, lw=0.8, color="tab:red", label="reconstruction")
    axes[0].set_ylabel("aggregate")
    axes[0].legend(loc="upper right", fontsize="small")
    axes[0].set_title(f"disaggregation, day {label}")

    axes[1].plot(slots, model.fixed.contribution()[:, day_index], lw=0.8, color="tab:blue")
    axes[1].set_ylabel("fixed")

    for ax, cls in zip(axes[2:], model.shiftable):
        if truth_profiles and cls.name in truth_profiles:
            ax.plot(
                slots,
                truth_profiles[cls.name][:, day_index],
                lw=2.0,
                color="0.8",
                label="truth",
            )
        ax.plot(
            slots,
            cls.contribution_column(day_index),
            lw=0.8,
            color="tab:green",
            label="predicted",
        )
        ax.set_ylabel(cls.name, fontsize="small")
        ax.legend(loc="upper right", fontsize="small")

    axes[-1].set_xlabel("slot of day")
    out_path = Path(out_path)
    fig.savefig(out_path, format="svg")
    plt.close(fig)
    return out_path


def plot_objective_trace(trace, out_path: str | Path) -> Path:
    """Objective value against iteration on a log scale."""
    trace = np.asarray(trace, dtype=float)
    if trace.ndim != 1 or trace.size == 0:
        raise DataError("objective trace must be a non-empty 1-D sequence")
    fig, ax = plt.subplots(figsize=(7, 4), constrained_layout=True)
    ax.plot(np.arange(trace.size), trace, marker="o", ms=3, lw=1.0)
    if np.all(trace > 0):
        ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel("objective")
    ax.grid(True, alpha=0.3)
    out_path = Path(out_path)
    fig.savefig(out_path, format="svg")
    plt.close(fig)
    return out_path
