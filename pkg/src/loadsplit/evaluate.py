"""Scoring a fitted model against per-appliance ground truth.

Event detection is thresholded at half the class peak: a slot is ON when the
class's reconstructed (resp. ground-truth) draw exceeds ``peak / 2``. On top
of the usual precision/recall/F1 we report per-class RMSE, the relative
energy error, and the aggregate-reconstruction RMSE.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DimensionMismatchError
from .model import DisaggregationModel, EnergyDataset, reconstruct
from .pipeline import ApplianceGroundTruth


@dataclass
class ClassScore:
    """Detection and energy metrics for one appliance class."""

    name: str
    precision: float
    recall: float
    f1: float
    rmse: float
    energy_relative_error: float
    true_on_slots: int
    predicted_on_slots: int
    undetected: bool  # no slot was predicted ON at all


@dataclass
class EvalReport:
    class_scores: list[ClassScore]
    aggregate_rmse: float

    def score_for(self, name: str) -> ClassScore:
        for score in self.class_scores:
            if score.name == name:
                return score
        raise KeyError(name)


def _rmse(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sqrt(np.mean((a - b) ** 2)))


def _safe_ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def score_class(
    name: str, predicted: np.ndarray, truth: np.ndarray, peak: float
) -> ClassScore:
    """Score one class's reconstructed contribution against its ground truth."""
    if predicted.shape != truth.shape:
        raise DimensionMismatchError(
            f"{name}: predicted shape {predicted.shape} != truth shape {truth.shape}"
        )
    threshold = peak / 2.0
    pred_on = predicted > threshold
    true_on = truth > threshold
    tp = float(np.sum(pred_on & true_on))
    fp = float(np.sum(pred_on & ~true_on))
    fn = float(np.sum(~pred_on & true_on))
    precision = _safe_ratio(tp, tp + fp)
    recall = _safe_ratio(tp, tp + fn)
    f1 = _safe_ratio(2.0 * precision * recall, precision + recall)
    true_energy = float(truth.sum())
    energy_err = (
        abs(float(predicted.sum()) - true_energy) / true_energy if true_energy > 0 else 0.0
    )
    return ClassScore(
        name=name,
        precision=precision,
        recall=recall,
        f1=f1,
        rmse=_rmse(predicted, truth),
        energy_relative_error=energy_err,
        true_on_slots=int(true_on.sum()),
        predicted_on_slots=int(pred_on.sum()),
        undetected=not bool(pred_on.any()),
    )


def evaluate(
    model: DisaggregationModel,
    truth: ApplianceGroundTruth,
    dataset: EnergyDataset | None = None,
) -> EvalReport:
    """Score every shiftable class of `model` against `truth` by name.

    Classes present on only one side are an error (listed explicitly) — a
    silent partial match would make the scores incomparable across runs. The
    aggregate RMSE is only computed when the original dataset is supplied;
    otherwise it is NaN.
    """
    model_names = set(model.class_names())
    truth_names = set(truth.names())
    if model_names != truth_names:
        missing = sorted(truth_names - model_names)
        extra = sorted(model_names - truth_names)
        parts = []
        if missing:
            parts.append(f"ground-truth classes with no model class: {missing}")
        if extra:
            parts.append(f"model classes with no ground truth: {extra}")
        raise DataError("; ".join(parts))

    scores = [
        score_class(cls.name, cls.contribution(), truth.profiles[cls.name], cls.peak)
        for cls in model.shiftable
    ]
    if dataset is not None:
        aggregate = _rmse(reconstruct(model), dataset.values)
    else:
        aggregate = float("nan")
    return EvalReport(class_scores=scores, aggregate_rmse=aggregate)


def format_report(report: EvalReport) -> str:
    """Readable fixed-width rendering of an EvalReport."""
    lines = [
        f"{'class':<16} {'precision':>9} {'recall':>9} {'f1':>9} "
        f"{'rmse':>12} {'energy_err':>10}"
    ]
    for s in report.class_scores:
        flag = "  (undetected)" if s.undetected else ""
        lines.append(
            f"{s.name:<16} {s.precision:>9.4f} {s.recall:>9.4f} {s.f1:>9.4f} "
            f"{s.rmse:>12.6f} {s.energy_relative_error:>10.4f}{flag}"
        )
    lines.append(f"aggregate_rmse: {report.aggregate_rmse:.6g}")
    return "\n".join(lines) + "\n"
