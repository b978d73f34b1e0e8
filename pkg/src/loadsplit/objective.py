"""Training objective and the Gaussian likelihood it descends from."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .model import DisaggregationModel, reconstruct


@dataclass(eq=False)
class ObjectiveValue:
    """Half squared Frobenius error, total and split per sample column."""

    total: float
    per_sample: np.ndarray


def frobenius_objective(X: np.ndarray, model: DisaggregationModel) -> ObjectiveValue:
    """0.5 * ||X - X_hat||_F^2 with its per-day decomposition."""
    X = np.asarray(X, dtype=float)
    approx = reconstruct(model)
    if X.shape != approx.shape:
        raise DimensionMismatchError(
            f"data is {X.shape} but the model reconstructs {approx.shape}"
        )
    diff = X - approx
    per_sample = 0.5 * np.einsum("dn,dn->n", diff, diff)
    return ObjectiveValue(total=float(per_sample.sum()), per_sample=per_sample)


def negative_log_likelihood(
    X: np.ndarray, model: DisaggregationModel, sigma: float = 1.0
) -> float:
    """Negative log probability of X under the isotropic Gaussian noise model.

    For any sigma the minimizer over the model factors coincides with the
    minimizer of `frobenius_objective`; this value is exposed for reporting
    only and never drives training.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    X = np.asarray(X, dtype=float)
    d, n = X.shape
    phi = frobenius_objective(X, model).total
    log_norm = d * math.log(sigma) + 0.5 * d * math.log(2.0 * math.pi)
    return phi / sigma**2 + n * log_norm
