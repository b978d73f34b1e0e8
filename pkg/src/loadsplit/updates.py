"""Multiplicative updates and column normalization for the fixed-load factors.

Two update rules are provided. ``paper-kl`` is the classical divide-by-
reconstruction multiplicative rule (the form containing X / X_hat and an
all-ones matrix); ``frobenius`` is the Lee-Seung rule that descends the half
squared Frobenius objective directly. Both preserve non-negativity and leave
zeros at zero. The reconstruction and every denominator are floored at
``cfg.epsilon`` so exact zeros in the data never divide by zero.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError
from .model import DisaggregationModel, FixedLoadFactors, ModelConfig, reconstruct


def _floored_reconstruction(X, model, epsilon):
    X = np.asarray(X, dtype=float)
    approx = reconstruct(model)
    if X.shape != approx.shape:
        raise DimensionMismatchError(
            f"data is {X.shape} but the model reconstructs {approx.shape}"
        )
    return X, np.maximum(approx, epsilon)


def update_fixed_basis(
    X: np.ndarray, model: DisaggregationModel, cfg: ModelConfig
) -> np.ndarray:
    """One multiplicative update of the fixed basis; returns the new D x F matrix."""
    X, approx = _floored_reconstruction(X, model, cfg.epsilon)
    basis, weights = model.fixed.basis, model.fixed.weights
    if cfg.update_rule == "paper-kl":
        numer = (X / approx) @ weights.T
        denom = np.ones_like(X) @ weights.T
    else:
        numer = X @ weights.T
        denom = approx @ weights.T
    return basis * (numer / np.maximum(denom, cfg.epsilon))


def update_fixed_weights(
    X: np.ndarray, model: DisaggregationModel, cfg: ModelConfig
) -> np.ndarray:
    """One multiplicative update of the fixed weights; returns the new F x N matrix."""
    X, approx = _floored_reconstruction(X, model, cfg.epsilon)
    basis, weights = model.fixed.basis, model.fixed.weights
    if cfg.update_rule == "paper-kl":
        numer = basis.T @ (X / approx)
        denom = basis.T @ np.ones_like(X)
    else:
        numer = basis.T @ X
        denom = basis.T @ approx
    return weights * (numer / np.maximum(denom, cfg.epsilon))


def normalize_basis_columns(
    basis: np.ndarray, epsilon: float = 1e-12
) -> tuple[np.ndarray, np.ndarray]:
    """Scale every basis column to unit Euclidean norm.

    Returns the normalized matrix and the original column norms (the scale the
    caller must push into the weight rows to keep the product unchanged).
    Columns with norm below ``epsilon`` are reinitialized to the uniform
    unit vector.
    """
    basis = np.asarray(basis, dtype=float)
    norms = np.linalg.norm(basis, axis=0)
    out = basis.copy()
    for k, norm in enumerate(norms):
        if norm < epsilon:
            out[:, k] = 1.0 / np.sqrt(basis.shape[0])
        else:
            out[:, k] = basis[:, k] / norm
    return out, norms


def normalize_fixed_factors(
    factors: FixedLoadFactors, epsilon: float = 1e-12
) -> FixedLoadFactors:
    """Normalize basis columns and rescale weight rows so the product is unchanged."""
    basis, norms = normalize_basis_columns(factors.basis, epsilon)
    return FixedLoadFactors(basis=basis, weights=norms[:, None] * factors.weights)
