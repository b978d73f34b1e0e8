import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loadsplit import (
    DimensionMismatchError,
    frobenius_objective,
    negative_log_likelihood,
    reconstruct,
)
from .conftest import random_model, scalar_frobenius


class TestFrobeniusObjective:
    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_matches_scalar_oracle(self, seed):
        rng = np.random.default_rng(seed)
        model = random_model(
            rng,
            num_slots=int(rng.integers(2, 10)),
            num_days=int(rng.integers(1, 6)),
            rank=int(rng.integers(1, 3)),
        )
        X = rng.random((model.fixed.basis.shape[0], model.fixed.weights.shape[1]))
        approx = reconstruct(model)
        value = frobenius_objective(X, model)
        total = scalar_frobenius(X, approx)
        per_sample = np.array(
            [scalar_frobenius(X[:, [n]], approx[:, [n]]) for n in range(X.shape[1])]
        )
        assert value.total == pytest.approx(total, rel=1e-12, abs=1e-12)
        np.testing.assert_allclose(value.per_sample, per_sample, rtol=1e-12, atol=1e-12)

    def test_zero_when_exact(self, rng):
        model = random_model(rng)
        value = frobenius_objective(reconstruct(model), model)
        assert value.total == pytest.approx(0.0, abs=1e-20)

    def test_per_sample_sums_to_total(self, rng):
        model = random_model(rng, num_days=5)
        X = rng.random((model.fixed.basis.shape[0], 5))
        value = frobenius_objective(X, model)
        assert value.total == pytest.approx(value.per_sample.sum(), rel=1e-12)

    def test_shape_mismatch_raises(self, rng):
        model = random_model(rng, num_slots=4, num_days=3)
        with pytest.raises(DimensionMismatchError):
            frobenius_objective(np.zeros((4, 2)), model)

    def test_known_value_by_hand(self, rng):
        # One slot, one day: X=3, reconstruction=1 -> 0.5*(3-1)^2 = 2.
        model = random_model(rng, num_slots=1, num_days=1, rank=1, class_specs=())
        model.fixed.basis[:] = 1.0
        model.fixed.weights[:] = 1.0
        value = frobenius_objective(np.array([[3.0]]), model)
        assert value.total == pytest.approx(2.0, abs=1e-15)


class TestNegativeLogLikelihood:
    def test_matches_hand_formula(self, rng):
        model = random_model(rng, num_slots=3, num_days=2)
        X = rng.random((3, 2))
        sigma = 0.7
        phi = frobenius_objective(X, model).total
        expected = phi / sigma**2 + 2 * (
            3 * math.log(sigma) + 0.5 * 3 * math.log(2 * math.pi)
        )
        assert negative_log_likelihood(X, model, sigma) == pytest.approx(
            expected, rel=1e-12
        )

    def test_sigma_one_is_phi_plus_constant(self, rng):
        model = random_model(rng, num_slots=4, num_days=3)
        X = rng.random((4, 3))
        phi = frobenius_objective(X, model).total
        nll = negative_log_likelihood(X, model, sigma=1.0)
        assert nll - phi == pytest.approx(3 * 0.5 * 4 * math.log(2 * math.pi), rel=1e-12)

    def test_ordering_preserved_for_any_sigma(self, rng):
        # The sigma-independent minimizer claim: if phi(A) < phi(B) then
        # nll(A) < nll(B) for every sigma.
        model_a = random_model(rng, num_slots=4, num_days=2)
        model_b = model_a.copy()
        model_b.fixed.weights *= 2.0
        X = reconstruct(model_a)
        for sigma in (0.1, 1.0, 10.0):
            assert negative_log_likelihood(X, model_a, sigma) < negative_log_likelihood(
                X, model_b, sigma
            )

    @pytest.mark.parametrize("sigma", [0.0, -1.0])
    def test_rejects_non_positive_sigma(self, rng, sigma):
        model = random_model(rng)
        X = reconstruct(model)
        with pytest.raises(ValueError):
            negative_log_likelihood(X, model, sigma)
