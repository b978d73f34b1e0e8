"""Shared fixtures and independent scalar oracles.

The oracles here recompute model quantities with plain Python loops so tests
never validate vectorized code against itself.
"""

import math
import re

import numpy as np
import pytest

from loadsplit import (
    DisaggregationModel,
    FixedLoadFactors,
    ShiftableLoadClass,
    SparseBinaryBasis,
)


def scalar_matmul(a, b):
    """Triple-loop matrix product."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.zeros((a.shape[0], b.shape[1]))
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            acc = 0.0
            for k in range(a.shape[1]):
                acc += a[i, k] * b[k, j]
            out[i, j] = acc
    return out


def scalar_reconstruct(model):
    """Dense reconstruction via loops over every component."""
    out = scalar_matmul(model.fixed.basis, model.fixed.weights)
    for cls in model.shiftable:
        dense = np.zeros((cls.basis.rows, cls.basis.num_columns))
        for k, idx in enumerate(cls.basis.support_sets):
            for d in idx:
                dense[d, k] = 1.0
        out += cls.peak * scalar_matmul(dense, cls.weights.astype(float))
    return out


def scalar_frobenius(X, approx):
    """0.5 * sum of squared elementwise differences, via loops."""
    X = np.asarray(X, dtype=float)
    total = 0.0
    for d in range(X.shape[0]):
        for n in range(X.shape[1]):
            total += 0.5 * (X[d, n] - approx[d, n]) ** 2
    return total


def scalar_kl(X, approx):
    """Generalized KL divergence sum(x log(x/y) - x + y), x = 0 giving y."""
    X = np.asarray(X, dtype=float)
    total = 0.0
    for d in range(X.shape[0]):
        for n in range(X.shape[1]):
            x, y = X[d, n], approx[d, n]
            if x > 0:
                total += x * math.log(x / y) - x + y
            else:
                total += y
    return total


def random_basis(rng, rows, columns, max_support=4):
    """A sparse binary basis with random non-empty support sets."""
    sets = []
    for _ in range(columns):
        size = int(rng.integers(1, min(max_support, rows) + 1))
        sets.append(rng.choice(rows, size=size, replace=False).astype(np.intp))
    return SparseBinaryBasis(rows=rows, support_sets=tuple(sets))


def random_model(rng, num_slots=8, num_days=4, rank=2, class_specs=((1.5, 3),)):
    """A valid random model: positive fixed factors and binary class weights.

    ``class_specs`` is a sequence of (peak, l0_budget); every class gets an
    identity basis and random feasible weights.
    """
    from loadsplit import make_basis

    fixed = FixedLoadFactors(
        basis=1.0 - rng.random((num_slots, rank)),
        weights=1.0 - rng.random((rank, num_days)),
    )
    shiftable = []
    for i, (peak, budget) in enumerate(class_specs):
        weights = np.zeros((num_slots, num_days), dtype=np.int8)
        for n in range(num_days):
            count = int(rng.integers(0, min(budget, num_slots) + 1))
            on = rng.choice(num_slots, size=count, replace=False)
            weights[on, n] = 1
        shiftable.append(
            ShiftableLoadClass(
                name=f"cls{i}",
                peak=peak,
                l0_budget=budget,
                basis=make_basis("identity", num_slots),
                weights=weights,
            )
        )
    return DisaggregationModel(fixed=fixed, shiftable=shiftable)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run.

    Parametrized criteria (several test instances per criterion) collapse to
    a single line that only passes when every instance passed.
    """
    results: dict[int, tuple[str, bool]] = {}
    for outcome in ("passed", "failed", "error", "skipped"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            match = re.search(r"test_acceptance\.py::test_criterion_(\d+)(\w*)", nodeid)
            if not match:
                continue
            number = int(match.group(1))
            label = f"criterion {number}{match.group(2).replace('_', ' ')}"
            _, ok_so_far = results.get(number, (label, True))
            results[number] = (label, ok_so_far and outcome == "passed")
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            label, ok = results[number]
            terminalreporter.write_line(f"{label}: {'PASSED' if ok else 'FAILED'}")
