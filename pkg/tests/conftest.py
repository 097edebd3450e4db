# -*- coding: utf-8 -*-
"""
Shared fixtures

Every estimator call made anywhere in the suite goes through a post-condition
hook that checks the total of the signal is preserved. Tests that call a
solver directly take the same check as the sum_preserved fixture.
"""

import os
import sys

# Add the project root to Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest
from scipy.optimize import lsq_linear

from core.estimators import clear_postconditions, register_postcondition
from core.linalg.sparse_matrix import stack_operators


def assert_sum_preserved(y, beta):
    """Operators with zero row sums leave the total of the signal unchanged"""
    y = np.asarray(y, dtype=np.float64)
    scale = max(float(np.max(np.abs(y))) if y.size else 0.0, 1.0)
    gap = abs(float(np.sum(beta)) - float(np.sum(y)))
    assert gap <= 1e-6 * y.size * scale, f"sum of the estimate drifted by {gap:.3e}"


def _check_sum_conservation(y, result, blocks):
    if any(np.any(spec.operator.row_sums() != 0) for spec in blocks if spec.is_active()):
        return
    assert_sum_preserved(y, result.beta)


@pytest.fixture(autouse=True, scope="session")
def sum_conservation_hook():
    register_postcondition(_check_sum_conservation)
    yield
    clear_postconditions()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def bvls_oracle(y, blocks):
    """
    Exact minimizer through the boxed dual, solved by bounded-variable least squares

    Returns beta = y - B^T z for the optimal z; beta is unique even when z is not.
    """
    y = np.asarray(y, dtype=np.float64)
    active = [spec for spec in blocks if spec.is_active()]
    if not active:
        return y.copy()
    B = stack_operators([spec.operator for spec in active]).to_dense()
    lower = np.concatenate([np.full(spec.operator.nrows, spec.box[0]) for spec in active])
    upper = np.concatenate([np.full(spec.operator.nrows, spec.box[1]) for spec in active])
    z = lsq_linear(B.T, y, bounds=(lower, upper), method="bvls", tol=1e-14, max_iter=10000).x
    return y - B.T @ z


@pytest.fixture
def oracle():
    return bvls_oracle


@pytest.fixture
def sum_preserved():
    return assert_sum_preserved
