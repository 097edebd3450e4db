# -*- coding: utf-8 -*-
"""
Conjugate Gradient

Plain CG on an SpdOperator, warm-startable, used as one of the two backends of
the ADMM beta-update.
"""

import logging
from typing import NamedTuple, Optional

import numpy as np

from core.errors import DimensionMismatchError, NumericalFailureError
from core.linalg.spd_operator import SpdOperator, WorkCounter


logger = logging.getLogger(__name__)

# floor of the relative-residual denominator, keeps b = 0 well defined
EPS_FLOOR = 1e-12


class CGResult(NamedTuple):
    x: np.ndarray
    iterations: int
    converged: bool


def conjugate_gradient(M: SpdOperator,
                       b: np.ndarray,
                       x0: Optional[np.ndarray] = None,
                       tol: float = 1e-10,
                       max_iter: Optional[int] = None,
                       counter: Optional[WorkCounter] = None) -> CGResult:
    """
    Solve M x = b by conjugate gradients

    Args:
        M: Symmetric positive definite operator
        b: Right-hand side
        x0: Starting point (zeros when None); the previous solve's answer is a good warm start
        tol: Target for ||M x - b|| / max(||b||, EPS_FLOOR)
        max_iter: Iteration cap, 10 * n by default
        counter: Optional nonzero-touch counter for the operator products

    Returns:
        CGResult(x, iterations, converged); converged is False when max_iter was hit

    Raises:
        NumericalFailureError: If an iterate becomes non-finite
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")

    b = np.asarray(b, dtype=np.float64)
    n = b.shape[0]
    if M.n is not None and M.n != n:
        raise DimensionMismatchError(f"right-hand side of length {n} does not match operator size {M.n}")
    if max_iter is None:
        max_iter = 10 * max(n, 1)

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    threshold = tol * max(np.linalg.norm(b), EPS_FLOOR)

    r = b - M.apply(x, counter)
    rr = float(r @ r)
    if np.sqrt(rr) <= threshold:
        return CGResult(x, 0, True)

    p = r.copy()
    for k in range(1, max_iter + 1):
        Mp = M.apply(p, counter)
        curvature = float(p @ Mp)
        if not np.isfinite(curvature) or curvature <= 0:
            raise NumericalFailureError(f"conjugate gradient broke down at iteration {k} (p'Mp = {curvature})")

        alpha = rr / curvature
        x += alpha * p
        r -= alpha * Mp
        rr_next = float(r @ r)
        if not np.isfinite(rr_next):
            raise NumericalFailureError(f"non-finite residual at iteration {k}")

        if np.sqrt(rr_next) <= threshold:
            return CGResult(x, k, True)

        p = r + (rr_next / rr) * p
        rr = rr_next

    logger.warning(f"conjugate gradient stopped at max_iter={max_iter}, "
                   f"relative residual {np.sqrt(rr) / max(np.linalg.norm(b), EPS_FLOOR):.3e}")
    return CGResult(x, max_iter, False)
