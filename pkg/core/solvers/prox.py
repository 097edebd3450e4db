# -*- coding: utf-8 -*-
"""
Proximal maps and penalty evaluation
"""

from typing import Sequence

import numpy as np

from core.linalg.sparse_matrix import matvec
from core.penalties import PenaltyKind, PenaltySpec


def soft_threshold(x: np.ndarray, t: float) -> np.ndarray:
    """sign(x) * max(|x| - t, 0), the proximal map of t * ||.||_1"""
    if t < 0:
        raise ValueError(f"threshold must be >= 0, got {t}")
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def positive_part_prox(x: np.ndarray, t: float) -> np.ndarray:
    """Proximal map of t * sum(max(., 0)): shift down by t above t, zero on [0, t], identity below 0"""
    if t < 0:
        raise ValueError(f"threshold must be >= 0, got {t}")
    x = np.asarray(x, dtype=np.float64)
    return np.where(x > t, x - t, np.minimum(x, 0.0))


def positive_part_norm(x: np.ndarray) -> float:
    """sum(max(x_i, 0))"""
    return float(np.maximum(np.asarray(x, dtype=np.float64), 0.0).sum())


def prox_for(kind: PenaltyKind):
    return soft_threshold if kind is PenaltyKind.L1 else positive_part_prox


def block_penalty(spec: PenaltySpec, beta: np.ndarray) -> float:
    """weight * kind(operator @ beta)"""
    if not spec.is_active():
        return 0.0
    values = matvec(spec.operator, beta)
    if spec.kind is PenaltyKind.L1:
        return spec.weight * float(np.abs(values).sum())
    return spec.weight * positive_part_norm(values)


def penalty_value(beta: np.ndarray, penalties: Sequence[PenaltySpec]) -> float:
    return sum(block_penalty(spec, beta) for spec in penalties)


def objective(y: np.ndarray, beta: np.ndarray, penalties: Sequence[PenaltySpec]) -> float:
    """1/2 ||y - beta||^2 + sum of penalties"""
    residual = np.asarray(y, dtype=np.float64) - beta
    return 0.5 * float(residual @ residual) + penalty_value(beta, penalties)
