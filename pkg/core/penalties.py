# -*- coding: utf-8 -*-
"""
Penalty Operators

Difference and trend operators (first differences, second differences, the
Kronecker trend matrix, the graph Laplacian) and the PenaltySpec blocks the
solvers consume. Every operator built here has rows summing to zero, which is
what makes all the estimators preserve the total of the signal.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import List, Optional

import numpy as np

from core.errors import ConfigurationError, ConstructionError
from core.graph_model import DiGraph, LatticeSpec, incidence_matrix, laplacian
from core.linalg.sparse_matrix import SparseMatrix, empty, from_arrays, identity, kron, stack_operators


logger = logging.getLogger(__name__)


class PenaltyKind(str, Enum):
    """L1 is lambda*||A beta||_1, POSITIVE_PART is lambda*sum(max(A beta, 0))"""
    L1 = "l1"
    POSITIVE_PART = "positive_part"


class TrendKind(str, Enum):
    GENERAL = "general"
    KRONECKER = "kronecker"


@dataclass(frozen=True)
class PenaltySpec:
    """One penalty block: weight * kind(operator @ beta)"""
    operator: SparseMatrix
    kind: PenaltyKind = PenaltyKind.L1
    weight: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PenaltyKind(self.kind))
        if not np.isfinite(self.weight) or self.weight < 0:
            raise ConstructionError(f"penalty weight must be finite and >= 0, got {self.weight}")

    @property
    def box(self) -> tuple:
        """Dual box of the block: [-w, w] for L1, [0, w] for the positive part"""
        lower = -self.weight if self.kind is PenaltyKind.L1 else 0.0
        return lower, self.weight

    def is_active(self) -> bool:
        return self.weight > 0 and self.operator.nrows > 0


def first_difference_matrix(n: int) -> SparseMatrix:
    """(n-1) x n matrix with rows e_i - e_{i+1}"""
    if n < 2:
        raise ConstructionError(f"first differences need n >= 2, got {n}")
    return _difference_stencil(n, [1.0, -1.0])


def second_difference_matrix(n: int) -> SparseMatrix:
    """(n-2) x n matrix with rows e_i - 2 e_{i+1} + e_{i+2}"""
    if n < 3:
        raise ConstructionError(f"second differences need n >= 3, got {n}")
    return _difference_stencil(n, [1.0, -2.0, 1.0])


def _difference_stencil(n: int, stencil: List[float]) -> SparseMatrix:
    width = len(stencil)
    m = max(n - width + 1, 0)
    if m == 0:
        return empty(0, n)
    rows = np.repeat(np.arange(m), width)
    cols = (np.arange(m)[:, None] + np.arange(width)[None, :]).ravel()
    vals = np.tile(stencil, m)
    return from_arrays(m, n, rows, cols, vals)


def kronecker_trend_matrix(spec: LatticeSpec) -> SparseMatrix:
    """
    Kronecker trend matrix of a lattice

    One block per dimension: the second-difference matrix along that dimension,
    identities along the others. With the first dimension varying fastest the
    two-dimensional form is [I_{n2} (x) D2(n1) ; D2(n2) (x) I_{n1}].
    Sides shorter than 3 contribute no rows.
    """
    dims = spec.dims
    blocks = []
    for axis, side in enumerate(dims):
        if side < 3:
            continue
        # kron factors run from the slowest dimension to the fastest
        factors = [second_difference_matrix(d) if a == axis else identity(d)
                   for a, d in reversed(list(enumerate(dims)))]
        blocks.append(reduce(kron, factors))

    if not blocks:
        logger.warning(f"lattice {spec} has no side >= 3, Kronecker trend matrix is empty")
        return empty(0, spec.size)
    return stack_operators(blocks)


def trend_operator(g: DiGraph, spec: Optional[LatticeSpec], kind: TrendKind) -> SparseMatrix:
    """The trend penalty operator: the graph Laplacian or the Kronecker matrix"""
    kind = TrendKind(kind)
    if kind is TrendKind.KRONECKER:
        if spec is None:
            raise ConfigurationError("Kronecker trend filtering needs a lattice spec")
        if spec.size != g.n_vertices:
            raise ConfigurationError(f"lattice {spec} has {spec.size} vertices, graph has {g.n_vertices}")
        return kronecker_trend_matrix(spec)
    return laplacian(g)


def fusion_operator(g: DiGraph) -> SparseMatrix:
    """The fused-lasso operator: one row per edge of g"""
    return incidence_matrix(g)


__all__ = [
    'PenaltyKind',
    'TrendKind',
    'PenaltySpec',
    'first_difference_matrix',
    'second_difference_matrix',
    'kronecker_trend_matrix',
    'trend_operator',
    'fusion_operator',
    'stack_operators',
]
