# -*- coding: utf-8 -*-
"""
Sparse LDL^T Factorization

The SPD system is factored once with a symmetric fill-reducing ordering
(multiple minimum degree on A + A^T) and diagonal pivoting only, so that
P M P^T = L D L^T. SuperLU does the numerical work; the factor pieces are kept
for inspection and the SuperLU handle for fast triangular solves.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps
from scipy.sparse.linalg import splu

from core.errors import DimensionMismatchError, NotPositiveDefiniteError, NumericalFailureError
from core.linalg.sparse_matrix import SparseMatrix
from core.linalg.spd_operator import SpdOperator


logger = logging.getLogger(__name__)

ORDERING = "MMD_AT_PLUS_A"
PIVOT_RTOL = 1e-13


@dataclass(frozen=True)
class Factorization:
    """P M P^T = L D L^T with unit lower triangular L"""
    permutation: np.ndarray
    lower_factor: SparseMatrix
    diagonal: np.ndarray
    _lu: object

    @property
    def n(self) -> int:
        return self.diagonal.shape[0]


def factorize(M: SpdOperator) -> Factorization:
    """
    Factor an SPD operator

    Raises:
        NotPositiveDefiniteError: If a pivot is not strictly positive
    """
    A = M.to_sparse()
    n = A.shape[0]
    if n == 0:
        return Factorization(np.zeros(0, dtype=np.int64), SparseMatrix(sps.csr_matrix((0, 0))),
                             np.zeros(0), None)

    try:
        lu = splu(A, permc_spec=ORDERING, diag_pivot_thresh=0.0,
                  options={"SymmetricMode": True})
    except RuntimeError as e:
        # SuperLU reports an exactly singular pivot as RuntimeError
        raise NotPositiveDefiniteError(f"factorization failed: {e}") from e

    pivots = lu.U.diagonal()
    if not np.all(np.isfinite(pivots)):
        raise NumericalFailureError("non-finite pivot in factorization")
    # pivots at round-off level relative to the largest mean a singular matrix
    if np.any(pivots <= PIVOT_RTOL * n * np.max(np.abs(pivots))):
        raise NotPositiveDefiniteError(f"matrix of size {n} is not positive definite "
                                       f"(smallest pivot {pivots.min():.3e})")

    logger.debug(f"factorized n={n}, nnz(L)={lu.L.nnz}")
    return Factorization(permutation=np.asarray(lu.perm_c),
                         lower_factor=SparseMatrix(lu.L),
                         diagonal=pivots,
                         _lu=lu)


def solve_factorized(F: Factorization, b: np.ndarray) -> np.ndarray:
    """Solve M x = b with a precomputed factorization"""
    b = np.asarray(b, dtype=np.float64)
    if b.shape[0] != F.n:
        raise DimensionMismatchError(f"right-hand side of length {b.shape[0]} does not match {F.n}")
    if F.n == 0:
        return b.copy()
    return F._lu.solve(b)
