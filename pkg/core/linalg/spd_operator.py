# -*- coding: utf-8 -*-
"""
SPD Operator

M = w0 * I + sum_i w_i * A_i^T A_i, the system matrix of the ADMM beta-update.
Application goes through the factored form A_i x followed by A_i^T (.), so one
product costs O(sum nnz(A_i)) and A_i^T A_i is never formed unless a
factorization asks for it explicitly.
"""

import threading
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import scipy.sparse as sps

from core.errors import ConstructionError, DimensionMismatchError
from core.linalg.sparse_matrix import SparseMatrix, matvec, matvec_transpose


@dataclass
class WorkCounter:
    """Counts stored nonzeros touched by operator products"""
    touched: int = 0
    applications: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def add(self, nnz: int) -> None:
        with self._lock:
            self.touched += int(nnz)
            self.applications += 1

    def snapshot(self) -> Tuple[int, int]:
        with self._lock:
            return self.touched, self.applications


class SpdOperator:
    """Symmetric positive (semi-)definite operator in factored form"""

    def __init__(self, identity_weight: float, terms: List[Tuple[float, SparseMatrix]]):
        """
        Args:
            identity_weight: w0 >= 0; M is positive definite when w0 > 0
            terms: (weight, A) pairs with weight >= 0 and a shared column count
        """
        if identity_weight < 0 or not np.isfinite(identity_weight):
            raise ConstructionError(f"identity weight must be finite and >= 0, got {identity_weight}")

        self.identity_weight = float(identity_weight)
        self.terms: List[Tuple[float, SparseMatrix]] = []
        self.n: Optional[int] = None

        for weight, matrix in terms:
            if weight < 0 or not np.isfinite(weight):
                raise ConstructionError(f"term weight must be finite and >= 0, got {weight}")
            if self.n is None:
                self.n = matrix.ncols
            elif matrix.ncols != self.n:
                raise DimensionMismatchError(f"terms disagree on size: {matrix.ncols} vs {self.n}")
            if weight > 0 and matrix.nrows > 0:
                self.terms.append((float(weight), matrix))

    @classmethod
    def for_size(cls, n: int, identity_weight: float,
                 terms: List[Tuple[float, SparseMatrix]]) -> "SpdOperator":
        op = cls(identity_weight, terms)
        if op.n is None:
            op.n = n
        elif op.n != n:
            raise DimensionMismatchError(f"operator size {op.n} does not match {n}")
        return op

    @property
    def nnz(self) -> int:
        """Nonzeros touched by one application (each A_i is walked twice)"""
        return 2 * sum(matrix.nnz for _, matrix in self.terms) + (self.n or 0)

    def apply(self, x: np.ndarray, counter: Optional[WorkCounter] = None) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if self.n is not None and x.shape[0] != self.n:
            raise DimensionMismatchError(f"vector of length {x.shape[0]} does not match {self.n}")

        out = self.identity_weight * x
        for weight, matrix in self.terms:
            out += weight * matvec_transpose(matrix, matvec(matrix, x))
        if counter is not None:
            counter.add(self.nnz)
        return out

    def to_sparse(self) -> sps.csc_matrix:
        """Assemble M explicitly (factorization backends only)"""
        n = self.n or 0
        M = self.identity_weight * sps.identity(n, format="csc")
        for weight, matrix in self.terms:
            M = M + weight * (matrix.csr.T @ matrix.csr)
        return sps.csc_matrix(M)
