# -*- coding: utf-8 -*-
"""
Sparse Matrix

Immutable sparse operator used for every difference, incidence, Laplacian and
Kronecker matrix in the package. Storage is CSR plus a cached CSR copy of the
transpose, so both A @ x and A.T @ x walk contiguous rows.
"""

import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sps

from core.errors import ConstructionError, DimensionMismatchError


logger = logging.getLogger(__name__)

# scipy index arrays are int32 unless forced otherwise
MAX_DIMENSION = np.iinfo(np.int32).max

Triplet = Tuple[int, int, float]


class SparseMatrix:
    """Compressed sparse matrix with row-major and column-major traversal"""

    __slots__ = ("_csr", "_csr_t")

    def __init__(self, csr: sps.csr_matrix):
        csr = sps.csr_matrix(csr, dtype=np.float64, copy=True)
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        self._csr = csr
        self._csr_t = csr.transpose().tocsr()

    @property
    def nrows(self) -> int:
        return self._csr.shape[0]

    @property
    def ncols(self) -> int:
        return self._csr.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self._csr.shape

    @property
    def nnz(self) -> int:
        return self._csr.nnz

    @property
    def csr(self) -> sps.csr_matrix:
        """Read-only view for scipy interop; callers must not mutate it"""
        return self._csr

    @property
    def T(self) -> "SparseMatrix":
        return SparseMatrix(self._csr_t)

    def triplets(self) -> List[Triplet]:
        coo = self._csr.tocoo()
        return [(int(r), int(c), float(v)) for r, c, v in zip(coo.row, coo.col, coo.data)]

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray()

    def row_sums(self) -> np.ndarray:
        return np.asarray(self._csr.sum(axis=1)).ravel()

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise DimensionMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        return SparseMatrix(self._csr @ other._csr)

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix(-self._csr)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        return (self._csr != other._csr).nnz == 0

    __hash__ = None

    def __repr__(self) -> str:
        return f"SparseMatrix(shape={self.shape}, nnz={self.nnz})"


def build_sparse(nrows: int, ncols: int, triplets: Iterable[Triplet]) -> SparseMatrix:
    """
    Build a sparse matrix from (row, col, value) triplets

    Args:
        nrows: Number of rows
        ncols: Number of columns
        triplets: Entries; duplicate positions are summed

    Returns:
        SparseMatrix with structural zeros dropped

    Raises:
        ConstructionError: On out-of-range indices or non-finite values
    """
    if nrows < 0 or ncols < 0:
        raise ConstructionError(f"negative shape ({nrows}, {ncols})")

    entries = list(triplets)
    if entries:
        rows, cols, vals = (np.asarray(a) for a in zip(*entries))
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0, dtype=np.float64)
    return from_arrays(nrows, ncols, rows, cols, vals)


def from_arrays(nrows: int, ncols: int, rows: Sequence[int], cols: Sequence[int],
                vals: Sequence[float]) -> SparseMatrix:
    """Vectorized form of build_sparse for constructors that already hold index arrays"""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.float64)

    if rows.size:
        if rows.min() < 0 or rows.max() >= nrows or cols.min() < 0 or cols.max() >= ncols:
            raise ConstructionError(f"triplet index outside ({nrows}, {ncols})")
    if not np.all(np.isfinite(vals)):
        raise ConstructionError("triplet values must be finite")

    coo = sps.coo_matrix((vals, (rows, cols)), shape=(nrows, ncols))
    return SparseMatrix(coo.tocsr())


def identity(n: int) -> SparseMatrix:
    return SparseMatrix(sps.identity(n, format="csr"))


def empty(nrows: int, ncols: int) -> SparseMatrix:
    return SparseMatrix(sps.csr_matrix((nrows, ncols)))


def matvec(A: SparseMatrix, x: np.ndarray) -> np.ndarray:
    """Exact sparse product A @ x"""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != A.ncols:
        raise DimensionMismatchError(f"vector of length {x.shape} does not match {A.ncols} columns")
    return A.csr @ x


def matvec_transpose(A: SparseMatrix, x: np.ndarray) -> np.ndarray:
    """A.T @ x through the stored transpose index"""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != A.nrows:
        raise DimensionMismatchError(f"vector of length {x.shape} does not match {A.nrows} rows")
    return A._csr_t @ x


def kron(A: SparseMatrix, B: SparseMatrix) -> SparseMatrix:
    """
    Kronecker product A ⊗ B

    (A ⊗ B)[i*p + k, j*q + l] = A[i, j] * B[k, l] for B of shape (p, q).

    Raises:
        ConstructionError: If the product dimensions overflow the index type
    """
    nrows = A.nrows * B.nrows
    ncols = A.ncols * B.ncols
    if nrows > MAX_DIMENSION or ncols > MAX_DIMENSION:
        raise ConstructionError(f"kronecker product shape ({nrows}, {ncols}) overflows")
    return SparseMatrix(sps.kron(A.csr, B.csr, format="csr"))


def stack_operators(blocks: Sequence[SparseMatrix]) -> SparseMatrix:
    """
    Vertically concatenate operators sharing a column count

    Raises:
        DimensionMismatchError: If the blocks disagree on ncols
        ConstructionError: If no block is given
    """
    if not blocks:
        raise ConstructionError("stack_operators needs at least one block")
    ncols = blocks[0].ncols
    for block in blocks:
        if block.ncols != ncols:
            raise DimensionMismatchError(f"cannot stack blocks with {block.ncols} and {ncols} columns")
    if len(blocks) == 1:
        return blocks[0]
    return SparseMatrix(sps.vstack([b.csr for b in blocks], format="csr"))


def block_offsets(blocks: Sequence[SparseMatrix]) -> List[int]:
    """Row offsets of each block inside the stacked operator, plus the total"""
    offsets = [0]
    for block in blocks:
        offsets.append(offsets[-1] + block.nrows)
    return offsets


def format_triplets(A: SparseMatrix) -> str:
    """Debug dump: one 'row col value' line per stored entry, 17 significant digits"""
    return "".join(f"{r} {c} {v:.17g}\n" for r, c, v in A.triplets())


def parse_triplets(text: str, nrows: Optional[int] = None, ncols: Optional[int] = None) -> SparseMatrix:
    """Inverse of format_triplets; shape defaults to the largest index present"""
    entries = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        r, c, v = line.split()
        entries.append((int(r), int(c), float(v)))
    if nrows is None:
        nrows = max((e[0] for e in entries), default=-1) + 1
    if ncols is None:
        ncols = max((e[1] for e in entries), default=-1) + 1
    return build_sparse(nrows, ncols, entries)
