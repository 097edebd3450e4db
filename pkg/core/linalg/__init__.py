"""
Sparse linear algebra: operators, conjugate gradient and LDL^T factorization
"""

from .sparse_matrix import (
    SparseMatrix,
    build_sparse,
    from_arrays,
    identity,
    empty,
    matvec,
    matvec_transpose,
    kron,
    stack_operators,
    block_offsets,
    format_triplets,
    parse_triplets,
)
from .spd_operator import SpdOperator, WorkCounter
from .krylov import CGResult, conjugate_gradient
from .factorization import Factorization, factorize, solve_factorized

__all__ = [
    'SparseMatrix',
    'build_sparse',
    'from_arrays',
    'identity',
    'empty',
    'matvec',
    'matvec_transpose',
    'kron',
    'stack_operators',
    'block_offsets',
    'format_triplets',
    'parse_triplets',
    'SpdOperator',
    'WorkCounter',
    'CGResult',
    'conjugate_gradient',
    'Factorization',
    'factorize',
    'solve_factorized',
]
