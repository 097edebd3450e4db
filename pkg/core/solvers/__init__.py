"""
Numerical engines: ADMM and the dual box-QP solver
"""

from .base import (
    AdmmConfig,
    BaseSolver,
    BetaBackend,
    DualConfig,
    Engine,
    MemoryTraceSink,
    SolveResult,
    TraceSink,
    create_solver,
)
from .prox import objective, penalty_value, positive_part_norm, positive_part_prox, soft_threshold
from .admm_solver import AdmmSolver, AdmmState, admm_solve, admm_solve_blocks
from .dual_solver import BoxedDualProblem, DualBlock, DualSolution, DualSolver, dual_solve

__all__ = [
    'AdmmConfig',
    'BaseSolver',
    'BetaBackend',
    'DualConfig',
    'Engine',
    'MemoryTraceSink',
    'SolveResult',
    'TraceSink',
    'create_solver',
    'objective',
    'penalty_value',
    'positive_part_norm',
    'positive_part_prox',
    'soft_threshold',
    'AdmmSolver',
    'AdmmState',
    'admm_solve',
    'admm_solve_blocks',
    'BoxedDualProblem',
    'DualBlock',
    'DualSolution',
    'DualSolver',
    'dual_solve',
]
