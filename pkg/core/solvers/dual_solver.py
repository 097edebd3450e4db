# -*- coding: utf-8 -*-
"""
Dual Box-QP Solver

For penalties whose dual feasible set is a box, the primal problem

    min 1/2 ||y - beta||^2 + sum_i h_i(A_i beta)

is solved through its dual

    min_z 1/2 ||y - B^T z||^2   subject to  lower <= z <= upper

with B the stacked operators. L1 blocks give the box [-lambda, lambda] and
positive-part blocks give [0, lambda]. The dual is minimized by accelerated
projected gradient with adaptive restart, and the primal estimate is read off
as beta = y - B^T z. Once the active set settles, the free coordinates are
polished by a least-squares solve.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.sparse.linalg import lsqr

from core.errors import DimensionMismatchError, NumericalFailureError
from core.linalg.sparse_matrix import (
    SparseMatrix,
    block_offsets,
    empty,
    matvec,
    matvec_transpose,
    stack_operators,
)
from core.penalties import PenaltySpec
from core.solvers.base import BaseSolver, DualConfig, Engine, SolveResult, TraceSink


logger = logging.getLogger(__name__)

# 1/L step with L slightly above the power-iteration estimate
LIPSCHITZ_SAFETY = 1.1
KKT_CHECK_EVERY = 10


@dataclass
class DualBlock:
    """One operator with elementwise box bounds on its dual variable"""
    operator: SparseMatrix
    lower: np.ndarray
    upper: np.ndarray


class BoxedDualProblem:
    """min_z 1/2 ||y - sum_i A_i^T z_i||^2 over lower_i <= z_i <= upper_i"""

    def __init__(self, y: np.ndarray, blocks: Sequence[DualBlock]):
        self.y = np.asarray(y, dtype=np.float64)
        n = self.y.shape[0]
        self.blocks: List[DualBlock] = []
        for block in blocks:
            if block.operator.ncols != n:
                raise DimensionMismatchError(f"operator has {block.operator.ncols} columns, signal has {n}")
            m = block.operator.nrows
            lower = np.broadcast_to(np.asarray(block.lower, dtype=np.float64), (m,)).copy()
            upper = np.broadcast_to(np.asarray(block.upper, dtype=np.float64), (m,)).copy()
            if np.any(lower > upper):
                raise ValueError("box lower bound exceeds upper bound")
            self.blocks.append(DualBlock(block.operator, lower, upper))

        if self.blocks:
            self.B = stack_operators([b.operator for b in self.blocks])
        else:
            self.B = empty(0, n)
        self.lower = np.concatenate([b.lower for b in self.blocks]) if self.blocks else np.zeros(0)
        self.upper = np.concatenate([b.upper for b in self.blocks]) if self.blocks else np.zeros(0)
        self.offsets = block_offsets([b.operator for b in self.blocks])

    @classmethod
    def from_penalties(cls, y: np.ndarray, penalties: Sequence[PenaltySpec]) -> "BoxedDualProblem":
        """Active penalty blocks only"""
        blocks = []
        for spec in penalties:
            if spec.is_active():
                lower, upper = spec.box
                blocks.append(DualBlock(spec.operator, np.asarray(lower), np.asarray(upper)))
        return cls(y, blocks)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    def project(self, z: np.ndarray) -> np.ndarray:
        return np.clip(z, self.lower, self.upper)

    def recover_beta(self, z: np.ndarray) -> np.ndarray:
        """beta = y - B^T z"""
        return self.y - matvec_transpose(self.B, z)

    def dual_objective(self, z: np.ndarray) -> float:
        r = self.recover_beta(z)
        return 0.5 * float(r @ r)

    def kkt_residual(self, z: np.ndarray, beta: np.ndarray) -> float:
        """||z - proj(z - grad)||_inf with grad = -B beta"""
        if z.size == 0:
            return 0.0
        return float(np.max(np.abs(z - self.project(z + matvec(self.B, beta)))))

    def dual_value(self, z: np.ndarray) -> float:
        """Lower bound on the primal optimum: 1/2 ||y||^2 - 1/2 ||y - B^T z||^2 for feasible z"""
        return 0.5 * float(self.y @ self.y) - self.dual_objective(z)

    def duality_gap(self, z: np.ndarray, beta: np.ndarray) -> float:
        return self.primal_objective(beta) - self.dual_value(z)

    def primal_objective(self, beta: np.ndarray) -> float:
        """1/2 ||y - beta||^2 + sum_j max(lower_j x_j, upper_j x_j) with x = B beta"""
        residual = self.y - beta
        value = 0.5 * float(residual @ residual)
        if self.lower.size:
            x = matvec(self.B, beta)
            value += float(np.maximum(self.lower * x, self.upper * x).sum())
        return value

    def split(self, z: np.ndarray) -> List[np.ndarray]:
        return [z[self.offsets[i]:self.offsets[i + 1]].copy() for i in range(len(self.blocks))]


@dataclass
class DualSolution:
    z_blocks: List[np.ndarray]
    z: np.ndarray
    beta: np.ndarray
    kkt_residual: float
    iterations: int
    converged: bool
    polished: bool = False


def dual_solve(p: BoxedDualProblem,
               tol: float = 1e-6,
               max_iter: int = 100_000,
               config: Optional[DualConfig] = None,
               trace: Optional[TraceSink] = None) -> DualSolution:
    """
    Minimize the boxed dual by accelerated projected gradient

    Args:
        p: Boxed dual problem
        tol: Stop once the KKT residual is at most tol
        max_iter: Iteration cap
        config: Power-iteration count and polishing switches (tol / max_iter above win)
        trace: Optional sink; records (iter, kkt, duality gap, primal objective) at each check

    Returns:
        DualSolution with beta = y - B^T z for the returned z
    """
    config = config or DualConfig(tol=tol, max_iter=max_iter)
    m = p.lower.size
    z = p.project(np.zeros(m))
    beta = p.recover_beta(z)

    lipschitz = LIPSCHITZ_SAFETY * _operator_norm_squared(p.B, config.power_iterations)
    if m == 0 or lipschitz == 0.0:
        # B = 0: every feasible z gives beta = y
        return DualSolution(p.split(z), z, beta, p.kkt_residual(z, beta), 0, True)

    kkt = p.kkt_residual(z, beta)
    if kkt <= tol:
        return DualSolution(p.split(z), z, beta, kkt, 0, True)

    logger.info(f"dual solve start: n={p.n}, dual size={m}, L={lipschitz:.3e}")
    step = 1.0 / lipschitz
    w = z.copy()
    t = 1.0
    g_current = 0.5 * float(beta @ beta)
    converged = False
    polished = False
    iteration = 0

    for iteration in range(1, max_iter + 1):
        beta_w = p.recover_beta(w)
        z_next = p.project(w + step * matvec(p.B, beta_w))
        beta_next = p.recover_beta(z_next)
        g_next = 0.5 * float(beta_next @ beta_next)

        if not np.isfinite(g_next):
            raise NumericalFailureError(f"dual iteration {iteration} produced a non-finite objective")

        if g_next > g_current * (1.0 + 1e-15):
            if t == 1.0:
                # a plain projected step went uphill: the step is too long
                lipschitz *= 2.0
                step = 1.0 / lipschitz
                logger.debug(f"dual step halved at iteration {iteration}, L={lipschitz:.3e}")
            # restart the momentum from the last accepted point
            w = z.copy()
            t = 1.0
            continue

        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        w = z_next + ((t - 1.0) / t_next) * (z_next - z)
        z, beta, g_current, t = z_next, beta_next, g_next, t_next

        if iteration % KKT_CHECK_EVERY == 0:
            kkt = p.kkt_residual(z, beta)
            if trace is not None:
                logger.debug(f"dual iter {iteration}: kkt={kkt:.3e}")
                primal = p.primal_objective(beta)
                trace.record(iteration, kkt, primal - (0.5 * float(p.y @ p.y) - g_current), primal)
            if kkt <= tol:
                converged = True
                break

        if config.polish and iteration % config.polish_every == 0:
            kkt = p.kkt_residual(z, beta)
            candidate = polish_dual_point(p, z, kkt)
            if candidate is not None:
                z, beta, kkt = candidate
                polished = True
                if kkt <= tol:
                    converged = True
                    break
                w = z.copy()
                t = 1.0
                g_current = 0.5 * float(beta @ beta)

    if not converged:
        kkt = p.kkt_residual(z, beta)
        if config.polish:
            candidate = polish_dual_point(p, z, kkt)
            if candidate is not None:
                z, beta, kkt = candidate
                polished = True
        converged = kkt <= tol
        if not converged:
            logger.warning(f"dual solver stopped at max_iter={max_iter} with KKT residual {kkt:.3e}")

    if converged:
        logger.info(f"dual solve finished in {iteration} iterations, KKT residual {kkt:.3e}")
    return DualSolution(p.split(z), z, beta, kkt, iteration, converged, polished)


def _operator_norm_squared(B: SparseMatrix, iterations: int) -> float:
    """Largest eigenvalue of B^T B by power iteration"""
    n = B.ncols
    if B.nnz == 0 or n == 0:
        return 0.0
    v = np.random.default_rng(0).standard_normal(n)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(max(iterations, 1)):
        w = matvec_transpose(B, matvec(B, v))
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return estimate
        estimate = norm
        v = w / norm
    return estimate


def polish_dual_point(p: BoxedDualProblem, z: np.ndarray, kkt: float):
    """
    Fix coordinates sitting on a bound and solve for the free ones exactly

    Returns (z, beta, kkt) when the polished point stays in the box and has a
    smaller KKT residual, otherwise None.
    """
    scale = np.maximum(1.0, np.maximum(np.abs(p.lower), np.abs(p.upper)))
    slack = 1e-9 * scale
    free = (z > p.lower + slack) & (z < p.upper - slack)
    fixed_z = z.copy()
    fixed_z[z <= p.lower + slack] = p.lower[z <= p.lower + slack]
    fixed_z[z >= p.upper - slack] = p.upper[z >= p.upper - slack]

    if not np.any(free):
        candidate = fixed_z
    else:
        B_free = p.B.csr[free]
        residual = p.recover_beta(fixed_z)
        # least-squares correction of the free coordinates around their current values
        correction = lsqr(B_free.T, residual, atol=1e-15, btol=1e-15,
                          iter_lim=10 * (B_free.shape[0] + B_free.shape[1]))[0]
        candidate = fixed_z.copy()
        candidate[free] += correction
        if np.any(candidate < p.lower - slack) or np.any(candidate > p.upper + slack):
            return None
        candidate = p.project(candidate)

    beta = p.recover_beta(candidate)
    candidate_kkt = p.kkt_residual(candidate, beta)
    if not candidate_kkt < kkt:
        return None
    return candidate, beta, candidate_kkt


class DualSolver(BaseSolver):
    """BaseSolver wrapper around dual_solve"""

    engine = Engine.DUAL

    def __init__(self, config: DualConfig, trace: Optional[TraceSink] = None):
        super().__init__(trace)
        self.config = config

    def solve(self, y: np.ndarray, penalties: Sequence[PenaltySpec]) -> SolveResult:
        problem = BoxedDualProblem.from_penalties(y, penalties)
        solution = dual_solve(problem, tol=self.config.tol, max_iter=self.config.max_iter,
                              config=self.config, trace=self.trace)
        primal = problem.primal_objective(solution.beta)
        gap = problem.duality_gap(solution.z, solution.beta)
        return SolveResult(beta=solution.beta,
                           iterations=solution.iterations,
                           primal_residual=solution.kkt_residual,
                           dual_residual=max(gap, 0.0),
                           objective=primal,
                           converged=solution.converged,
                           engine=Engine.DUAL.value,
                           diagnostics={'dual': solution, 'polished': solution.polished})
