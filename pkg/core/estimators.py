# -*- coding: utf-8 -*-
"""
Estimators

Public estimator API: fused lasso, nearly-isotonic regression, the general and
Kronecker trend filters, their fused / nearly-isotonic combinations, the mixed
multi-penalty filter and the isotonic limit.

Every estimator builds its penalty blocks, hands them to an engine through
BaseSolver, runs the registered post-condition hooks and returns the
SolveResult. The nearly-isotonic family on the ADMM engine goes through the
reduction to a fused problem on a shifted signal:

    NITF(y, lambda_ni, lambda_t) = FLTF(y - (lambda_ni / 2) D^T 1, lambda_ni / 2, lambda_t)
"""

import logging
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.errors import ConfigurationError, CyclicGraphError, DimensionMismatchError
from core.graph_model import DiGraph, LatticeSpec, lattice_graph, validate_dag
from core.linalg.sparse_matrix import SparseMatrix, matvec_transpose
from core.penalties import PenaltyKind, PenaltySpec, TrendKind, fusion_operator, kronecker_trend_matrix, trend_operator
from core.solvers.admm_solver import admm_solve_blocks
from core.solvers.base import AdmmConfig, DualConfig, Engine, SolveResult, TraceSink, create_solver
from core.solvers.prox import objective


logger = logging.getLogger(__name__)

# isotonic regression is reached as nearly-isotonic with lambda = ISOTONIC_MULTIPLIER * range(y)
ISOTONIC_MULTIPLIER = 1e3

PostCondition = Callable[[np.ndarray, SolveResult, Sequence[PenaltySpec]], None]

_postconditions: List[PostCondition] = []


def register_postcondition(hook: PostCondition) -> None:
    """hook(y, result, blocks) runs after every estimator call"""
    _postconditions.append(hook)


def clear_postconditions() -> None:
    _postconditions.clear()


class EstimatorRequest(BaseModel):
    """One filtering request: signal, order graph, penalty weights and engine"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    y: np.ndarray
    graph: Optional[Any] = None
    lattice: Optional[LatticeSpec] = None
    lambda_f: float = Field(default=0.0, ge=0.0)
    lambda_ni: float = Field(default=0.0, ge=0.0)
    lambda_t: float = Field(default=0.0, ge=0.0)
    trend: TrendKind = TrendKind.GENERAL
    engine: Engine = Engine.DUAL

    @field_validator("y", mode="before")
    @classmethod
    def _as_vector(cls, value):
        y = np.asarray(value, dtype=np.float64)
        if y.ndim != 1:
            raise ValueError(f"signal must be one-dimensional, got shape {y.shape}")
        if not np.all(np.isfinite(y)):
            raise ValueError("signal contains non-finite values")
        return y

    @field_validator("graph")
    @classmethod
    def _is_graph(cls, value):
        if value is not None and not isinstance(value, DiGraph):
            raise ValueError(f"graph must be a DiGraph, got {type(value).__name__}")
        return value

    @model_validator(mode="after")
    def _check_consistency(self):
        if self.lambda_f > 0 and self.lambda_ni > 0:
            raise ValueError("lambda_f and lambda_ni cannot both be nonzero")
        if self.graph is None:
            if self.lattice is None:
                raise ValueError("a graph or a lattice is required")
            self.graph = lattice_graph(self.lattice)
        if self.trend is TrendKind.KRONECKER and self.lattice is None:
            raise ValueError("Kronecker trend filtering needs a lattice")
        if self.lattice is not None and self.lattice.size != self.graph.n_vertices:
            raise ValueError(f"lattice {self.lattice} does not match a graph with {self.graph.n_vertices} vertices")
        if self.y.shape[0] != self.graph.n_vertices:
            raise ValueError(f"signal has {self.y.shape[0]} values, graph has {self.graph.n_vertices} vertices")
        return self


def nearly_isotonic_reduction(y: np.ndarray, D: SparseMatrix, lambda_ni: float) -> Tuple[np.ndarray, float]:
    """(y - (lambda_ni / 2) D^T 1, lambda_ni / 2)"""
    y = np.asarray(y, dtype=np.float64)
    shift = matvec_transpose(D, np.ones(D.nrows))
    return y - 0.5 * lambda_ni * shift, 0.5 * lambda_ni


def sum_conservation_gap(y: np.ndarray, beta: np.ndarray) -> float:
    """|sum(beta) - sum(y)|"""
    return abs(float(np.sum(beta)) - float(np.sum(y)))


def fused_lasso(y: np.ndarray, graph: DiGraph, lambda_f: float,
                engine: Engine = Engine.DUAL, **options) -> SolveResult:
    """1/2 ||y - beta||^2 + lambda_f ||D beta||_1"""
    _check_weights(lambda_f=lambda_f)
    blocks = [PenaltySpec(fusion_operator(graph), PenaltyKind.L1, lambda_f)]
    return _run("fused_lasso", y, blocks, engine, **options)


def nearly_isotonic(y: np.ndarray, graph: DiGraph, lambda_ni: float,
                    engine: Engine = Engine.DUAL, **options) -> SolveResult:
    """1/2 ||y - beta||^2 + lambda_ni sum(max(D beta, 0))"""
    _check_weights(lambda_ni=lambda_ni)
    _require_dag(graph)
    D = fusion_operator(graph)
    return _run_nearly_isotonic("nearly_isotonic", y, D, lambda_ni, None, engine, **options)


def general_trend_filter(y: np.ndarray, graph: DiGraph, lambda_t: float,
                         engine: Engine = Engine.DUAL, **options) -> SolveResult:
    """1/2 ||y - beta||^2 + lambda_t ||L beta||_1 with L the graph Laplacian"""
    _check_weights(lambda_t=lambda_t)
    blocks = [PenaltySpec(trend_operator(graph, None, TrendKind.GENERAL), PenaltyKind.L1, lambda_t)]
    return _run("general_trend_filter", y, blocks, engine, **options)


def kronecker_trend_filter(y: np.ndarray, lattice: Optional[LatticeSpec], lambda_t: float,
                           engine: Engine = Engine.DUAL, **options) -> SolveResult:
    """1/2 ||y - beta||^2 + lambda_t ||K beta||_1 with K the Kronecker trend matrix"""
    if lattice is None:
        raise ConfigurationError("Kronecker trend filtering needs a lattice spec")
    _check_weights(lambda_t=lambda_t)
    blocks = [PenaltySpec(kronecker_trend_matrix(lattice), PenaltyKind.L1, lambda_t)]
    return _run("kronecker_trend_filter", y, blocks, engine, **options)


def fused_trend_filter(req: EstimatorRequest, **options) -> SolveResult:
    """1/2 ||y - beta||^2 + lambda_f ||D beta||_1 + lambda_t ||Delta beta||_1"""
    if req.lambda_ni > 0:
        raise ConfigurationError("fused_trend_filter takes lambda_f; use nearly_isotonic_trend_filter for lambda_ni")
    D = fusion_operator(req.graph)
    delta = trend_operator(req.graph, req.lattice, req.trend)
    blocks = [PenaltySpec(D, PenaltyKind.L1, req.lambda_f), PenaltySpec(delta, PenaltyKind.L1, req.lambda_t)]
    return _run("fused_trend_filter", req.y, blocks, req.engine, **options)


def nearly_isotonic_trend_filter(req: EstimatorRequest, **options) -> SolveResult:
    """1/2 ||y - beta||^2 + lambda_ni sum(max(D beta, 0)) + lambda_t ||Delta beta||_1"""
    if req.lambda_f > 0:
        raise ConfigurationError("nearly_isotonic_trend_filter takes lambda_ni; use fused_trend_filter for lambda_f")
    _require_dag(req.graph)
    D = fusion_operator(req.graph)
    delta = PenaltySpec(trend_operator(req.graph, req.lattice, req.trend), PenaltyKind.L1, req.lambda_t)
    return _run_nearly_isotonic("nearly_isotonic_trend_filter", req.y, D, req.lambda_ni, delta,
                                req.engine, **options)


def filter_signal(req: EstimatorRequest, **options) -> SolveResult:
    """Dispatch a request to the fused or the nearly-isotonic trend filter"""
    if req.lambda_ni > 0:
        return nearly_isotonic_trend_filter(req, **options)
    return fused_trend_filter(req, **options)


def mixed_trend_filter(y: np.ndarray, blocks: Sequence[PenaltySpec],
                       engine: Engine = Engine.DUAL, **options) -> SolveResult:
    """Any number of L1 / positive-part blocks"""
    return _run("mixed_trend_filter", y, list(blocks), engine, **options)


def isotonic_limit(y: np.ndarray, graph: DiGraph, engine: Engine = Engine.DUAL, **options) -> SolveResult:
    """
    Isotonic regression along the graph order, non-decreasing on every edge

    Reached as nearly-isotonic regression with lambda = 1e3 * (max(y) - min(y)).
    The limit always runs on the dual engine to a tight KKT tolerance unless a
    dual config is given: ADMM steps scale with 1/lambda and cannot reach
    D beta <= 1e-6 at this weight. An ADMM request is noted in the diagnostics.
    """
    requested = Engine(engine)
    y = _as_signal(y, graph.n_vertices)
    spread = float(y.max() - y.min()) if y.size else 0.0
    options.pop("admm_config", None)
    if options.get("dual_config") is None:
        options["dual_config"] = DualConfig(tol=1e-10)
    if requested is Engine.ADMM:
        logger.info("isotonic_limit: running the dual engine in place of ADMM")
    result = nearly_isotonic(y, graph, ISOTONIC_MULTIPLIER * spread, engine=Engine.DUAL, **options)
    result.diagnostics['requested_engine'] = requested.value
    return result


def _run_nearly_isotonic(name: str, y: np.ndarray, D: SparseMatrix, lambda_ni: float,
                         trend: Optional[PenaltySpec], engine: Engine, **options) -> SolveResult:
    blocks = [PenaltySpec(D, PenaltyKind.POSITIVE_PART, lambda_ni)]
    if trend is not None:
        blocks.append(trend)

    if Engine(engine) is Engine.DUAL or lambda_ni == 0:
        return _run(name, y, blocks, engine, **options)

    # ADMM: solve the equivalent fused problem on the shifted signal
    y = _as_signal(y, D.ncols)
    shifted, lambda_f = nearly_isotonic_reduction(y, D, lambda_ni)
    fused_blocks = [PenaltySpec(D, PenaltyKind.L1, lambda_f)] + blocks[1:]
    result = _solve(shifted, fused_blocks, engine, **options)
    result.objective = objective(y, result.beta, blocks)
    result.diagnostics['reduced'] = True
    return _finish(name, y, result, blocks)


def _run(name: str, y: np.ndarray, blocks: Sequence[PenaltySpec], engine: Engine, **options) -> SolveResult:
    n = blocks[0].operator.ncols if blocks else None
    y = _as_signal(y, n)
    for spec in blocks:
        if spec.operator.ncols != y.shape[0]:
            raise DimensionMismatchError(f"operator has {spec.operator.ncols} columns, signal has {y.shape[0]}")
    result = _solve(y, blocks, engine, **options)
    return _finish(name, y, result, blocks)


def _solve(y: np.ndarray, blocks: Sequence[PenaltySpec], engine: Engine,
           admm_config: Optional[AdmmConfig] = None,
           dual_config: Optional[DualConfig] = None,
           trace: Optional[TraceSink] = None,
           rhos: Optional[Sequence[float]] = None) -> SolveResult:
    engine = Engine(engine)
    if engine is Engine.ADMM:
        return admm_solve_blocks(y, blocks, admm_config or AdmmConfig(), rhos=rhos, trace=trace)
    return create_solver(engine, dual_config=dual_config, trace=trace).solve(y, blocks)


def _finish(name: str, y: np.ndarray, result: SolveResult, blocks: Sequence[PenaltySpec]) -> SolveResult:
    for hook in _postconditions:
        hook(y, result, blocks)
    logger.debug(f"{name}: engine={result.engine} iters={result.iterations} "
                 f"objective={result.objective:.6g} converged={result.converged}")
    return result


def _as_signal(y, n: Optional[int]) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1:
        raise DimensionMismatchError(f"signal must be one-dimensional, got shape {y.shape}")
    if n is not None and y.shape[0] != n:
        raise DimensionMismatchError(f"signal has {y.shape[0]} values, expected {n}")
    return y


def _check_weights(**weights: float) -> None:
    for name, value in weights.items():
        if not np.isfinite(value) or value < 0:
            raise ConfigurationError(f"{name} must be finite and >= 0, got {value}")


def _require_dag(graph: DiGraph) -> None:
    if not validate_dag(graph):
        raise CyclicGraphError("nearly-isotonic estimators need an acyclic order graph")
