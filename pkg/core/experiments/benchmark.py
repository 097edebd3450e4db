# -*- coding: utf-8 -*-
"""
Benchmark harness

Times estimator variants on noisy test surfaces over a range of grid sides,
with penalty weights drawn uniformly per run, and measures the per-iteration
work of ADMM with a CG beta update.
"""

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from core.errors import ConfigurationError
from core.experiments.generators import (
    DEFAULT_SIGMA2,
    GridSignal,
    add_noise,
    gen_bicubic,
    gen_bisigmoid,
    gen_linear,
    noise_generator,
)
from core.graph_model import LatticeSpec, incidence_matrix, lattice_graph
from core.penalties import PenaltyKind, PenaltySpec, TrendKind, trend_operator
from core.solvers.admm_solver import admm_solve_blocks
from core.solvers.base import AdmmConfig, BetaBackend, DualConfig
from core.tools.estimator_registry import Lambdas, estimator_registry


logger = logging.getLogger(__name__)

SIGNALS = {
    "bisigmoid": gen_bisigmoid,
    "bicubic": gen_bicubic,
    "linear": gen_linear,
}

DEFAULT_ESTIMATORS = ("FGTF-dual", "FKTF-dual", "FGTF-admm-cg", "FKTF-admm-cg",
                      "FGTF-admm-chol", "FKTF-admm-chol")
DEFAULT_LAMBDA_RANGE = (0.0, 20.0)
THREADS_ENV = "GTF_THREADS"


@dataclass(frozen=True)
class BenchmarkRecord:
    estimator: str
    engine: str
    d: int
    seed: int
    lambda_f: float
    lambda_t: float
    wall_time_s: float
    iterations: int

    def __post_init__(self):
        if not self.wall_time_s > 0:
            raise ValueError(f"wall time must be positive, got {self.wall_time_s}")


@dataclass(frozen=True)
class WorkSample:
    """Nonzeros touched per ADMM outer iteration and per CG iteration on a d x d grid"""
    d: int
    n_edges: int
    outer_per_iteration: float
    cg_per_iteration: float


def worker_count(requested: Optional[int] = None) -> int:
    """Requested workers, capped by GTF_THREADS when set"""
    workers = requested or 1
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            workers = min(workers, max(int(cap), 1))
        except ValueError:
            raise ConfigurationError(f"{THREADS_ENV} must be an integer, got '{cap}'")
    return max(workers, 1)


def benchmark(sizes: Sequence[int],
              estimators: Sequence[str] = DEFAULT_ESTIMATORS,
              seeds: int = 10,
              lambda_dist: Tuple[float, float] = DEFAULT_LAMBDA_RANGE,
              signal: str = "bisigmoid",
              sigma2: float = DEFAULT_SIGMA2,
              eps: float = 1e-3,
              max_workers: Optional[int] = None,
              base_seed: int = 0) -> List[BenchmarkRecord]:
    """
    Time each estimator on every (d, seed) pair

    Args:
        sizes: Grid sides d
        estimators: Registry names of the variants to time
        seeds: Runs per size; run k uses seed base_seed + k for both noise and weights
        lambda_dist: (low, high) of the uniform draw of lambda_f and lambda_t
        signal: 'bisigmoid', 'bicubic' or 'linear'
        sigma2: Noise variance
        eps: eps_abs = eps_rel for ADMM and the dual tolerance
        max_workers: Thread pool size, capped by GTF_THREADS

    Returns:
        One record per (estimator, d, seed), ordered by d, seed, then estimator order
    """
    if not sizes:
        raise ConfigurationError("benchmark needs at least one grid size")
    if signal not in SIGNALS:
        raise ConfigurationError(f"unknown signal '{signal}', choose from {sorted(SIGNALS)}")
    low, high = lambda_dist
    if not 0 <= low <= high:
        raise ConfigurationError(f"invalid lambda range {lambda_dist}")
    variants = [estimator_registry.require(name) for name in estimators]

    admm_config = AdmmConfig(eps_abs=eps, eps_rel=eps)
    dual_config = DualConfig(tol=eps)

    tasks = []
    for d in sizes:
        for run in range(seeds):
            seed = base_seed + run
            rng = noise_generator(seed)
            lambda_f, lambda_t = rng.uniform(low, high, size=2)
            noisy = add_noise(SIGNALS[signal](d), sigma2, seed)
            for order, variant in enumerate(variants):
                tasks.append((d, seed, order, variant, noisy, float(lambda_f), float(lambda_t)))

    def run_task(task) -> Tuple[Tuple[int, int, int], BenchmarkRecord]:
        d, seed, order, variant, noisy, lambda_f, lambda_t = task
        start = time.perf_counter()
        result = variant.run(noisy, Lambdas(f=lambda_f, t=lambda_t), admm_config, dual_config)
        elapsed = max(time.perf_counter() - start, 1e-9)
        record = BenchmarkRecord(variant.name, variant.engine_label, d, seed, lambda_f, lambda_t,
                                 elapsed, result.iterations)
        logger.debug(f"{variant.name} d={d} seed={seed}: {elapsed:.3f}s, {result.iterations} iterations")
        return (d, seed, order), record

    workers = worker_count(max_workers)
    logger.info(f"benchmark: {len(tasks)} runs on {workers} worker(s)")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        keyed = list(pool.map(run_task, tasks))
    return [record for _, record in sorted(keyed, key=lambda item: item[0])]


def work_per_iteration(d: int, trend: TrendKind = TrendKind.GENERAL, iterations: int = 3,
                       cg_max_iter: int = 25, seed: int = 0) -> WorkSample:
    """
    Count nonzeros touched by a few ADMM-CG iterations on a d x d grid

    Tolerances are set so that the run never stops early; the counts per
    iteration do not depend on convergence.
    """
    spec = LatticeSpec(d, d)
    graph = lattice_graph(spec)
    y = noise_generator(seed).standard_normal(spec.size)
    blocks = [PenaltySpec(incidence_matrix(graph), PenaltyKind.L1, 1.0),
              PenaltySpec(trend_operator(graph, spec, trend), PenaltyKind.L1, 1.0)]
    cfg = AdmmConfig(eps_abs=1e-300, eps_rel=1e-300, max_iter=iterations,
                     beta_update_backend=BetaBackend.CG, cg_max_iter=cg_max_iter)
    result = admm_solve_blocks(y, blocks, cfg)
    return WorkSample(d=d,
                     n_edges=graph.n_edges,
                     outer_per_iteration=result.diagnostics['outer_work_per_iteration'],
                     cg_per_iteration=result.diagnostics['cg_work_per_iteration'])


def noisy_signal(kind: str, d: int, sigma2: float = DEFAULT_SIGMA2, seed: int = 0) -> GridSignal:
    if kind not in SIGNALS:
        raise ConfigurationError(f"unknown signal '{kind}', choose from {sorted(SIGNALS)}")
    return add_noise(SIGNALS[kind](d), sigma2, seed)
