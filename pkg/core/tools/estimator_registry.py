"""
Estimator registry

Named estimator variants (estimator x engine) used by the benchmark and the
demos. FGTF is fused lasso with the general (Laplacian) trend filter, FKTF
fused lasso with the Kronecker trend filter; each comes with the dual engine
and ADMM with a CG or a Cholesky-type beta update.
"""

import logging
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, List, Optional

from core.estimators import (
    EstimatorRequest,
    filter_signal,
    fused_lasso,
    general_trend_filter,
    isotonic_limit,
    kronecker_trend_filter,
    nearly_isotonic,
)
from core.experiments.generators import GridSignal
from core.graph_model import lattice_graph
from core.penalties import TrendKind
from core.solvers.base import AdmmConfig, BetaBackend, DualConfig, Engine, SolveResult


logger = logging.getLogger(__name__)

# engine label -> (engine, ADMM beta-update backend)
ENGINE_LABELS = {
    "dual": (Engine.DUAL, None),
    "admm-cg": (Engine.ADMM, BetaBackend.CG),
    "admm-chol": (Engine.ADMM, BetaBackend.FACTORIZATION),
}


@dataclass(frozen=True)
class Lambdas:
    f: float = 0.0
    t: float = 0.0
    ni: float = 0.0


Runner = Callable[[GridSignal, Lambdas, Dict[str, Any]], SolveResult]


@dataclass(frozen=True)
class EstimatorVariant:
    """A runnable estimator with a fixed engine"""
    name: str
    category: str
    engine_label: str
    description: str
    runner: Runner

    def run(self, signal: GridSignal, lambdas: Lambdas,
            admm_config: Optional[AdmmConfig] = None,
            dual_config: Optional[DualConfig] = None) -> SolveResult:
        engine, backend = ENGINE_LABELS[self.engine_label]
        options: Dict[str, Any] = {'engine': engine}
        if engine is Engine.ADMM:
            options['admm_config'] = replace(admm_config or AdmmConfig(), beta_update_backend=backend)
        else:
            options['dual_config'] = dual_config
        return self.runner(signal, lambdas, options)


def _fused_trend(trend: TrendKind) -> Runner:
    def run(signal: GridSignal, lambdas: Lambdas, options: Dict[str, Any]) -> SolveResult:
        engine = options.pop('engine')
        req = EstimatorRequest(y=signal.values, lattice=signal.spec, lambda_f=lambdas.f,
                               lambda_t=lambdas.t, trend=trend, engine=engine)
        return filter_signal(req, **options)
    return run


def _nearly_isotonic_trend(trend: TrendKind) -> Runner:
    def run(signal: GridSignal, lambdas: Lambdas, options: Dict[str, Any]) -> SolveResult:
        engine = options.pop('engine')
        req = EstimatorRequest(y=signal.values, lattice=signal.spec, lambda_ni=lambdas.ni,
                               lambda_t=lambdas.t, trend=trend, engine=engine)
        return filter_signal(req, **options)
    return run


def _fused(signal: GridSignal, lambdas: Lambdas, options: Dict[str, Any]) -> SolveResult:
    return fused_lasso(signal.values, lattice_graph(signal.spec), lambdas.f, **options)


def _general(signal: GridSignal, lambdas: Lambdas, options: Dict[str, Any]) -> SolveResult:
    return general_trend_filter(signal.values, lattice_graph(signal.spec), lambdas.t, **options)


def _kronecker(signal: GridSignal, lambdas: Lambdas, options: Dict[str, Any]) -> SolveResult:
    return kronecker_trend_filter(signal.values, signal.spec, lambdas.t, **options)


def _nearly_isotonic(signal: GridSignal, lambdas: Lambdas, options: Dict[str, Any]) -> SolveResult:
    return nearly_isotonic(signal.values, lattice_graph(signal.spec), lambdas.ni, **options)


def _isotonic(signal: GridSignal, lambdas: Lambdas, options: Dict[str, Any]) -> SolveResult:
    return isotonic_limit(signal.values, lattice_graph(signal.spec), **options)


class EstimatorRegistry:
    """Lookup of estimator variants by name and category"""

    def __init__(self):
        self._variants: List[EstimatorVariant] = []
        self._variant_map: Dict[str, EstimatorVariant] = {}
        self._register_all_variants()

    def _register_all_variants(self):
        for label in ENGINE_LABELS:
            self._register_variant(EstimatorVariant(
                f"FGTF-{label}", "fused_trend", label,
                "fused lasso + general trend filter", _fused_trend(TrendKind.GENERAL)))
            self._register_variant(EstimatorVariant(
                f"FKTF-{label}", "fused_trend", label,
                "fused lasso + Kronecker trend filter", _fused_trend(TrendKind.KRONECKER)))
            self._register_variant(EstimatorVariant(
                f"NIKTF-{label}", "nearly_isotonic_trend", label,
                "nearly-isotonic + Kronecker trend filter", _nearly_isotonic_trend(TrendKind.KRONECKER)))

        self._register_variant(EstimatorVariant("fused", "single", "dual", "fused lasso", _fused))
        self._register_variant(EstimatorVariant("general", "single", "dual", "general trend filter", _general))
        self._register_variant(EstimatorVariant("kronecker", "single", "dual", "Kronecker trend filter", _kronecker))
        self._register_variant(EstimatorVariant("nearly-isotonic", "order", "dual",
                                                "nearly-isotonic regression", _nearly_isotonic))
        self._register_variant(EstimatorVariant("isotonic", "order", "dual",
                                                "isotonic regression (large-lambda limit)", _isotonic))

    def _register_variant(self, variant: EstimatorVariant):
        self._variants.append(variant)
        self._variant_map[variant.name] = variant

    def get_all_variants(self) -> List[EstimatorVariant]:
        return self._variants.copy()

    def get_variant_by_name(self, name: str) -> Optional[EstimatorVariant]:
        return self._variant_map.get(name)

    def require(self, name: str) -> EstimatorVariant:
        variant = self._variant_map.get(name)
        if variant is None:
            raise KeyError(f"unknown estimator '{name}', known: {', '.join(self.get_variant_names())}")
        return variant

    def get_variants_by_category(self, category: str) -> List[EstimatorVariant]:
        return [v for v in self._variants if v.category == category]

    def get_variant_names(self) -> List[str]:
        return [v.name for v in self._variants]

    def get_variant_info(self) -> Dict[str, Any]:
        categories: Dict[str, List[Dict[str, str]]] = {}
        for variant in self._variants:
            categories.setdefault(variant.category, []).append({
                "name": variant.name,
                "engine": variant.engine_label,
                "description": variant.description,
            })
        return {"total_variants": len(self._variants), "categories": categories}


estimator_registry = EstimatorRegistry()
