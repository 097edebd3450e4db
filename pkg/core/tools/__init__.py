"""
Estimator registry and result formatting used by the benchmark, the demos and the CLI
"""

from .estimator_registry import ENGINE_LABELS, EstimatorRegistry, EstimatorVariant, Lambdas, estimator_registry
from .result_processor import ResultProcessor

__all__ = [
    'ENGINE_LABELS',
    'EstimatorRegistry',
    'EstimatorVariant',
    'Lambdas',
    'estimator_registry',
    'ResultProcessor',
]
