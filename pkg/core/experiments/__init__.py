"""
Test signals, the benchmark harness and the demo scenarios

Only the generators are re-exported here; benchmark and demos depend on the
estimator registry, which itself depends on the generators.
"""

from .generators import (
    GridSignal,
    add_noise,
    best_linear_fit,
    corrupt_lines,
    gen_bicubic,
    gen_bisigmoid,
    gen_chessboard,
    gen_linear,
    mse,
)

__all__ = [
    'GridSignal',
    'add_noise',
    'best_linear_fit',
    'corrupt_lines',
    'gen_bicubic',
    'gen_bisigmoid',
    'gen_chessboard',
    'gen_linear',
    'mse',
]
