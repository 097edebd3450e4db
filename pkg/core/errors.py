# -*- coding: utf-8 -*-
"""
Error hierarchy

Every failure raised by the numerical core derives from GraphTrendError, so
callers (the CLI in particular) can separate solver problems from I/O problems.
Non-convergence is not an error: it is reported through SolveResult.converged.
"""


class GraphTrendError(Exception):
    """Base exception for the trend filtering core"""
    pass


class ConstructionError(GraphTrendError):
    """Raised when a matrix, graph, lattice or penalty cannot be built"""
    pass


class DimensionMismatchError(GraphTrendError):
    """Raised when vector or operator shapes do not agree"""
    pass


class NumericalFailureError(GraphTrendError):
    """Raised when an iteration produces non-finite values"""
    pass


class NotPositiveDefiniteError(NumericalFailureError):
    """Raised when a factorization meets a non-positive pivot"""
    pass


class CyclicGraphError(GraphTrendError):
    """Raised when an order-based estimator receives a graph with a directed cycle"""
    pass


class ConfigurationError(GraphTrendError):
    """Raised when a configuration or request is internally inconsistent"""
    pass
