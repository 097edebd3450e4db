# -*- coding: utf-8 -*-
"""
Solver Interface

Shared configuration, result types and the abstract solver every numerical
engine implements. Estimators talk to engines only through BaseSolver.solve,
so ADMM and the dual box-QP solver are interchangeable.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from core.errors import ConfigurationError
from core.penalties import PenaltySpec


class Engine(str, Enum):
    ADMM = "admm"
    DUAL = "dual"


class BetaBackend(str, Enum):
    """How the ADMM beta-update system is solved"""
    CG = "cg"
    FACTORIZATION = "factorization"


@dataclass
class AdmmConfig:
    """ADMM settings; tolerances follow the usual eps_abs / eps_rel stopping rule"""
    rho1: float = 1.0
    rho2: float = 1.0
    eps_abs: float = 1e-3
    eps_rel: float = 1e-3
    max_iter: int = 10_000
    beta_update_backend: BetaBackend = BetaBackend.FACTORIZATION
    cg_tol: float = 1e-10
    cg_max_iter: Optional[int] = None
    # converged also needs sqrt(2 * duality gap) <= eps_abs, which bounds ||beta - beta*||_2
    polish: bool = True
    polish_every: int = 100

    def __post_init__(self):
        self.beta_update_backend = BetaBackend(self.beta_update_backend)
        if self.rho1 <= 0 or self.rho2 <= 0:
            raise ConfigurationError(f"rho1 and rho2 must be positive, got {self.rho1}, {self.rho2}")
        if self.eps_abs <= 0 or self.eps_rel <= 0:
            raise ConfigurationError("eps_abs and eps_rel must be positive")
        if self.max_iter < 1:
            raise ConfigurationError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.polish_every < 1:
            raise ConfigurationError(f"polish_every must be >= 1, got {self.polish_every}")


@dataclass
class DualConfig:
    """Accelerated projected gradient on the boxed dual"""
    tol: float = 1e-6
    max_iter: int = 100_000
    power_iterations: int = 30
    polish: bool = True
    polish_every: int = 100

    def __post_init__(self):
        if self.tol <= 0:
            raise ConfigurationError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ConfigurationError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass
class SolveResult:
    """Estimate plus solver diagnostics"""
    beta: np.ndarray
    iterations: int
    primal_residual: float
    dual_residual: float
    objective: float
    converged: bool
    engine: str = ""
    diagnostics: Dict[str, Any] = field(default_factory=dict)


class TraceSink(ABC):
    """Receives one record per traced solver iteration"""

    @abstractmethod
    def record(self, iteration: int, r_pri: float, r_dual: float, objective: float) -> None:
        pass

    def close(self) -> None:
        pass


class MemoryTraceSink(TraceSink):
    """Keeps trace records in a list"""

    def __init__(self):
        self.records: List[tuple] = []

    def record(self, iteration: int, r_pri: float, r_dual: float, objective: float) -> None:
        self.records.append((iteration, r_pri, r_dual, objective))


class BaseSolver(ABC):
    """Base class for the numerical engines"""

    engine: Engine

    def __init__(self, trace: Optional[TraceSink] = None):
        self.trace = trace

    @abstractmethod
    def solve(self, y: np.ndarray, penalties: Sequence[PenaltySpec]) -> SolveResult:
        """
        Minimize 1/2 ||y - beta||^2 + sum of penalty blocks

        Args:
            y: Observed signal
            penalties: Penalty blocks; zero-weight or empty blocks are ignored

        Returns:
            SolveResult with the estimate and diagnostics
        """
        pass

    def get_solver_info(self) -> Dict[str, Any]:
        return {
            'solver_name': self.__class__.__name__,
            'engine': self.engine.value,
        }


def create_solver(engine: Engine,
                  admm_config: Optional[AdmmConfig] = None,
                  dual_config: Optional[DualConfig] = None,
                  trace: Optional[TraceSink] = None) -> BaseSolver:
    """Instantiate the engine named by the request"""
    engine = Engine(engine)
    if engine is Engine.ADMM:
        from core.solvers.admm_solver import AdmmSolver
        return AdmmSolver(admm_config or AdmmConfig(), trace=trace)
    from core.solvers.dual_solver import DualSolver
    return DualSolver(dual_config or DualConfig(), trace=trace)
