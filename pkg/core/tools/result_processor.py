"""
Result processor

Formats solver results, MSE tables and benchmark averages for the CLI
"""

from collections import defaultdict
from typing import Any, Dict, List, Sequence, Tuple

from core.solvers.base import SolveResult


class ResultProcessor:
    """Text renderings of estimator output"""

    @staticmethod
    def format_summary(n: int, m: int, result: SolveResult) -> str:
        """
        One-line run summary

        Args:
            n: Number of vertices
            m: Number of edges
            result: Solver result

        Returns:
            'n=<n> m=<m> iters=<iterations> objective=<objective>'
        """
        return f"n={n} m={m} iters={result.iterations} objective={result.objective:.10g}"

    @staticmethod
    def format_result_info(result: SolveResult) -> Dict[str, Any]:
        """Flat dict of the result fields and the engine diagnostics worth logging"""
        info = {
            "engine": result.engine,
            "iterations": result.iterations,
            "converged": result.converged,
            "objective": result.objective,
            "primal_residual": result.primal_residual,
            "dual_residual": result.dual_residual,
        }
        for key in ("backend", "requested_engine", "duality_gap", "polished", "cg_iterations",
                    "outer_work_per_iteration", "cg_work_per_iteration"):
            if key in result.diagnostics:
                info[key] = result.diagnostics[key]
        return info

    @staticmethod
    def format_mse_table(rows: Sequence[Tuple[str, float]]) -> str:
        """CSV with header 'image,mse', 17 significant digits"""
        lines = ["image,mse"]
        lines.extend(f"{name},{value:.17g}" for name, value in rows)
        return "\n".join(lines) + "\n"

    @staticmethod
    def format_benchmark_summary(records: Sequence[Any]) -> str:
        """Mean wall time and iterations per (estimator, engine, d)"""
        if not records:
            return "no benchmark records"

        groups: Dict[Tuple[str, str, int], List[Any]] = defaultdict(list)
        for record in records:
            groups[(record.estimator, record.engine, record.d)].append(record)

        lines = [f"{'estimator':<16} {'engine':<10} {'d':>5} {'runs':>5} {'mean_time_s':>12} {'mean_iters':>11}"]
        for (estimator, engine, d), group in sorted(groups.items()):
            mean_time = sum(r.wall_time_s for r in group) / len(group)
            mean_iters = sum(r.iterations for r in group) / len(group)
            lines.append(f"{estimator:<16} {engine:<10} {d:>5} {len(group):>5} {mean_time:>12.4f} {mean_iters:>11.1f}")
        return "\n".join(lines)
