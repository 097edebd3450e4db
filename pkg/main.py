"""
Graph trend filtering - command-line entry point

    python main.py filter --input y.csv --output beta.csv --graph chain:100 --lambda-f 0.5 --lambda-t 1
    python main.py bench --sizes 10,20 --seeds 1 --output bench.csv
    python main.py demo --scenario chess --output demo/

Exit codes: 0 success, 1 usage or configuration error, 2 I/O or parse error,
3 solver did not converge (output is still written).
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field, ValidationError, model_validator

from adapters.base_adapter import AdapterError, SignalData, adapter_for_path
from adapters.graph_adapter import parse_graph_source
from adapters.trace_adapter import CsvTraceSink, dump_operators, write_benchmark_csv
from core.config_manager import AppConfig, ConfigManager
from core.errors import ConfigurationError, GraphTrendError, NumericalFailureError
from core.estimators import EstimatorRequest, filter_signal
from core.experiments.benchmark import benchmark
from core.experiments.demos import SCENARIOS, run_demo
from core.graph_model import LatticeSpec, chain_graph, lattice_graph
from core.penalties import TrendKind, fusion_operator, trend_operator
from core.solvers.base import BetaBackend, Engine
from core.tools.result_processor import ResultProcessor

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NOT_CONVERGED = 3


class RunConfig(BaseModel):
    """Validated options of one CLI invocation"""
    command: str
    input: Optional[Path] = None
    output: Optional[Path] = None
    graph: Optional[str] = None
    lattice: Optional[str] = None
    lambda_f: float = Field(default=0.0, ge=0.0)
    lambda_ni: float = Field(default=0.0, ge=0.0)
    lambda_t: float = Field(default=0.0, ge=0.0)
    trend: TrendKind = TrendKind.GENERAL
    engine: Optional[Engine] = None
    backend: Optional[BetaBackend] = None
    eps_abs: Optional[float] = Field(default=None, gt=0.0)
    eps_rel: Optional[float] = Field(default=None, gt=0.0)
    rho1: Optional[float] = Field(default=None, gt=0.0)
    rho2: Optional[float] = Field(default=None, gt=0.0)
    tol: Optional[float] = Field(default=None, gt=0.0)
    seed: int = 0
    trace: Optional[Path] = None
    dump_operators: Optional[Path] = None

    @model_validator(mode="after")
    def _check_consistency(self):
        if self.lambda_f > 0 and self.lambda_ni > 0:
            raise ValueError("--lambda-f and --lambda-ni cannot both be nonzero")
        if self.command == "filter" and (self.input is None or self.output is None):
            raise ValueError("filter needs --input and --output")
        if self.trend is TrendKind.KRONECKER and self.graph and not self.graph.startswith("lattice:") \
                and not self.graph.startswith("chain:") and self.lattice is None:
            raise ValueError("--trend kronecker with an edge-list graph needs --lattice")
        return self


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gtf", description="Fused l1 trend filtering on directed graphs")
    parser.add_argument("--config", help="configuration file (YAML, INI or JSON)")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    filt = sub.add_parser("filter", help="filter one signal")
    filt.add_argument("--input", required=True, help="signal file (.csv one value per line, or .pgm)")
    filt.add_argument("--output", required=True, help="output file, same formats")
    filt.add_argument("--graph", help="chain:n, lattice:n1xn2 or an edge-list file")
    filt.add_argument("--lattice", help="lattice shape n1xn2 (needed for Kronecker trend filtering)")
    filt.add_argument("--lambda-f", "--fused", dest="lambda_f", type=float, default=0.0, help="fusion weight")
    filt.add_argument("--lambda-ni", dest="lambda_ni", type=float, default=0.0, help="nearly-isotonic weight")
    filt.add_argument("--lambda-t", dest="lambda_t", type=float, default=0.0, help="trend weight")
    filt.add_argument("--trend", choices=[k.value for k in TrendKind], default=TrendKind.GENERAL.value)
    filt.add_argument("--engine", choices=[e.value for e in Engine], help="solver engine (default from config)")
    filt.add_argument("--backend", choices=[b.value for b in BetaBackend], help="ADMM beta-update backend")
    filt.add_argument("--eps-abs", dest="eps_abs", type=float)
    filt.add_argument("--eps-rel", dest="eps_rel", type=float)
    filt.add_argument("--rho1", type=float)
    filt.add_argument("--rho2", type=float)
    filt.add_argument("--tol", type=float, help="dual solver KKT tolerance")
    filt.add_argument("--seed", type=int, default=0)
    filt.add_argument("--trace", help="write a per-iteration CSV trace")
    filt.add_argument("--dump-operators", dest="dump_operators", help="directory for D and Delta triplet dumps")

    bench = sub.add_parser("bench", help="time estimators on noisy test surfaces")
    bench.add_argument("--output", required=True, help="benchmark CSV")
    bench.add_argument("--sizes", help="comma-separated grid sides")
    bench.add_argument("--seeds", type=int, help="runs per size")
    bench.add_argument("--estimators", help="comma-separated registry names")
    bench.add_argument("--signal", choices=["bisigmoid", "bicubic", "linear"])
    bench.add_argument("--lambda-low", dest="lambda_low", type=float)
    bench.add_argument("--lambda-high", dest="lambda_high", type=float)
    bench.add_argument("--eps", type=float, default=1e-3, help="eps_abs = eps_rel and dual tolerance")
    bench.add_argument("--threads", type=int, help="worker threads (capped by GTF_THREADS)")
    bench.add_argument("--seed", type=int, default=0, help="first seed")

    demo = sub.add_parser("demo", help="regenerate a demo scenario")
    demo.add_argument("--scenario", choices=sorted(SCENARIOS), default="chess")
    demo.add_argument("--output", required=True, help="output directory")
    demo.add_argument("--size", type=int, help="grid side")
    demo.add_argument("--seed", type=int, default=0)
    return parser


def load_app_config(path: Optional[str]) -> AppConfig:
    manager = ConfigManager(path)
    config = manager.load_config()
    if not manager.validate_config():
        raise ConfigurationError("configuration validation failed")
    return config


def resolve_graph(run: RunConfig, signal: SignalData):
    """Graph and lattice from --graph / --lattice, else from the input's shape"""
    lattice = LatticeSpec.parse(run.lattice) if run.lattice else None
    if run.graph:
        graph, source_lattice = parse_graph_source(run.graph)
        return graph, lattice or source_lattice
    if lattice is not None:
        return lattice_graph(lattice), lattice
    if signal.lattice is not None:
        return lattice_graph(signal.lattice), signal.lattice
    n = signal.values.shape[0]
    return chain_graph(n), LatticeSpec(n, 1)


def cmd_filter(run: RunConfig, app: AppConfig) -> int:
    admm = app.admm
    for name in ("eps_abs", "eps_rel", "rho1", "rho2"):
        value = getattr(run, name)
        if value is not None:
            admm = replace(admm, **{name: value})
    if run.backend is not None:
        admm = replace(admm, beta_update_backend=run.backend)
    dual = replace(app.dual, tol=run.tol) if run.tol is not None else app.dual
    engine = run.engine or app.engine

    reader = adapter_for_path(run.input)
    signal = reader.read(run.input)
    logger.debug(f"input adapter: {reader.get_adapter_info()}")
    graph, lattice = resolve_graph(run, signal)
    if run.trend is not TrendKind.KRONECKER and lattice is not None and lattice.size != graph.n_vertices:
        lattice = None

    try:
        request = EstimatorRequest(y=signal.values, graph=graph, lattice=lattice,
                                   lambda_f=run.lambda_f, lambda_ni=run.lambda_ni, lambda_t=run.lambda_t,
                                   trend=run.trend, engine=engine)
    except ValidationError as e:
        raise ConfigurationError(str(e)) from e

    if run.dump_operators:
        written = dump_operators(run.dump_operators, {
            "D": fusion_operator(graph),
            "Delta": trend_operator(graph, request.lattice, run.trend),
        })
        logger.info(f"operators written: {', '.join(str(p) for p in written)}")

    trace = CsvTraceSink(run.trace) if run.trace else None
    try:
        result = filter_signal(request, admm_config=admm, dual_config=dual, trace=trace)
    finally:
        if trace is not None:
            trace.close()

    writer = adapter_for_path(run.output)
    logger.debug(f"output adapter: {writer.get_adapter_info()}")
    writer.write(run.output, SignalData(values=result.beta, lattice=signal.lattice or lattice, meta=signal.meta))
    logger.info(f"solve: {ResultProcessor.format_result_info(result)}")
    print(ResultProcessor.format_summary(graph.n_vertices, graph.n_edges, result))

    if not result.converged:
        logger.warning("solver did not converge; output written anyway")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, app: AppConfig) -> int:
    settings = app.benchmark
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else settings.sizes
    estimators = [e.strip() for e in args.estimators.split(",")] if args.estimators else settings.estimators
    low = args.lambda_low if args.lambda_low is not None else settings.lambda_low
    high = args.lambda_high if args.lambda_high is not None else settings.lambda_high

    try:
        records = benchmark(sizes,
                            estimators=estimators,
                            seeds=args.seeds if args.seeds is not None else settings.seeds,
                            lambda_dist=(low, high),
                            signal=args.signal or settings.signal,
                            eps=args.eps,
                            max_workers=args.threads or app.threads,
                            base_seed=args.seed)
    except KeyError as e:
        raise ConfigurationError(str(e)) from e

    write_benchmark_csv(args.output, records)
    print(ResultProcessor.format_benchmark_summary(records))
    return EXIT_OK


def cmd_demo(args: argparse.Namespace, app: AppConfig) -> int:
    kwargs = {'d': args.size} if args.size else {}
    report = run_demo(args.scenario, Path(args.output), seed=args.seed, **kwargs)
    for row in report.table:
        print(",".join(str(v) for v in row))
    logger.info(f"demo '{args.scenario}' wrote {len(report.files)} files to {args.output}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    try:
        app = load_app_config(args.config)
    except GraphTrendError as e:
        logging.basicConfig(level=logging.INFO)
        logger.error(str(e))
        return EXIT_USAGE

    logging.basicConfig(level=logging.DEBUG if args.verbose else getattr(logging, app.logging_level, logging.INFO),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        if args.command == "filter":
            run = RunConfig(**{k: v for k, v in vars(args).items() if k in RunConfig.model_fields})
            return cmd_filter(run, app)
        if args.command == "bench":
            return cmd_bench(args, app)
        return cmd_demo(args, app)
    except ValidationError as e:
        logger.error(f"invalid options: {e}")
        return EXIT_USAGE
    except AdapterError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO
    except NumericalFailureError as e:
        logger.error(f"solver failure: {e}")
        return EXIT_NOT_CONVERGED
    except GraphTrendError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
