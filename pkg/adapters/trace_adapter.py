# -*- coding: utf-8 -*-
"""
Trace, benchmark and operator dump files
"""

import csv
import logging
from pathlib import Path
from typing import Dict, Iterable, List

from adapters.base_adapter import AdapterError, ParseError, PathLike
from core.linalg.sparse_matrix import SparseMatrix, format_triplets, parse_triplets
from core.solvers.base import TraceSink


logger = logging.getLogger(__name__)

TRACE_HEADER = ["iter", "r_pri", "r_dual", "objective"]
BENCHMARK_HEADER = ["estimator", "engine", "d", "seed", "lambda_f", "lambda_t", "wall_time_s", "iterations"]


class CsvTraceSink(TraceSink):
    """Per-iteration solver trace as CSV: iter,r_pri,r_dual,objective"""

    def __init__(self, path: PathLike):
        try:
            self._handle = open(path, "w", newline="", encoding="utf-8")
        except OSError as e:
            raise AdapterError(f"cannot open trace file {path}: {e}") from e
        self._writer = csv.writer(self._handle)
        self._writer.writerow(TRACE_HEADER)
        self.rows = 0

    def record(self, iteration: int, r_pri: float, r_dual: float, objective: float) -> None:
        self._writer.writerow([iteration, f"{r_pri:.17g}", f"{r_dual:.17g}", f"{objective:.17g}"])
        self.rows += 1

    def close(self) -> None:
        if not self._handle.closed:
            self._handle.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_benchmark_csv(path: PathLike, records: Iterable) -> int:
    """One row per benchmark record; returns the row count"""
    count = 0
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(BENCHMARK_HEADER)
        for r in records:
            writer.writerow([r.estimator, r.engine, r.d, r.seed, f"{r.lambda_f:.17g}", f"{r.lambda_t:.17g}",
                             f"{r.wall_time_s:.17g}", r.iterations])
            count += 1
    logger.info(f"wrote {count} benchmark rows to {path}")
    return count


def read_benchmark_csv(path: PathLike) -> List[Dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != BENCHMARK_HEADER:
            raise ParseError(f"{path}: unexpected benchmark header {reader.fieldnames}")
        return list(reader)


def dump_operators(directory: PathLike, operators: Dict[str, SparseMatrix]) -> List[Path]:
    """Write each operator as '<name>.txt' triplets (row col value)"""
    out_dir = Path(directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, matrix in operators.items():
        target = out_dir / f"{name}.txt"
        header = f"# {matrix.nrows} {matrix.ncols}\n"
        target.write_text(header + format_triplets(matrix), encoding="utf-8")
        written.append(target)
    return written


def load_operator(path: PathLike) -> SparseMatrix:
    """Read a dump written by dump_operators, shape taken from the header"""
    text = Path(path).read_text(encoding="utf-8")
    first = text.splitlines()[0] if text else ""
    if not first.startswith("#"):
        return parse_triplets(text)
    try:
        nrows, ncols = (int(v) for v in first[1:].split())
    except ValueError as e:
        raise ParseError(f"{path}: malformed operator header") from e
    return parse_triplets(text, nrows, ncols)
