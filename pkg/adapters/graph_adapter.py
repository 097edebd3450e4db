# -*- coding: utf-8 -*-
"""
Graph sources

A graph comes from a source string: 'chain:n', 'lattice:n1xn2' or the path of
an edge-list file. Edge-list files hold 'n m' on the first line followed by m
lines 's t' with 0-based vertex indices; '#' starts a comment.
"""

import logging
from pathlib import Path
from typing import Optional, Tuple

from adapters.base_adapter import ParseError, PathLike
from core.errors import ConstructionError
from core.graph_model import DiGraph, LatticeSpec, chain_graph, graph_from_edges, lattice_graph


logger = logging.getLogger(__name__)


def parse_graph_source(source: str) -> Tuple[DiGraph, Optional[LatticeSpec]]:
    """
    Resolve a graph source

    Returns:
        (graph, lattice); chains come back with the lattice (n, 1), edge lists with None
    """
    kind, _, arg = source.partition(":")
    try:
        if kind == "chain" and arg:
            n = int(arg)
            return chain_graph(n), LatticeSpec(n, 1)
        if kind == "lattice" and arg:
            spec = LatticeSpec.parse(arg)
            return lattice_graph(spec), spec
    except (ValueError, ConstructionError) as e:
        raise ParseError(f"invalid graph source '{source}': {e}") from e
    return read_edge_list(source), None


def read_edge_list(path: PathLike) -> DiGraph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read edge list {path}: {e}") from e

    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"{path}:{lineno}: expected two integers")
        try:
            rows.append((int(parts[0]), int(parts[1])))
        except ValueError as e:
            raise ParseError(f"{path}:{lineno}: expected two integers") from e

    if not rows:
        raise ParseError(f"{path}: empty edge list")
    (n, m), edges = rows[0], rows[1:]
    if len(edges) != m:
        raise ParseError(f"{path}: header announces {m} edges, found {len(edges)}")
    try:
        graph = graph_from_edges(n, edges)
    except ConstructionError as e:
        raise ParseError(f"{path}: {e}") from e
    logger.debug(f"read graph with {n} vertices and {m} edges from {path}")
    return graph


def write_edge_list(path: PathLike, graph: DiGraph) -> None:
    lines = [f"{graph.n_vertices} {graph.n_edges}"]
    lines.extend(f"{s} {t}" for s, t in graph.edges)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
