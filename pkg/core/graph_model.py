# -*- coding: utf-8 -*-
"""
Graph Model

Directed graphs that carry the partial order of the signal's index set, the
chain and lattice constructors, and the incidence / Laplacian operators built
from them.

Edge (i, j) reads "beta_i should not exceed beta_j": the incidence row is
+1 at the source and -1 at the target, so D beta = beta_source - beta_target.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Tuple

import networkx as nx
import numpy as np

from core.errors import ConstructionError
from core.linalg.sparse_matrix import SparseMatrix, from_arrays


logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


@dataclass(frozen=True)
class DiGraph:
    """Vertices 0..n_vertices-1 and an ordered edge list"""
    n_vertices: int
    edges: Tuple[Edge, ...] = ()
    partial_order: bool = False
    _sources: np.ndarray = field(init=False, repr=False, compare=False)
    _targets: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ConstructionError(f"a graph needs at least one vertex, got {self.n_vertices}")

        edges = tuple((int(s), int(t)) for s, t in self.edges)
        object.__setattr__(self, "edges", edges)

        sources = np.fromiter((s for s, _ in edges), dtype=np.int64, count=len(edges))
        targets = np.fromiter((t for _, t in edges), dtype=np.int64, count=len(edges))
        if edges:
            if min(sources.min(), targets.min()) < 0 or max(sources.max(), targets.max()) >= self.n_vertices:
                raise ConstructionError(f"edge endpoint outside [0, {self.n_vertices})")
            if np.any(sources == targets):
                raise ConstructionError("self-loops are not allowed")
            if len(set(edges)) != len(edges):
                raise ConstructionError("duplicate edges are not allowed")
        object.__setattr__(self, "_sources", sources)
        object.__setattr__(self, "_targets", targets)

        if self.partial_order and not validate_dag(self):
            raise ConstructionError("graph flagged as a partial order contains a directed cycle")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def sources(self) -> np.ndarray:
        return self._sources

    @property
    def targets(self) -> np.ndarray:
        return self._targets

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.n_vertices))
        graph.add_edges_from(self.edges)
        return graph

    def is_connected(self) -> bool:
        """Weak connectivity, which is what the Laplacian null space depends on"""
        return nx.is_weakly_connected(self.to_networkx())


class LatticeSpec:
    """
    Shape of a rectangular lattice

    LatticeSpec(n1, n2) is the two-dimensional case; more sides may follow for
    k-dimensional grids. Vertex numbering runs over the first dimension fastest
    (column-major for 2-D), so (l, k) maps to k * n1 + l with 0-based indices.
    """

    __slots__ = ("dims",)

    def __init__(self, *dims: int):
        if len(dims) == 1 and isinstance(dims[0], (list, tuple)):
            dims = tuple(dims[0])
        if not dims:
            raise ConstructionError("a lattice needs at least one dimension")
        if len(dims) == 1:
            dims = (dims[0], 1)
        if any(int(d) < 1 for d in dims):
            raise ConstructionError(f"lattice sides must be >= 1, got {dims}")
        self.dims: Tuple[int, ...] = tuple(int(d) for d in dims)

    @property
    def n1(self) -> int:
        return self.dims[0]

    @property
    def n2(self) -> int:
        return self.dims[1]

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    def vertex_index(self, *coords: int) -> int:
        return int(np.ravel_multi_index(coords, self.dims, order="F"))

    def coordinates(self) -> np.ndarray:
        """(size, k) array of 0-based grid coordinates in vertex order"""
        grids = np.unravel_index(np.arange(self.size), self.dims, order="F")
        return np.stack(grids, axis=1)

    @classmethod
    def parse(cls, text: str) -> "LatticeSpec":
        """Parse '3x4' (or '3x4x5')"""
        try:
            return cls(*(int(part) for part in text.lower().split("x")))
        except ValueError as e:
            raise ConstructionError(f"invalid lattice '{text}'") from e

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LatticeSpec) and self.dims == other.dims

    def __hash__(self) -> int:
        return hash(self.dims)

    def __repr__(self) -> str:
        return f"LatticeSpec({'x'.join(map(str, self.dims))})"


def chain_graph(n: int) -> DiGraph:
    """Edges (i, i+1) for i = 0..n-2"""
    if n < 1:
        raise ConstructionError(f"chain needs n >= 1, got {n}")
    return DiGraph(n, tuple((i, i + 1) for i in range(n - 1)), partial_order=True)


def lattice_graph(spec: LatticeSpec) -> DiGraph:
    """
    Bimonotone lattice order

    Edges along the first dimension come first (sources in vertex order), then
    edges along the second dimension, and so on.
    """
    index = np.arange(spec.size).reshape(spec.dims, order="F")
    edges: List[Edge] = []
    for axis, side in enumerate(spec.dims):
        if side < 2:
            continue
        src = np.take(index, np.arange(side - 1), axis=axis).ravel(order="F")
        tgt = np.take(index, np.arange(1, side), axis=axis).ravel(order="F")
        order = np.argsort(src, kind="stable")
        edges.extend(zip(src[order].tolist(), tgt[order].tolist()))
    return DiGraph(spec.size, tuple(edges), partial_order=True)


def graph_from_edges(n_vertices: int, edges: Iterable[Edge], partial_order: bool = False) -> DiGraph:
    return DiGraph(n_vertices, tuple(edges), partial_order=partial_order)


def incidence_matrix(g: DiGraph) -> SparseMatrix:
    """m x n oriented incidence matrix, row i = edge i"""
    m = g.n_edges
    rows = np.concatenate([np.arange(m), np.arange(m)])
    cols = np.concatenate([g.sources, g.targets])
    vals = np.concatenate([np.ones(m), -np.ones(m)])
    return from_arrays(m, g.n_vertices, rows, cols, vals)


def laplacian(g: DiGraph) -> SparseMatrix:
    """L = D^T D: vertex degrees on the diagonal, -1 per adjacent pair"""
    D = incidence_matrix(g)
    return D.T @ D


def validate_dag(g: DiGraph) -> bool:
    """True iff the graph has no directed cycle"""
    return nx.is_directed_acyclic_graph(g.to_networkx())


def random_dag(n: int, edge_probability: float, rng: np.random.Generator) -> DiGraph:
    """Random DAG: edges only go from a lower to a higher index of a random topological order"""
    order = rng.permutation(n)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_probability:
                edges.append((int(order[i]), int(order[j])))
    return DiGraph(n, tuple(edges), partial_order=True)
