# -*- coding: utf-8 -*-
"""
Sparse core tests: construction, products, SPD operators, CG and factorization
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from core.errors import ConstructionError, DimensionMismatchError, NotPositiveDefiniteError
from core.graph_model import LatticeSpec, chain_graph, incidence_matrix, lattice_graph, random_dag
from core.linalg import (
    SpdOperator,
    WorkCounter,
    build_sparse,
    conjugate_gradient,
    factorize,
    identity,
    kron,
    matvec,
    matvec_transpose,
    solve_factorized,
    stack_operators,
)
from core.linalg.sparse_matrix import block_offsets, empty, format_triplets, parse_triplets
from core.penalties import TrendKind, first_difference_matrix, second_difference_matrix, trend_operator


class TestBuildSparse:
    """Triplet construction"""

    def test_identity_from_triplets(self):
        A = build_sparse(2, 2, [(0, 0, 1.0), (1, 1, 1.0)])
        assert A == identity(2)

    def test_second_difference_row(self):
        A = build_sparse(1, 3, [(0, 0, 1), (0, 1, -2), (0, 2, 1)])
        assert_array_equal(A.to_dense(), [[1, -2, 1]])

    def test_duplicates_are_summed(self):
        A = build_sparse(2, 2, [(0, 0, 1.0), (0, 0, 2.0)])
        assert A.nnz == 1
        assert A.triplets() == [(0, 0, 3.0)]

    def test_structural_zeros_dropped(self):
        A = build_sparse(2, 2, [(0, 1, 1.0), (0, 1, -1.0), (1, 0, 0.0)])
        assert A.nnz == 0

    def test_out_of_range_index(self):
        with pytest.raises(ConstructionError):
            build_sparse(2, 2, [(2, 0, 1.0)])

    def test_non_finite_value(self):
        with pytest.raises(ConstructionError):
            build_sparse(2, 2, [(0, 0, np.inf)])


class TestProducts:
    """matvec, matvec_transpose, kron, stacking"""

    def test_identity_matvec(self):
        assert_array_equal(matvec(identity(2), np.array([3.0, -1.0])), [3.0, -1.0])

    def test_second_difference_matvec(self):
        assert_array_equal(matvec(second_difference_matrix(3), np.array([0.0, 1.0, 0.0])), [-2.0])

    def test_chain_incidence_matvec(self):
        D = incidence_matrix(chain_graph(5))
        assert_array_equal(matvec(D, np.arange(1.0, 6.0)), [-1.0, -1.0, -1.0, -1.0])

    def test_transpose_of_single_row(self):
        assert_array_equal(matvec_transpose(second_difference_matrix(3), np.array([1.0])), [1.0, -2.0, 1.0])

    def test_incidence_rows_sum_to_zero(self, rng):
        D = incidence_matrix(chain_graph(7))
        assert_array_equal(matvec(D, np.ones(7)), np.zeros(6))
        assert D.to_dense().sum() == 0

    def test_transpose_matches_dense(self, rng):
        A = build_sparse(4, 3, [(0, 0, 1.5), (1, 2, -2.0), (3, 1, 0.25), (2, 0, 4.0)])
        x = rng.standard_normal(4)
        assert_allclose(matvec_transpose(A, x), A.to_dense().T @ x, rtol=0, atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            matvec(identity(3), np.ones(2))
        with pytest.raises(DimensionMismatchError):
            matvec_transpose(identity(3), np.ones(4))

    def test_kron_matches_numpy(self):
        A = first_difference_matrix(3)
        B = second_difference_matrix(4)
        assert_array_equal(kron(A, B).to_dense(), np.kron(A.to_dense(), B.to_dense()))

    def test_stack_preserves_offsets(self):
        A, B = first_difference_matrix(5), second_difference_matrix(5)
        S = stack_operators([A, B])
        assert S.shape == (7, 5)
        assert block_offsets([A, B]) == [0, 4, 7]
        assert_array_equal(S.to_dense()[4:], B.to_dense())

    def test_stack_mismatched_columns(self):
        with pytest.raises(DimensionMismatchError):
            stack_operators([identity(2), identity(3)])

    def test_triplet_dump_round_trip(self):
        A = build_sparse(3, 4, [(0, 0, 0.1), (2, 3, -1.0 / 3.0), (1, 1, 2.0)])
        assert parse_triplets(format_triplets(A), 3, 4) == A

    def test_empty_operator(self):
        E = empty(0, 4)
        assert E.shape == (0, 4)
        assert_array_equal(matvec_transpose(E, np.zeros(0)), np.zeros(4))


class TestSpdOperator:
    """M = w0 I + sum w_i A_i^T A_i"""

    def test_apply_matches_assembled(self, rng):
        D = first_difference_matrix(6)
        L = second_difference_matrix(6)
        M = SpdOperator(1.0, [(2.0, D), (0.5, L)])
        x = rng.standard_normal(6)
        assert_allclose(M.apply(x), M.to_sparse() @ x, atol=1e-12)

    def test_work_counter_linear_in_edges(self):
        touched = []
        for n in (1_000, 10_000, 100_000):
            D = incidence_matrix(chain_graph(n))
            counter = WorkCounter()
            SpdOperator(1.0, [(1.0, D)]).apply(np.ones(n), counter)
            touched.append(counter.snapshot()[0] / (n - 1))
        # nonzeros per edge stay constant: 2 * nnz(D) + n over n - 1 edges
        assert max(touched) - min(touched) < 0.01

    def test_negative_weight(self):
        with pytest.raises(ConstructionError):
            SpdOperator(-1.0, [])


class TestConjugateGradient:
    """CG against hand solutions and the factorization"""

    def test_identity_system(self):
        result = conjugate_gradient(SpdOperator.for_size(3, 1.0, []), np.array([1.0, 2.0, 3.0]))
        assert result.converged
        assert result.iterations <= 1
        assert_allclose(result.x, [1.0, 2.0, 3.0])

    def test_two_by_two(self):
        M = SpdOperator(1.0, [(1.0, first_difference_matrix(2))])
        result = conjugate_gradient(M, np.array([1.0, 0.0]))
        assert_allclose(result.x, [2.0 / 3.0, 1.0 / 3.0], atol=1e-12)

    def test_zero_right_hand_side(self):
        M = SpdOperator(1.0, [(1.0, first_difference_matrix(4))])
        result = conjugate_gradient(M, np.zeros(4))
        assert result.converged
        assert_array_equal(result.x, np.zeros(4))

    def test_matches_factorization(self, rng):
        n = 50
        M = SpdOperator(1.0, [(1.3, incidence_matrix(chain_graph(n))), (0.7, second_difference_matrix(n))])
        b = rng.standard_normal(n)
        cg = conjugate_gradient(M, b, tol=1e-12)
        direct = solve_factorized(factorize(M), b)
        assert_allclose(cg.x, direct, atol=1e-8)

    def test_iteration_cap(self, rng):
        n = 200
        M = SpdOperator(1.0, [(100.0, second_difference_matrix(n))])
        result = conjugate_gradient(M, rng.standard_normal(n), tol=1e-14, max_iter=3)
        assert not result.converged
        assert result.iterations == 3


class TestFactorization:
    """LDL^T-type factorization of the ADMM system"""

    def test_two_by_two(self):
        M = SpdOperator(1.0, [(1.0, first_difference_matrix(2))])
        assert_allclose(solve_factorized(factorize(M), np.array([1.0, 0.0])), [2.0 / 3.0, 1.0 / 3.0], atol=1e-14)

    def test_factor_once_many_solves(self, rng):
        n = 100
        M = SpdOperator(1.0, [(1.0, incidence_matrix(chain_graph(n))), (1.0, second_difference_matrix(n))])
        F = factorize(M)
        A = M.to_sparse()
        for _ in range(50):
            b = rng.standard_normal(n)
            x = solve_factorized(F, b)
            assert np.linalg.norm(A @ x - b) <= 1e-10

    def test_singular_system_rejected(self):
        # D^T D alone has the constants in its null space
        M = SpdOperator(0.0, [(1.0, first_difference_matrix(4))])
        with pytest.raises(NotPositiveDefiniteError):
            factorize(M)


def random_sparse(rng, nrows, ncols, density=0.2, integer=False):
    """Random triplet matrix; integer entries keep products exact"""
    count = max(1, int(density * nrows * ncols))
    rows = rng.integers(0, nrows, size=count)
    cols = rng.integers(0, ncols, size=count)
    values = rng.integers(-3, 4, size=count).astype(float) if integer else rng.standard_normal(count)
    return build_sparse(nrows, ncols, list(zip(rows.tolist(), cols.tolist(), values.tolist())))


def admm_system(rng, n):
    """I + rho1 D^T D + rho2 Delta^T Delta on a chain, lattice or random DAG with n vertices"""
    kind = rng.integers(0, 3)
    if kind == 0:
        graph, lattice = chain_graph(n), LatticeSpec(n, 1)
    elif kind == 1:
        side = max(2, int(np.sqrt(n)))
        lattice = LatticeSpec(side, max(2, n // side))
        graph = lattice_graph(lattice)
    else:
        graph, lattice = random_dag(n, min(1.0, 3.0 / n), rng), None
    trend = TrendKind.KRONECKER if lattice is not None and rng.random() < 0.5 else TrendKind.GENERAL
    rho1, rho2 = (float(v) for v in rng.uniform(0.1, 5.0, size=2))
    return SpdOperator.for_size(graph.n_vertices, 1.0, [(rho1, incidence_matrix(graph)),
                                                        (rho2, trend_operator(graph, lattice, trend))])


class TestAlgebraicIdentities:
    """Adjoint consistency, kron associativity and the two beta-update backends"""

    @pytest.mark.parametrize("seed", range(20))
    def test_adjoint_consistency(self, seed):
        rng = np.random.default_rng(seed)
        m, n = (int(v) for v in rng.integers(1, 51, size=2))
        A = random_sparse(rng, m, n)
        x, y = rng.standard_normal(n), rng.standard_normal(m)
        lhs = float(matvec(A, x) @ y)
        rhs = float(x @ matvec_transpose(A, y))
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))

    @pytest.mark.parametrize("seed", range(5))
    def test_kron_is_associative(self, seed):
        rng = np.random.default_rng(100 + seed)
        A, B, C = (random_sparse(rng, *(int(v) for v in rng.integers(1, 5, size=2)), density=0.5, integer=True)
                   for _ in range(3))
        assert kron(kron(A, B), C) == kron(A, kron(B, C))

    @pytest.mark.parametrize("seed", range(100))
    def test_cg_matches_factorization(self, seed):
        rng = np.random.default_rng(200 + seed)
        n = int(rng.integers(2, 201))
        M = admm_system(rng, n)
        b = rng.standard_normal(M.n)
        cg = conjugate_gradient(M, b, tol=1e-12)
        direct = solve_factorized(factorize(M), b)
        assert_allclose(cg.x, direct, atol=1e-8)
