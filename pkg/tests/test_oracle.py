import numpy as np
import pytest

from idesimrank.errors import NumericalBreakdownError, ResourceError
from idesimrank.graph import EdgeSet, build_graph
from idesimrank.oracle import (condition_number_1, exact_F_matrix, fixed_point_simrank,
                               oracle_diagonal)

from conftest import random_graph


def brute_force_simrank(graph, iterations):
    """Pairwise recursion straight from the in-neighbour definition."""
    n, c = graph.n, graph.c
    A = graph.A.to_dense()
    ins = [np.flatnonzero(A[:, v]) for v in range(n)]
    S = np.eye(n)
    for _ in range(iterations):
        T = np.eye(n)
        for a in range(n):
            for b in range(n):
                if a == b or not len(ins[a]) or not len(ins[b]):
                    continue
                T[a, b] = c * S[np.ix_(ins[a], ins[b])].sum() / (len(ins[a]) * len(ins[b]))
        S = T
    return S


class TestFixedPoint:
    def test_two_cycle_is_identity(self, two_cycle):
        for it in (1, 5):
            np.testing.assert_array_equal(fixed_point_simrank(two_cycle, it), np.eye(2))

    def test_out_star(self, out_star):
        expected = np.eye(3)
        expected[1, 2] = expected[2, 1] = 0.6
        np.testing.assert_allclose(fixed_point_simrank(out_star, 2), expected, atol=1e-15)

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_pairwise_definition(self, seed):
        g = random_graph(9, 0.3, seed=seed)
        np.testing.assert_allclose(fixed_point_simrank(g, 30), brute_force_simrank(g, 30),
                                   atol=1e-13)

    def test_geometric_decay(self):
        g = random_graph(25, 0.2, seed=4)
        steps = [fixed_point_simrank(g, k) for k in range(1, 16)]
        diffs = [np.abs(b - a).max() for a, b in zip(steps, steps[1:])]
        for k, dk in enumerate(diffs, start=1):
            assert dk <= g.c ** k * 1.0 + 1e-15

    @pytest.mark.parametrize("c", [0.3, 0.6, 0.8])
    def test_fixed_point_properties(self, c):
        g = random_graph(30, 0.15, c=c, seed=7)
        S = fixed_point_simrank(g, 200)
        A = g.A.to_dense()
        P = c * A.T @ S @ A
        rhs = P - np.diag(np.diag(P)) + np.eye(g.n)
        assert np.abs(S - rhs).max() <= 1e-10
        assert np.abs(S - S.T).max() <= 1e-12
        assert S.min() >= -1e-12 and S.max() <= 1 + 1e-12
        d = oracle_diagonal(g, S)
        W = g.W.to_dense()
        assert np.abs(np.diag(W.T @ S @ W) + d - 1).max() <= 1e-9

    def test_cap(self):
        g = build_graph(EdgeSet.from_pairs([(0, 1)], n=3000))
        with pytest.raises(ResourceError) as info:
            fixed_point_simrank(g, 1)
        assert info.value.limit == 2048


class TestKronecker:
    def test_self_loop_scalar(self, self_loop):
        np.testing.assert_allclose(exact_F_matrix(self_loop), [[2.5]], rtol=1e-14)

    def test_two_cycle(self, two_cycle):
        # the sandwich swaps the two diagonal entries, so F = (I - cP)^-1
        c = 0.6
        expected = np.array([[1, c], [c, 1]]) / (1 - c * c)
        np.testing.assert_allclose(exact_F_matrix(two_cycle), expected, atol=1e-14)
        np.testing.assert_allclose(exact_F_matrix(two_cycle) @ np.ones(2), [2.5, 2.5])

    @pytest.mark.parametrize("seed", range(5))
    def test_nonnegative_inverse_m_matrix(self, seed):
        F = exact_F_matrix(random_graph(10, 0.3, seed=seed))
        assert F.min() >= -1e-12

    def test_matches_dense_stein_solve(self):
        # independent route: solve S = W^T S W + D with scipy's discrete Lyapunov solver
        from scipy.linalg import solve_discrete_lyapunov
        g = random_graph(7, 0.35, seed=11)
        W = g.W.to_dense()
        F = exact_F_matrix(g)
        x = np.random.default_rng(0).random(7)
        S = solve_discrete_lyapunov(W.T, np.diag(x))
        np.testing.assert_allclose(F @ x, np.diag(S), rtol=1e-12)

    def test_cap(self):
        with pytest.raises(ResourceError):
            exact_F_matrix(build_graph(EdgeSet.from_pairs([(0, 1)], n=65)))


class TestConditionNumber:
    def test_identity(self):
        assert condition_number_1(np.eye(4)) == 1.0

    def test_scaled_identity(self):
        assert condition_number_1(2.5 * np.eye(3)) == pytest.approx(1.0, abs=1e-14)

    def test_two_cycle(self, two_cycle):
        # |F|_1 = 1/(1-c), |F^-1|_1 = |I - cP|_1 = 1+c
        assert condition_number_1(exact_F_matrix(two_cycle)) == pytest.approx(1.6 / 0.4)

    def test_known_value(self):
        F = np.array([[2.0, 1.0], [0.0, 1.0]])
        # |F|_1 = 2, F^-1 = [[.5, -.5], [0, 1]], |F^-1|_1 = 1.5
        assert condition_number_1(F) == pytest.approx(3.0)

    def test_singular(self):
        with pytest.raises(NumericalBreakdownError):
            condition_number_1(np.array([[1.0, 2.0], [2.0, 4.0]]))

    @pytest.mark.parametrize("seed", range(8))
    def test_within_bound(self, seed):
        g = random_graph(int(2 + seed), 0.3, seed=seed)
        assert condition_number_1(exact_F_matrix(g)) <= 20.0
