import numpy as np
import pytest

from idesimrank.errors import InputError, ResourceError
from idesimrank.oracle import fixed_point_simrank
from idesimrank.queries import (full_sparse_simrank, lookup_pair, lookup_source,
                                single_pair, single_source)
from idesimrank.solver import SolverConfig, solve_diagonal

from conftest import random_graph, seeded_graphs

STAR_D = [1.0, 0.4, 0.4]


def solved(g, eps=1e-10):
    return solve_diagonal(g, SolverConfig(tau=0.0, eps=eps)).d


class TestSingleSource:
    def test_two_cycle(self, two_cycle):
        res = single_source(two_cycle, [0.4, 0.4], 0, 50, 0.0)
        np.testing.assert_allclose(res.scores, [1.0, 0.0], atol=1e-15)
        assert res.kind == "single_source" and res.K_used == 50

    def test_out_star(self, out_star):
        res = single_source(out_star, STAR_D, 1, 50, 0.0)
        np.testing.assert_allclose(res.scores, [0.0, 1.0, 0.6], atol=1e-12)
        np.testing.assert_allclose(res.scores, fixed_point_simrank(out_star, 50)[:, 1],
                                   atol=1e-12)

    def test_query_vertex_pinned(self):
        g = random_graph(20, 0.2, seed=1)
        d = solved(g)
        for a in range(g.n):
            assert single_source(g, d, a, 5, 0.0).scores[a] == 1.0

    def test_out_of_range(self, two_cycle):
        with pytest.raises(InputError):
            single_source(two_cycle, [0.4, 0.4], 2)
        with pytest.raises(InputError):
            single_source(two_cycle, [0.4, 0.4, 0.4], 0)

    @pytest.mark.parametrize("seed", range(4))
    def test_against_oracle(self, seed):
        g = random_graph(35, 0.1, seed=seed)
        S = fixed_point_simrank(g, 200)
        d = solved(g)
        for a in range(0, g.n, 3):
            res = single_source(g, d, a, 50, 0.0)
            assert np.abs(res.scores - S[:, a]).max() <= g.c ** 50 + 1e-8

    def test_dangling_source_is_zero_elsewhere(self):
        g = random_graph(25, 0.1, seed=3)
        assert len(g.dangling) > 0
        d = solved(g)
        S = fixed_point_simrank(g, 200)
        for a in g.dangling:
            s = single_source(g, d, int(a), 50, 0.0).scores
            others = np.delete(s, a)
            np.testing.assert_allclose(others, 0.0, atol=1e-12)
            np.testing.assert_allclose(s, S[:, a], atol=1e-12)

    def test_thresholded_queries(self):
        g = random_graph(40, 0.1, seed=9)
        d = solved(g)
        exact = single_source(g, d, 4, 50, 0.0).scores
        for tau in (1e-3, 1e-4):
            res = single_source(g, d, 4, 50, tau)
            assert np.abs(res.scores - exact).max() <= res.error_bound


class TestSinglePair:
    def test_same_vertex(self, out_star):
        assert single_pair(out_star, STAR_D, 2, 2).scores == 1.0

    def test_two_cycle(self, two_cycle):
        assert single_pair(two_cycle, [0.4, 0.4], 0, 1).scores == pytest.approx(0.0, abs=1e-15)

    def test_out_star(self, out_star):
        assert single_pair(out_star, STAR_D, 1, 2, 50, 0.0).scores == pytest.approx(0.6, abs=1e-12)

    @pytest.mark.parametrize("g", seeded_graphs(4, 5, 30, seed=5), ids=lambda g: f"n{g.n}")
    def test_consistency_and_symmetry(self, g):
        d = solved(g)
        rng = np.random.default_rng(g.n)
        sources = {}
        for a, b in rng.integers(0, g.n, (40, 2)):
            a, b = int(a), int(b)
            if a not in sources:
                sources[a] = single_source(g, d, a, 50, 0.0).scores
            sab = single_pair(g, d, a, b, 50, 0.0).scores
            assert abs(sab - sources[a][b]) <= 1e-12
            assert abs(sab - single_pair(g, d, b, a, 50, 0.0).scores) <= 1e-12
            assert -1e-9 <= sab <= 1 + 1e-9

    def test_truncation_decay(self):
        g = random_graph(30, 0.2, seed=12)
        d = solved(g)
        for K in (5, 10, 20):
            a = single_source(g, d, 0, K, 0.0).scores
            b = single_source(g, d, 0, 2 * K, 0.0).scores
            assert np.abs(a - b).max() <= g.c ** K / (1 - g.c)


class TestFullMatrix:
    def test_two_cycle(self, two_cycle):
        res = full_sparse_simrank(two_cycle, [0.4, 0.4], 50, 0.0)
        np.testing.assert_allclose(res.scores.to_dense(), np.eye(2), atol=1e-15)

    def test_out_star(self, out_star):
        S = full_sparse_simrank(out_star, STAR_D, 50, 0.0).scores.to_dense()
        expected = np.eye(3)
        expected[1, 2] = expected[2, 1] = 0.6
        np.testing.assert_allclose(S, expected, atol=1e-12)

    def test_random_against_oracle(self):
        g = random_graph(30, 0.15, seed=21)
        res = full_sparse_simrank(g, solved(g), 60, 0.0)
        S = fixed_point_simrank(g, 200)
        assert np.abs(res.scores.to_dense() - S).max() <= g.c ** 60 + 1e-9

    def test_thresholded_is_sparser_and_symmetric(self):
        g = random_graph(40, 0.1, seed=22)
        d = solved(g)
        full = full_sparse_simrank(g, d, 50, 0.0).scores
        cut = full_sparse_simrank(g, d, 50, 1e-3).scores
        assert cut.nnz() <= full.nnz()
        dense = cut.to_dense()
        assert np.abs(dense - dense.T).max() <= 1e-12
        assert np.all(np.diag(dense) == 1.0)

    def test_lookup(self, out_star):
        res = full_sparse_simrank(out_star, STAR_D, 50, 0.0)
        assert lookup_pair(res, 1, 2) == pytest.approx(0.6)
        assert lookup_pair(res, 0, 2) == 0.0
        np.testing.assert_allclose(lookup_source(res, 1), [0, 1, 0.6])
        with pytest.raises(InputError):
            lookup_pair(single_source(out_star, STAR_D, 1), 0, 1)

    def test_nnz_cap(self):
        g = random_graph(30, 0.3, seed=2)
        with pytest.raises(ResourceError) as info:
            full_sparse_simrank(g, solved(g), 50, 0.0, nnz_cap=100)
        assert info.value.limit == 100 and info.value.value > 100
