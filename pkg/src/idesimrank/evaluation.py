"""Ranking accuracy against the dense oracle and size-scaling benchmarks."""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InputError
from .graph import EdgeSet, SimGraph, build_graph
from .oracle import FIXED_POINT_CAP, fixed_point_simrank
from .queries import single_source
from .solver import SolverConfig, solve_diagonal


def _ranking(scores):
    # descending score, ties by ascending index
    idx = np.arange(scores.size)
    return np.lexsort((idx, -scores))


def ndcg_at_n(true_scores, approx_scores) -> float:
    """NDCG over all items with gains ``2**true - 1`` and ideal-DCG normalization.

    Items are ranked by ``approx_scores``; returns 1.0 when every gain is zero.
    """
    true_scores = np.asarray(true_scores, dtype=np.float64)
    approx_scores = np.asarray(approx_scores, dtype=np.float64)
    if true_scores.shape != approx_scores.shape or true_scores.ndim != 1:
        raise InputError(f"score vectors differ in shape: {true_scores.shape} "
                         f"vs {approx_scores.shape}")
    gains = np.exp2(true_scores) - 1.0
    discounts = 1.0 / np.log2(np.arange(2, true_scores.size + 2))
    ideal = float(np.sum(gains[_ranking(true_scores)] * discounts))
    if ideal == 0.0:
        return 1.0
    dcg = float(np.sum(gains[_ranking(approx_scores)] * discounts))
    return dcg / ideal


@dataclass
class NdcgReport:
    graph_name: str
    n: int
    q: int
    mean_one_minus_ndcg: float
    per_query: np.ndarray
    params: dict
    queries: np.ndarray = field(default=None)
    solver_iterations: int = 0
    solver_residual: float = 0.0
    residual_history: np.ndarray = field(default=None, repr=False)
    cycle_starts: list = field(default_factory=list, repr=False)

    def summary(self) -> dict:
        return {
            "graph": self.graph_name, "n": self.n, "q": self.q,
            "mean_one_minus_ndcg": self.mean_one_minus_ndcg,
            "max_one_minus_ndcg": float(np.max(1.0 - self.per_query)) if self.q else 0.0,
            "solver_iterations": self.solver_iterations,
            "solver_residual": self.solver_residual,
            **self.params,
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["query", "ndcg", "one_minus_ndcg"])
            for a, v in zip(self.queries.tolist(), self.per_query.tolist()):
                w.writerow([a, repr(v), repr(1.0 - v)])

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def run_ndcg_experiment(graph: SimGraph, q: int = 100, cfg: SolverConfig | None = None,
                        seed=0, graph_name: str = "graph", oracle_iterations: int = 200,
                        oracle_cap: int = FIXED_POINT_CAP) -> NdcgReport:
    """Mean ``1 - NDCG@n`` of single-source queries against the fixed-point oracle.

    Query vertices are drawn without replacement (all of them when ``q >= n``);
    the query vertex itself is left out of both rankings.
    """
    cfg = cfg or SolverConfig(tau=1e-3)
    S = fixed_point_simrank(graph, oracle_iterations, cap=oracle_cap)
    est = solve_diagonal(graph, cfg)
    rng = np.random.default_rng(seed)
    n = graph.n
    if q >= n:
        queries = np.arange(n)
    else:
        queries = np.sort(rng.choice(n, size=q, replace=False))
    per_query = np.empty(queries.size)
    keep = np.ones(n, dtype=bool)
    for t, a in enumerate(queries):
        approx = single_source(graph, est.d, int(a), cfg.K, 0.0).scores
        keep[a] = False
        exact = np.clip(S[:, a][keep], 0.0, 1.0)
        per_query[t] = ndcg_at_n(exact, approx[keep])
        keep[a] = True
    return NdcgReport(
        graph_name=graph_name, n=n, q=int(queries.size),
        mean_one_minus_ndcg=float(np.mean(1.0 - per_query)) if queries.size else 0.0,
        per_query=per_query, params={"c": graph.c, "K": cfg.K, "tau": cfg.tau, "eps": cfg.eps},
        queries=queries, solver_iterations=est.iterations,
        solver_residual=est.residual_norm, residual_history=est.residual_history,
        cycle_starts=est.cycle_starts)


def random_in_regular_graph(n: int, nnz_per_col: int, c: float = 0.6, seed=0) -> SimGraph:
    """Every vertex gets exactly ``nnz_per_col`` distinct in-neighbours, no self-loops."""
    if nnz_per_col >= n:
        raise InputError(f"nnz_per_col={nnz_per_col} must be < n={n}")
    rng = np.random.default_rng(seed)
    # sample from the n-1 other vertices by shifting past j
    offsets = np.stack([rng.choice(n - 1, size=nnz_per_col, replace=False)
                        for _ in range(n)])
    dst = np.repeat(np.arange(n), nnz_per_col)
    src = (offsets.ravel() + dst + 1) % n
    return build_graph(EdgeSet.from_pairs(np.column_stack([src, dst]), n=n), c=c)


@dataclass
class ScalingRow:
    n: int
    nnz_per_column: int
    solve_time_seconds: float
    peak_nnz_proxy: int
    gmres_iterations: int


@dataclass
class ScalingReport:
    rows: list

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows], dtype=np.float64)

    def loglog_slope(self, name) -> float:
        """Least-squares slope of ``log(name)`` against ``log(n)``."""
        x, y = np.log(self.column("n")), np.log(self.column(name))
        return float(np.polyfit(x, y, 1)[0])

    def write_csv(self, path, include_time=True) -> None:
        fields = ["n", "nnz_per_column", "solve_time_seconds", "peak_nnz_proxy",
                  "gmres_iterations"]
        if not include_time:
            fields.remove("solve_time_seconds")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(fields)
            for r in self.rows:
                d = asdict(r)
                w.writerow([repr(d[f]) if isinstance(d[f], float) else d[f] for f in fields])

    def write_json(self, path) -> None:
        summary = {
            "rows": [asdict(r) for r in self.rows],
            "time_slope": self.loglog_slope("solve_time_seconds") if len(self.rows) > 1 else None,
            "memory_slope": self.loglog_slope("peak_nnz_proxy") if len(self.rows) > 1 else None,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _warm_up():
    g = random_in_regular_graph(8, 2, seed=0)
    solve_diagonal(g, SolverConfig(K=2, tau=0.0, eps=1e-2, restart=2))


def run_scaling_experiment(sizes, nnz_per_col: int = 5, cfg: SolverConfig | None = None,
                           seed=0, c: float = 0.6, log=None) -> ScalingReport:
    """Time ``solve_diagonal`` on random graphs with fixed in-degree, one row per size.

    The compiled kernels are warmed up first so compilation is not timed.
    """
    sizes = [int(s) for s in sizes]
    if not sizes or sizes != sorted(sizes):
        raise InputError("sizes must be a nonempty ascending list")
    cfg = cfg or SolverConfig(tau=1e-4)
    if cfg.c is not None:
        c = cfg.c
    _warm_up()
    rows = []
    for k, n in enumerate(sizes):
        g = random_in_regular_graph(n, nnz_per_col, c=c, seed=(seed, k))
        t0 = time.perf_counter()
        est = solve_diagonal(g, cfg)
        elapsed = time.perf_counter() - t0
        rows.append(ScalingRow(n, nnz_per_col, elapsed, est.peak_nnz, est.iterations))
        if log:
            log(f"n={n}: {elapsed:.2f}s, peak nnz {est.peak_nnz}, {est.iterations} iterations")
    return ScalingReport(rows)
