"""Similarity queries from an estimated diagonal via the truncated series
``S_K = sum_{k=0..K} (W^T)^k D W^k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InputError, ResourceError, VertexError
from .graph import SimGraph
from .sparse import SparseMatrix, _sandwich, drop_small, matvec

DEFAULT_NNZ_CAP = 50_000_000


@dataclass
class QueryResult:
    kind: str                     # "single_pair" | "single_source" | "full_matrix"
    scores: Union[float, np.ndarray, SparseMatrix]
    K_used: int
    tau_used: float
    error_bound: float


def error_bound(c: float, K: int, tau: float) -> float:
    """Series remainder ``c^K`` plus a heuristic ``10 K tau`` for thresholding."""
    return c ** K + 10.0 * tau * K


def _check_vertex(graph, v, name="vertex"):
    if not (0 <= int(v) < graph.n) or int(v) != v:
        raise VertexError(f"{name} {v} out of range for n={graph.n}")
    return int(v)


def _check_d(graph, d):
    d = np.asarray(d, dtype=np.float64)
    if d.shape != (graph.n,):
        raise InputError(f"diagonal has shape {d.shape}, graph has n={graph.n}")
    return d


def _forward(graph, a, K, tau):
    u = np.zeros(graph.n)
    u[a] = 1.0
    out = [u]
    for _ in range(K):
        u = matvec(graph.W, u)
        if tau > 0:
            u = drop_small(u, tau)
        out.append(u)
    return out


def single_source(graph: SimGraph, d, a: int, K: int = 50, tau: float = 0.0) -> QueryResult:
    """Scores between ``a`` and every vertex in O(K) sparse matvecs.

    Forward pass stores ``u_k = W^k e_a``; the backward Horner pass
    ``t <- W^T t + D u_k`` then sums the series without forming any matrix.
    """
    a = _check_vertex(graph, a)
    d = _check_d(graph, d)
    us = _forward(graph, a, K, tau)
    t = d * us[K]
    for k in range(K - 1, -1, -1):
        t = matvec(graph.Wt, t) + d * us[k]
    t[a] = 1.0
    return QueryResult("single_source", t, K, tau, error_bound(graph.c, K, tau))


def single_pair(graph: SimGraph, d, a: int, b: int, K: int = 50,
                tau: float = 0.0) -> QueryResult:
    """``sum_k (W^k e_a)^T D (W^k e_b)``; exactly 1 when ``a == b``."""
    a = _check_vertex(graph, a, "a")
    b = _check_vertex(graph, b, "b")
    d = _check_d(graph, d)
    bound = error_bound(graph.c, K, tau)
    if a == b:
        return QueryResult("single_pair", 1.0, K, tau, bound)
    ua = np.zeros(graph.n)
    ub = np.zeros(graph.n)
    ua[a] = ub[b] = 1.0
    s = 0.0
    for k in range(K + 1):
        if k:
            ua = matvec(graph.W, ua)
            ub = matvec(graph.W, ub)
            if tau > 0:
                ua, ub = drop_small(ua, tau), drop_small(ub, tau)
        s += float(np.dot(ua * d, ub))
    return QueryResult("single_pair", s, K, tau, bound)


def full_sparse_simrank(graph: SimGraph, d, K: int = 50, tau: float = 0.0,
                        nnz_cap: int = DEFAULT_NNZ_CAP) -> QueryResult:
    """Materialize ``sum_k drop_small((W^T)^k D W^k, tau)`` with unit diagonal."""
    d = _check_d(graph, d)
    X = SparseMatrix.diag(d)
    total = X.to_scipy()
    for _ in range(K):
        X, _ = _sandwich(graph.W, X, tau, graph.Wt)
        if X.nnz() == 0:
            break
        total = total + X.to_scipy()
        if total.nnz > nnz_cap:
            raise ResourceError(f"sparse SimRank exceeded nnz cap {nnz_cap} "
                                f"(nnz={total.nnz})", limit=nnz_cap, value=total.nnz)
    total = total.tolil()
    total.setdiag(1.0)
    S = SparseMatrix.from_scipy(total.tocsr())
    return QueryResult("full_matrix", S, K, tau, error_bound(graph.c, K, tau))


def lookup_pair(result: QueryResult, a: int, b: int) -> float:
    """O(log deg) score lookup in a materialized full matrix."""
    if result.kind != "full_matrix":
        raise InputError("lookup_pair needs a full_matrix result")
    return result.scores[a, b]


def lookup_source(result: QueryResult, a: int) -> np.ndarray:
    if result.kind != "full_matrix":
        raise InputError("lookup_source needs a full_matrix result")
    S = result.scores
    row = np.zeros(S.n_cols)
    lo, hi = S.row_offsets[a], S.row_offsets[a + 1]
    row[S.col_indices[lo:hi]] = S.values[lo:hi]
    return row
