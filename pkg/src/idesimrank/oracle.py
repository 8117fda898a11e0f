"""Dense ground truth for small graphs.

Nothing here shares code with the series or the solver: the fixed point runs
the classical dense iteration, and ``exact_F_matrix`` inverts the Kronecker
form of the operator directly.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import NumericalBreakdownError, ResourceError
from .graph import SimGraph

FIXED_POINT_CAP = 2048
KRONECKER_CAP = 64


def _check_cap(n, cap, what):
    if n > cap:
        raise ResourceError(f"{what} limited to n <= {cap}, got n={n}", limit=cap, value=n)


def fixed_point_simrank(graph: SimGraph, iterations: int = 200,
                        cap: int = FIXED_POINT_CAP) -> np.ndarray:
    """Iterate ``S <- c A^T S A - c diag(A^T S A) + I`` from ``S = I``."""
    n = graph.n
    _check_cap(n, cap, "fixed-point oracle")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    A = graph.A.to_scipy()
    At = A.T.tocsr()
    c = graph.c
    S = np.eye(n)
    for _ in range(iterations):
        T = At @ S                    # A^T S
        P = (At @ T.T).T              # (A^T S) A, using (A^T (A^T S)^T)^T
        S = c * P
        np.fill_diagonal(S, 1.0)
    return S


def oracle_diagonal(graph: SimGraph, S: np.ndarray) -> np.ndarray:
    """``1 - diag(W^T S W)``: the diagonal correction implied by ``S``."""
    W = graph.W.to_scipy()
    SW = (W.T @ S.T).T
    return 1.0 - np.asarray(W.multiply(SW).sum(axis=0)).ravel()


def exact_F_matrix(graph: SimGraph, cap: int = KRONECKER_CAP) -> np.ndarray:
    """Dense n x n matrix of the diagonal-to-diagonal operator.

    Builds ``Z = W^T kron W^T`` on column-major vectorizations, solves
    ``(I - Z) Y = P`` where column j of P selects flat index ``j*n + j``,
    and returns ``P^T Y``.
    """
    n = graph.n
    _check_cap(n, cap, "Kronecker operator")
    Wt = graph.W.to_dense().T
    Z = np.kron(Wt, Wt)
    M = np.eye(n * n) - Z
    diag_pos = np.arange(n) * n + np.arange(n)
    P = np.zeros((n * n, n))
    P[diag_pos, np.arange(n)] = 1.0
    lu = scipy.linalg.lu_factor(M, check_finite=True)
    Y = scipy.linalg.lu_solve(lu, P)
    return Y[diag_pos, :]


def condition_number_1(F: np.ndarray) -> float:
    """``|F|_1 |F^-1|_1`` with the inverse from a dense LU factorization."""
    F = np.asarray(F, dtype=np.float64)
    if F.ndim != 2 or F.shape[0] != F.shape[1]:
        raise ValueError(f"square matrix required, got shape {F.shape}")
    lu, piv = scipy.linalg.lu_factor(F)
    if np.any(np.diag(lu) == 0.0):
        raise NumericalBreakdownError("singular matrix")
    Finv = scipy.linalg.lu_solve((lu, piv), np.eye(F.shape[0]))
    return float(np.abs(F).sum(axis=0).max() * np.abs(Finv).sum(axis=0).max())
