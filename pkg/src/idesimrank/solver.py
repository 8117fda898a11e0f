"""Diagonal estimation: solve ``F(d) = 1`` with restarted, inexact GMRES.

``F`` maps a diagonal ``d`` to ``diag(S(d))`` where ``S(d)`` solves the Stein
equation ``S = W^T S W + diag(d)``.  It is applied approximately by summing
the thresholded series ``X_0 = diag(d)``, ``X_k = drop_small(W^T X_{k-1} W)``.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ConvergenceError, InputError, NumericalBreakdownError
from .graph import SimGraph, check_decay
from .sparse import SparseMatrix, _sandwich, extract_diagonal

TAU_FLOOR = 1e-16
BREAKDOWN_TOL = 1e-14


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of the diagonal solve.

    ``c=None`` means "use the graph's decay constant".  ``tau_max`` caps the
    adaptive threshold and defaults to ``tau``.
    """

    c: float | None = None
    K: int = 50
    tau: float = 1e-4
    eps: float = 1e-8
    restart: int = 30
    max_restarts: int = 20
    adaptive_tau: bool = False
    tau_max: float | None = None

    def __post_init__(self):
        if self.c is not None:
            check_decay(self.c)
        if int(self.K) != self.K or self.K < 1:
            raise ConfigError(f"K={self.K} must be a positive integer")
        if not self.tau >= 0:
            raise ConfigError(f"tau={self.tau} must be nonnegative")
        if not self.eps > 0:
            raise ConfigError(f"eps={self.eps} must be positive")
        if int(self.restart) != self.restart or self.restart < 1:
            raise ConfigError(f"restart={self.restart} must be a positive integer")
        if int(self.max_restarts) != self.max_restarts or self.max_restarts < 0:
            raise ConfigError(f"max_restarts={self.max_restarts} must be >= 0")
        if self.tau_max is not None and not self.tau_max >= 0:
            raise ConfigError(f"tau_max={self.tau_max} must be nonnegative")


@dataclass
class DiagonalEstimate:
    d: np.ndarray
    residual_norm: float
    residual_history: np.ndarray
    matvec_count: int
    tau_schedule: np.ndarray
    iterations: int = 0
    cycle_starts: list = field(default_factory=list)
    converged: bool = True
    peak_nnz: int = 0
    tau: float = 0.0
    K: int = 0
    c: float = 0.0
    eps: float = 0.0
    wall_time: float = 0.0

    def cycles(self):
        """Split ``residual_history`` into one array per restart cycle."""
        bounds = list(self.cycle_starts) + [len(self.residual_history)]
        return [self.residual_history[a:b] for a, b in zip(bounds[:-1], bounds[1:])]

    def trace_rows(self):
        """(iteration, residual, tau) per Arnoldi step, iterations from 1."""
        rows, it = [], 0
        for cyc in self.cycles():
            for r in cyc[1:]:
                rows.append((it + 1, float(r), float(self.tau_schedule[it])))
                it += 1
        return rows

    def write_trace(self, path_or_stream) -> None:
        own = isinstance(path_or_stream, str) or hasattr(path_or_stream, "__fspath__")
        fh = open(path_or_stream, "w", newline="", encoding="utf-8") if own else path_or_stream
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration", "residual", "tau"])
            for it, r, t in self.trace_rows():
                w.writerow([it, repr(r), repr(t)])
        finally:
            if own:
                fh.close()


def series_diagonal(graph: SimGraph, x, K: int, tau: float):
    """``x + sum_{k=1..K} diag(X_k)`` and the peak stored nnz over the iterates.

    Stops early once an iterate is empty, as every later one is too.
    """
    y = np.array(x, dtype=np.float64)
    X = SparseMatrix.diag(y)
    peak = X.nnz()
    for _ in range(K):
        if X.nnz() == 0:
            break
        X, _ = _sandwich(graph.W, X, tau, graph.Wt)
        peak = max(peak, X.nnz())
        y += extract_diagonal(X)
    return y, peak


def apply_F_approx(graph: SimGraph, x, K: int = 50, tau: float = 0.0) -> np.ndarray:
    """Truncated, thresholded application of the diagonal operator ``F``."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size != graph.n:
        raise InputError(f"x has shape {x.shape}, graph has n={graph.n}")
    if K < 0:
        raise InputError("K must be nonnegative")
    return series_diagonal(graph, x, K, tau)[0]


def matvec_error_bound(c: float, K: int, tau: float, x_inf: float = 1.0) -> float:
    """A-priori bound on ``|apply_F_approx(x) - F x|_inf``."""
    return tau * ((1 + c) ** K - 1) / c + c ** K * x_inf


def tau_schedule_next(current_residual: float, eps: float, base_tau: float,
                      sigma_min_estimate: float, m: int, *, c: float = 0.6,
                      K: int = 50, adaptive: bool = True,
                      tau_max: float | None = None, floor: float = TAU_FLOOR) -> float:
    """Threshold for the next matvec under the relaxed-accuracy rule.

    The matvec error allowance is ``sigma_min * eps / (m * residual)``; the
    threshold is the largest tau whose a-priori error bound
    ``tau ((1+c)^K - 1)/c + c^K`` fits into it, clamped to ``[floor, tau_max]``.
    """
    if not adaptive:
        return base_tau
    if tau_max is None:
        tau_max = base_tau
    allowed = sigma_min_estimate * eps / (m * current_residual)
    growth = ((1 + c) ** K - 1) / c
    tau = max(allowed - c ** K, floor) / growth
    return min(max(tau, floor), tau_max)


def _givens(a, b):
    if b == 0.0:
        return 1.0, 0.0
    r = math.hypot(a, b)
    return a / r, b / r


def solve_diagonal(graph: SimGraph, cfg: SolverConfig | None = None,
                   x0=None, verbose=None) -> DiagonalEstimate:
    """Restarted GMRES on ``F(d) = 1`` with the thresholded series matvec.

    Each basis vector is rescaled to unit max-norm before the series is
    applied, so the absolute threshold acts at the scale of the solution.
    The residual checked at every restart is ``|1 - apply_F_approx(d)|_2``
    at ``cfg.tau``.
    Raises :class:`ConvergenceError` (carrying the last estimate) when
    ``1 + max_restarts`` cycles do not reach ``eps``.
    """
    cfg = cfg or SolverConfig()
    c = graph.c
    if cfg.c is not None and not math.isclose(cfg.c, c, rel_tol=0, abs_tol=1e-15):
        raise ConfigError(f"config c={cfg.c} differs from the graph's c={c}")
    n, K, eps, m = graph.n, cfg.K, cfg.eps, cfg.restart
    tau_check = cfg.tau
    tau_max = cfg.tau if cfg.tau_max is None else cfg.tau_max
    sigma0 = (1 - c) ** 2 / (2 * (1 + c))
    t_start = time.perf_counter()

    b = np.ones(n)
    x = np.full(n, 1 - c) if x0 is None else np.array(x0, dtype=np.float64)
    history, taus, cycle_starts = [], [], []
    state = {"matvecs": 0, "peak": 0}

    def F(v, tau, rescale=True):
        scale = np.max(np.abs(v)) if rescale else 1.0
        if scale == 0.0:
            return np.zeros(n)
        y, peak = series_diagonal(graph, v / scale, K, tau)
        state["matvecs"] += 1
        state["peak"] = max(state["peak"], peak)
        if not np.all(np.isfinite(y)):
            raise NumericalBreakdownError("non-finite value in series matvec")
        return y * scale

    def residual(x):
        r = b - F(x, tau_check, rescale=False)
        return r, float(np.linalg.norm(r))

    def result(x, rnorm, converged):
        return DiagonalEstimate(
            d=x, residual_norm=rnorm, residual_history=np.array(history),
            matvec_count=state["matvecs"], tau_schedule=np.array(taus),
            iterations=len(taus), cycle_starts=cycle_starts, converged=converged,
            peak_nnz=state["peak"], tau=tau_check, K=K, c=c, eps=eps,
            wall_time=time.perf_counter() - t_start)

    if n == 0:
        return result(x, 0.0, True)

    r, beta = residual(x)
    for cycle in range(cfg.max_restarts + 1):
        if beta <= eps:
            return result(x, beta, True)
        cycle_starts.append(len(history))
        history.append(beta)
        if verbose:
            verbose(f"cycle {cycle}: residual {beta:.3e}")

        V = np.zeros((m + 1, n))
        H = np.zeros((m + 1, m))
        cs, sn = np.zeros(m), np.zeros(m)
        g = np.zeros(m + 1)
        g[0] = beta
        V[0] = r / beta
        sigma = sigma0
        res = beta
        k = 0
        for j in range(m):
            tau_j = tau_schedule_next(res, eps, cfg.tau, sigma, m, c=c, K=K,
                                      adaptive=cfg.adaptive_tau, tau_max=tau_max)
            taus.append(tau_j)
            w = F(V[j], tau_j)
            # modified Gram-Schmidt, second pass on severe cancellation
            norm_in = np.linalg.norm(w)
            for i in range(j + 1):
                h = w @ V[i]
                H[i, j] = h
                w -= h * V[i]
            hnext = np.linalg.norm(w)
            if hnext < norm_in / math.sqrt(2):
                for i in range(j + 1):
                    h = w @ V[i]
                    H[i, j] += h
                    w -= h * V[i]
                hnext = np.linalg.norm(w)
            H[j + 1, j] = hnext
            if not np.isfinite(hnext):
                raise NumericalBreakdownError("non-finite Arnoldi vector")

            sv = np.linalg.svd(H[: j + 2, : j + 1], compute_uv=False)
            sigma = min(sigma0, sv[-1]) if sv[-1] > 0 else sigma0

            Rj = H[: j + 2, j].copy()
            for i in range(j):
                Rj[i], Rj[i + 1] = (cs[i] * Rj[i] + sn[i] * Rj[i + 1],
                                    -sn[i] * Rj[i] + cs[i] * Rj[i + 1])
            cs[j], sn[j] = _givens(Rj[j], Rj[j + 1])
            Rj[j] = cs[j] * Rj[j] + sn[j] * Rj[j + 1]
            Rj[j + 1] = 0.0
            H[: j + 2, j] = Rj
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]
            res = abs(g[j + 1])
            history.append(res)
            k = j + 1
            if verbose:
                verbose(f"  it {len(taus)}: est. residual {res:.3e} tau {tau_j:.1e}")
            if hnext < BREAKDOWN_TOL or res <= eps:
                break
            V[j + 1] = w / hnext

        # H now holds the rotated upper-triangular factor in its top k rows
        y = np.zeros(k)
        for i in range(k - 1, -1, -1):
            y[i] = (g[i] - H[i, i + 1:k] @ y[i + 1:]) / H[i, i]
        x = x + V[:k].T @ y
        if not np.all(np.isfinite(x)):
            raise NumericalBreakdownError("non-finite GMRES iterate")
        r, beta = residual(x)

    if beta <= eps:
        return result(x, beta, True)
    est = result(x, beta, False)
    raise ConvergenceError(
        f"GMRES residual {beta:.3e} > eps={eps:g} after "
        f"{cfg.max_restarts + 1} cycles", est.residual_history, est)
