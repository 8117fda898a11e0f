"""Command-line interface.

Exit statuses: 0 success, 1 invalid configuration or vertex, 2 unparsable
input, 3 solver did not converge (diagonal still written), 4 diagonal file
does not match the graph, 5 a size cap was exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import struct
import sys
from pathlib import Path

import numpy as np

from .errors import (ConfigError, ConvergenceError, InputError, ResourceError,
                     SimRankError, VertexError)
from .evaluation import run_ndcg_experiment, run_scaling_experiment
from .graph import check_decay, load_graph
from .oracle import FIXED_POINT_CAP, fixed_point_simrank
from .queries import full_sparse_simrank, single_pair, single_source
from .solver import SolverConfig, solve_diagonal

EXIT_OK, EXIT_CONFIG, EXIT_PARSE, EXIT_NOCONV, EXIT_MISMATCH, EXIT_RESOURCE = range(6)
MAGIC = b"IDE1"


class DiagonalMismatch(SimRankError):
    pass


def write_diagonal(path, d) -> None:
    d = np.ascontiguousarray(d, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", d.size))
        fh.write(d.tobytes())


def read_diagonal(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC or len(raw) < 12:
        raise DiagonalMismatch(f"{path}: not a diagonal file (bad magic)")
    (n,) = struct.unpack("<Q", raw[4:12])
    if len(raw) != 12 + 8 * n:
        raise DiagonalMismatch(f"{path}: header says n={n} but payload has "
                               f"{(len(raw) - 12) / 8:g} values")
    return np.frombuffer(raw[12:], dtype="<f8").astype(np.float64)


def _write_scores(path, scores, fmt):
    order = np.lexsort((np.arange(scores.size), -scores))
    out = open(path, "w", newline="", encoding="utf-8") if path else sys.stdout
    try:
        if fmt == "json":
            json.dump([{"vertex": int(v), "score": float(scores[v])} for v in order], out)
            out.write("\n")
        else:
            w = csv.writer(out, lineterminator="\n")
            w.writerow(["vertex", "score"])
            for v in order:
                w.writerow([int(v), repr(float(scores[v]))])
    finally:
        if path:
            out.close()


def _graph_args(p):
    p.add_argument("input", help="edge list or Matrix Market file")
    p.add_argument("--format", dest="input_format", default="auto",
                   choices=["auto", "edgelist", "matrixmarket"])
    p.add_argument("--base", type=int, default=0, choices=[0, 1],
                   help="index base of edge-list vertices")
    p.add_argument("--symmetrize", action="store_true",
                   help="add the reverse of every edge")
    p.add_argument("-c", "--decay", dest="c", type=float, default=0.6)


def _solver_args(p, tau=1e-4):
    p.add_argument("-K", type=int, default=50, help="series length")
    p.add_argument("--tau", type=float, default=tau, help="drop threshold")
    p.add_argument("--eps", type=float, default=1e-8, help="GMRES tolerance")
    p.add_argument("--restart", type=int, default=30)
    p.add_argument("--max-restarts", type=int, default=20)
    p.add_argument("--adaptive-tau", action="store_true")
    p.add_argument("--tau-max", type=float, default=None)


def _config(args) -> SolverConfig:
    return SolverConfig(c=args.c, K=args.K, tau=args.tau, eps=args.eps,
                        restart=args.restart, max_restarts=args.max_restarts,
                        adaptive_tau=args.adaptive_tau, tau_max=args.tau_max)


def _load(args):
    check_decay(args.c)
    return load_graph(args.input, fmt=args.input_format, c=args.c, base=args.base,
                      symmetrize=args.symmetrize)


def _log(args):
    if getattr(args, "verbose", False):
        return lambda msg: print(msg, file=sys.stderr)
    return None


def cmd_estimate(args) -> int:
    cfg = _config(args)
    g = _load(args)
    status = EXIT_OK
    try:
        est = solve_diagonal(g, cfg, verbose=_log(args))
    except ConvergenceError as exc:
        print(f"warning: {exc}", file=sys.stderr)
        est, status = exc.estimate, EXIT_NOCONV
    out = Path(args.output)
    write_diagonal(out, est.d)
    sidecar = {
        "input": str(args.input), "n": g.n, "c": g.c, "K": cfg.K, "tau": cfg.tau,
        "eps": cfg.eps, "restart": cfg.restart, "max_restarts": cfg.max_restarts,
        "adaptive_tau": cfg.adaptive_tau, "converged": est.converged,
        "residual_norm": est.residual_norm, "iterations": est.iterations,
        "matvec_count": est.matvec_count, "peak_nnz": est.peak_nnz,
        "wall_time_seconds": est.wall_time,
    }
    with open(str(out) + ".json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if args.trace:
        est.write_trace(args.trace)
    print(f"n={g.n} iterations={est.iterations} residual={est.residual_norm:.3e} "
          f"converged={est.converged}", file=sys.stderr)
    return status


def _diag_for(args, g):
    d = read_diagonal(args.diagonal)
    if d.size != g.n:
        raise DiagonalMismatch(f"diagonal file has n={d.size}, graph has n={g.n}")
    return d


def cmd_query(args) -> int:
    g = _load(args)
    d = _diag_for(args, g)
    if args.pair is not None:
        a, b = args.pair
        res = single_pair(g, d, a, b, args.K, args.tau)
        print(f"{res.scores:.15g}")
    else:
        res = single_source(g, d, args.source, args.K, args.tau)
        _write_scores(args.output, res.scores, args.out_format)
    return EXIT_OK


def cmd_full(args) -> int:
    g = _load(args)
    d = _diag_for(args, g)
    res = full_sparse_simrank(g, d, args.K, args.tau, nnz_cap=args.nnz_cap)
    S = res.scores
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "col", "score"])
        for i in range(S.n_rows):
            for k in range(S.row_offsets[i], S.row_offsets[i + 1]):
                w.writerow([i, int(S.col_indices[k]), repr(float(S.values[k]))])
    return EXIT_OK


def cmd_ndcg(args) -> int:
    cfg = _config(args)
    g = _load(args)
    rep = run_ndcg_experiment(g, args.q, cfg, seed=args.seed,
                              graph_name=Path(args.input).stem, oracle_cap=args.cap)
    if args.output:
        rep.write_csv(args.output)
    if args.summary:
        rep.write_json(args.summary)
    print(f"{rep.graph_name}: n={rep.n} q={rep.q} "
          f"mean 1-NDCG={rep.mean_one_minus_ndcg:.3e}")
    return EXIT_OK


def cmd_bench(args) -> int:
    check_decay(args.c)
    cfg = _config(args)
    rep = run_scaling_experiment(args.sizes, args.nnz_per_col, cfg, seed=args.seed,
                                 c=args.c, log=_log(args))
    rep.write_csv(args.output)
    if args.summary:
        rep.write_json(args.summary)
    for r in rep.rows:
        print(f"n={r.n} time={r.solve_time_seconds:.3f}s peak_nnz={r.peak_nnz_proxy} "
              f"iterations={r.gmres_iterations}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = _load(args)
    S = fixed_point_simrank(g, args.iterations, cap=args.cap)
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in S:
            w.writerow([repr(float(v)) for v in row])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="idesimrank",
                                 description="SimRank via iterative diagonal estimation")
    ap.add_argument("-v", "--verbose", action="store_true", help="residual trace on stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="solve for the diagonal correction")
    _graph_args(p)
    _solver_args(p)
    p.add_argument("-o", "--output", required=True, help="binary diagonal file")
    p.add_argument("--trace", help="CSV convergence trace (iteration,residual,tau)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("query", help="single-source or single-pair scores")
    _graph_args(p)
    p.add_argument("-d", "--diagonal", required=True)
    p.add_argument("-K", type=int, default=50)
    p.add_argument("--tau", type=float, default=0.0, help="threshold on query vectors")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("-a", "--source", type=int)
    grp.add_argument("--pair", type=int, nargs=2, metavar=("A", "B"))
    p.add_argument("-o", "--output", help="score file (stdout if omitted)")
    p.add_argument("--out-format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("full", help="materialize the thresholded sparse matrix")
    _graph_args(p)
    p.add_argument("-d", "--diagonal", required=True)
    p.add_argument("-K", type=int, default=50)
    p.add_argument("--tau", type=float, default=1e-4)
    p.add_argument("--nnz-cap", type=int, default=50_000_000)
    p.add_argument("-o", "--output", required=True, help="CSV of row,col,score")
    p.set_defaults(func=cmd_full)

    p = sub.add_parser("ndcg", help="ranking accuracy against the dense oracle")
    _graph_args(p)
    _solver_args(p, tau=1e-3)
    p.add_argument("-q", type=int, default=100, help="number of query vertices")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=FIXED_POINT_CAP)
    p.add_argument("-o", "--output", help="per-query CSV")
    p.add_argument("--summary", help="JSON summary")
    p.set_defaults(func=cmd_ndcg)

    p = sub.add_parser("bench", help="solve time and memory proxy versus n")
    p.add_argument("--sizes", type=int, nargs="+", default=[1000, 2000, 4000, 8000])
    p.add_argument("--nnz-per-col", type=int, default=5)
    p.add_argument("-c", "--decay", dest="c", type=float, default=0.6)
    _solver_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="CSV, one row per size")
    p.add_argument("--summary", help="JSON summary with log-log slopes")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="dense fixed-point similarity matrix")
    _graph_args(p)
    p.add_argument("--iterations", type=int, default=200)
    p.add_argument("--cap", type=int, default=FIXED_POINT_CAP)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, VertexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DiagonalMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except ResourceError as exc:
        print(f"error: {exc} (cap={exc.limit})", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
