"""Graph ingestion: edge lists, Matrix Market files, and the scaled operator.

Edges are directed ``src -> dst``; ``src`` is an in-neighbour of ``dst``.
Multi-edges collapse and weights are discarded, since similarity is defined
on unweighted in-neighbour sets.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, InputError, ParseError, UnsupportedFormatError
from .sparse import SparseMatrix


@dataclass(frozen=True, eq=False)
class EdgeSet:
    """Deduplicated directed edges, sorted by (src, dst)."""

    n: int
    src: np.ndarray
    dst: np.ndarray

    @classmethod
    def from_pairs(cls, pairs, n=None, symmetrize=False) -> "EdgeSet":
        arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if symmetrize:
            arr = np.vstack([arr, arr[:, ::-1]])
        if arr.size and arr.min() < 0:
            raise InputError("negative vertex index")
        inferred = int(arr.max()) + 1 if arr.size else 0
        if n is None:
            n = inferred
        elif inferred > n:
            raise InputError(f"vertex index {inferred - 1} out of range for n={n}")
        arr = np.unique(arr, axis=0) if arr.size else arr
        return cls(int(n), arr[:, 0].copy(), arr[:, 1].copy())

    def __len__(self):
        return int(self.src.size)

    def pairs(self):
        return list(zip(self.src.tolist(), self.dst.tolist()))

    @property
    def self_loops(self) -> np.ndarray:
        return self.src[self.src == self.dst]


def _open_text(source):
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8")
    if isinstance(source, io.TextIOBase) or hasattr(source, "read"):
        return source
    raise TypeError(f"expected a path or text stream, got {type(source).__name__}")


def parse_edge_list(stream, base: int = 0, symmetrize: bool = False) -> EdgeSet:
    """Read ``src dst`` lines; ``#`` and ``%`` start comment lines.

    Columns after the second (weights) are ignored.
    """
    if base not in (0, 1):
        raise ConfigError(f"index base must be 0 or 1, got {base}")
    pairs = []
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s[0] in "#%":
            continue
        tokens = s.split()
        if len(tokens) < 2:
            raise ParseError(f"expected 'src dst', got {s!r}", lineno)
        try:
            u, v = int(tokens[0]) - base, int(tokens[1]) - base
        except ValueError:
            raise ParseError(f"non-integer vertex in {s!r}", lineno) from None
        if u < 0 or v < 0:
            raise ParseError(f"negative vertex index after base-{base} adjustment "
                             f"in {s!r}", lineno)
        pairs.append((u, v))
    return EdgeSet.from_pairs(pairs, symmetrize=symmetrize)


_MM_FIELDS = {"pattern", "real", "integer", "double"}
_MM_SYMMETRY = {"general", "symmetric"}


def parse_matrix_market(stream) -> EdgeSet:
    """Read a coordinate Matrix Market file as a directed edge set.

    Entry ``(i, j)`` becomes the edge ``i -> j``; ``symmetric`` files yield
    both directions.  The size line fixes ``n`` even if trailing vertices
    are isolated.
    """
    lines = iter(enumerate(stream, start=1))
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("empty Matrix Market stream", 1) from None
    parts = header.strip().split()
    if len(parts) != 5 or parts[0].lower() != "%%matrixmarket" or parts[1].lower() != "matrix":
        raise UnsupportedFormatError(f"line 1: not a MatrixMarket matrix header: {header.strip()!r}")
    layout, fld, symmetry = (p.lower() for p in parts[2:])
    if layout != "coordinate":
        raise UnsupportedFormatError(f"unsupported layout {layout!r} (only coordinate)")
    if fld not in _MM_FIELDS:
        raise UnsupportedFormatError(f"unsupported field {fld!r}")
    if symmetry not in _MM_SYMMETRY:
        raise UnsupportedFormatError(f"unsupported symmetry {symmetry!r}")
    need = 2 if fld == "pattern" else 3

    size = None
    for lineno, line in lines:
        s = line.strip()
        if s and not s.startswith("%"):
            size = (lineno, s.split())
            break
    if size is None:
        raise ParseError("missing size line")
    lineno, tok = size
    try:
        rows, cols, nnz = (int(t) for t in tok)
    except ValueError:
        raise ParseError(f"bad size line {' '.join(tok)!r}", lineno) from None
    if rows != cols:
        raise ParseError(f"adjacency matrix must be square, got {rows}x{cols}", lineno)

    pairs = np.empty((nnz, 2), dtype=np.int64)
    k = 0
    for lineno, line in lines:
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        tok = s.split()
        if len(tok) < need:
            raise ParseError(f"expected {need} fields, got {s!r}", lineno)
        try:
            i, j = int(tok[0]) - 1, int(tok[1]) - 1
        except ValueError:
            raise ParseError(f"non-integer index in {s!r}", lineno) from None
        if not (0 <= i < rows and 0 <= j < cols):
            raise ParseError(f"entry ({i + 1}, {j + 1}) outside {rows}x{cols}", lineno)
        if k >= nnz:
            raise ParseError(f"more entries than the {nnz} declared", lineno)
        pairs[k] = (i, j)
        k += 1
    if k != nnz:
        raise ParseError(f"size line declares {nnz} entries, found {k}")
    return EdgeSet.from_pairs(pairs, n=rows, symmetrize=(symmetry == "symmetric"))


def write_edge_list(edges: EdgeSet, stream, base: int = 0) -> None:
    for u, v in zip(edges.src.tolist(), edges.dst.tolist()):
        stream.write(f"{u + base} {v + base}\n")


@dataclass(frozen=True, eq=False)
class SimGraph:
    """Directed graph with column-normalized adjacency ``A`` and ``W = sqrt(c) A``."""

    n: int
    A: SparseMatrix
    W: SparseMatrix
    c: float
    dangling: np.ndarray
    directed: bool = True
    Wt: SparseMatrix = field(default=None, repr=False)

    def __post_init__(self):
        if self.Wt is None:
            object.__setattr__(self, "Wt", self.W.transpose())

    @property
    def nnz(self) -> int:
        return self.A.nnz()

    def in_degrees(self) -> np.ndarray:
        return np.diff(self.A.transpose().row_offsets)


def check_decay(c) -> float:
    c = float(c)
    if not (0.0 < c < 1.0) or math.isnan(c):
        raise ConfigError(f"decay constant c={c} must lie in (0, 1)")
    return c


def build_graph(edges: EdgeSet, n: int | None = None, c: float = 0.6,
                directed: bool = True) -> SimGraph:
    """Column-normalize the adjacency: ``A[i, j] = 1 / indeg(j)`` per edge ``i -> j``.

    Columns with no in-neighbours stay zero (dangling vertices).
    """
    c = check_decay(c)
    n = edges.n if n is None else int(n)
    src, dst = edges.src, edges.dst
    if src.size and max(src.max(), dst.max()) >= n:
        raise InputError(f"edge endpoint out of range for n={n}")
    indeg = np.bincount(dst, minlength=n)
    A = SparseMatrix.from_coo(src, dst, 1.0 / indeg[dst], (n, n))
    W = A.scaled(math.sqrt(c))
    dangling = np.flatnonzero(indeg == 0)
    dangling.setflags(write=False)
    return SimGraph(n=n, A=A, W=W, c=c, dangling=dangling, directed=directed)


def load_graph(path, fmt: str = "auto", c: float = 0.6, base: int = 0,
               symmetrize: bool = False) -> SimGraph:
    """Read an edge-list or Matrix Market file and build the graph."""
    path = Path(path)
    if fmt == "auto":
        fmt = "matrixmarket" if path.suffix.lower() == ".mtx" else "edgelist"
    with _open_text(path) as fh:
        if fmt == "matrixmarket":
            edges = parse_matrix_market(fh)
            if symmetrize:
                edges = EdgeSet.from_pairs(
                    np.column_stack([edges.src, edges.dst]), n=edges.n, symmetrize=True)
        elif fmt == "edgelist":
            edges = parse_edge_list(fh, base=base, symmetrize=symmetrize)
        else:
            raise ConfigError(f"unknown input format {fmt!r}")
    return build_graph(edges, c=c, directed=not symmetrize)
