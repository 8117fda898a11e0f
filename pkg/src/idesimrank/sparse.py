"""Compressed-row sparse matrices and the three kernels the solver needs.

Construction goes through :mod:`scipy.sparse` (duplicate summation, column
sorting); the hot products run in the compiled kernels of
:mod:`idesimrank._kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .errors import InputError


def _frozen(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Immutable CSR matrix over float64 with sorted, unique columns per row."""

    n_rows: int
    n_cols: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "row_offsets", _frozen(self.row_offsets, np.int64))
        object.__setattr__(self, "col_indices", _frozen(self.col_indices, np.int64))
        object.__setattr__(self, "values", _frozen(self.values, np.float64))
        ptr, idx = self.row_offsets, self.col_indices
        if ptr.shape != (self.n_rows + 1,) or ptr[0] != 0:
            raise InputError("row_offsets must have length n_rows + 1 and start at 0")
        if ptr[-1] != idx.size or idx.size != self.values.size:
            raise InputError("row_offsets[-1], len(col_indices) and len(values) disagree")
        if np.any(np.diff(ptr) < 0):
            raise InputError("row_offsets must be nondecreasing")
        if idx.size:
            if idx.min() < 0 or idx.max() >= self.n_cols:
                raise InputError("column index out of range")
            # strictly increasing inside each row: a step that does not
            # increase is only legal across a row boundary
            steps = np.diff(idx) <= 0
            starts = np.zeros(idx.size - 1, dtype=bool)
            inner = ptr[1:-1]
            inner = inner[(inner > 0) & (inner < idx.size)]
            starts[inner - 1] = True
            if np.any(steps & ~starts):
                raise InputError("column indices must strictly increase within a row")

    # -- construction ----------------------------------------------------

    @classmethod
    def from_scipy(cls, m) -> "SparseMatrix":
        m = sp.csr_matrix(m, dtype=np.float64, copy=True)
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        return cls(m.shape[0], m.shape[1], m.indptr, m.indices, m.data)

    @classmethod
    def from_coo(cls, rows, cols, values, shape) -> "SparseMatrix":
        """Build from triplets; duplicates are summed and zeros pruned."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        n_rows, n_cols = shape
        if rows.size and (rows.min() < 0 or rows.max() >= n_rows
                          or cols.min() < 0 or cols.max() >= n_cols):
            raise InputError("triplet index out of range for shape %r" % (shape,))
        return cls.from_scipy(sp.coo_matrix((values, (rows, cols)), shape=shape))

    @classmethod
    def from_dense(cls, a) -> "SparseMatrix":
        return cls.from_scipy(np.atleast_2d(np.asarray(a, dtype=np.float64)))

    @classmethod
    def diag(cls, v) -> "SparseMatrix":
        v = np.asarray(v, dtype=np.float64)
        n = v.size
        return cls.from_coo(np.arange(n), np.arange(n), v, (n, n))

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls.diag(np.ones(n))

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int | None = None) -> "SparseMatrix":
        n_cols = n_rows if n_cols is None else n_cols
        return cls(n_rows, n_cols, np.zeros(n_rows + 1), np.empty(0), np.empty(0))

    # -- views -----------------------------------------------------------

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    def nnz(self) -> int:
        return int(self.values.size)

    def to_scipy(self) -> sp.csr_matrix:
        """Zero-copy scipy view (read-only buffers)."""
        return sp.csr_matrix((self.values, self.col_indices, self.row_offsets),
                             shape=self.shape)

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix.from_scipy(self.to_scipy().T)

    @property
    def T(self) -> "SparseMatrix":
        return self.transpose()

    def scaled(self, alpha: float) -> "SparseMatrix":
        if alpha == 0.0:
            return SparseMatrix.zeros(self.n_rows, self.n_cols)
        return SparseMatrix(self.n_rows, self.n_cols, self.row_offsets,
                            self.col_indices, self.values * alpha)

    def column_sums(self) -> np.ndarray:
        return np.bincount(self.col_indices, weights=self.values,
                           minlength=self.n_cols)

    def __getitem__(self, key):
        i, j = key
        lo, hi = self.row_offsets[i], self.row_offsets[i + 1]
        k = lo + np.searchsorted(self.col_indices[lo:hi], j)
        if k < hi and self.col_indices[k] == j:
            return float(self.values[k])
        return 0.0

    def __repr__(self):
        return f"SparseMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz()})"


def _as_vector(x, n, what="x"):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size != n:
        raise InputError(f"{what} has shape {x.shape}, expected ({n},)")
    return x


def matvec(M: SparseMatrix, x) -> np.ndarray:
    """``M @ x`` with a fixed row-major, ascending-column reduction order."""
    x = _as_vector(x, M.n_cols)
    return _kernels.csr_matvec(M.row_offsets, M.col_indices, M.values, x)


def transpose_sandwich(W: SparseMatrix, X: SparseMatrix, tau: float = 0.0,
                       Wt: SparseMatrix | None = None) -> SparseMatrix:
    """Return ``drop_small(W.T @ X @ W, tau)``.

    Entries with ``|v| < tau`` are removed (``|v| == tau`` is kept), as are
    exact zeros.  Pass a precomputed ``Wt = W.transpose()`` to skip the
    transpose when calling repeatedly with the same ``W``.
    """
    return _sandwich(W, X, tau, Wt)[0]


def _sandwich(W, X, tau, Wt=None):
    n = W.n_rows
    if W.n_cols != n or X.shape != (n, n):
        raise InputError(f"transpose_sandwich needs square conforming operands, "
                         f"got W {W.shape} and X {X.shape}")
    if tau < 0:
        raise InputError("threshold must be nonnegative")
    if Wt is None:
        Wt = W.transpose()
    ptr, idx, val, widest = _kernels.sandwich_threshold(
        Wt.row_offsets, Wt.col_indices, Wt.values,
        X.row_offsets, X.col_indices, X.values,
        W.row_offsets, W.col_indices, W.values, n, float(tau))
    return SparseMatrix(n, n, ptr, idx, val), widest


def extract_diagonal(M: SparseMatrix) -> np.ndarray:
    """Diagonal of a square matrix as a dense vector (0 where absent)."""
    if M.n_rows != M.n_cols:
        raise InputError(f"extract_diagonal needs a square matrix, got {M.shape}")
    return _kernels.csr_diagonal(M.row_offsets, M.col_indices, M.values, M.n_rows)


def drop_small(v, tau: float) -> np.ndarray:
    """Dense-vector analogue of the sparse threshold: zero ``|v| < tau``."""
    v = np.array(v, dtype=np.float64)
    v[np.abs(v) < tau] = 0.0
    return v
