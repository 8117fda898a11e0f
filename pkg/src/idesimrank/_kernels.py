"""Compiled CSR kernels.

Every reduction runs sequentially in a fixed order (rows ascending, then
columns ascending inside a row) so the results are bit-reproducible.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _grow(buf, size):
    out = np.empty(size, dtype=buf.dtype)
    out[: buf.shape[0]] = buf
    return out


@njit(cache=True)
def sandwich_threshold(wt_ptr, wt_idx, wt_val, x_ptr, x_idx, x_val,
                       w_ptr, w_idx, w_val, n, tau):
    """Row-by-row ``drop_small(W^T X W, tau)``.

    ``wt_*`` is W^T in CSR (i.e. W by columns).  Row ``i`` of the result is
    built as ``T_i = sum_p W^T[i, p] X[p, :]`` followed by
    ``Y_i = sum_q T_i[q] W[q, :]``; neither T nor the unthresholded Y is ever
    stored in full.  Returns the CSR arrays of Y and the largest number of
    entries any row held before thresholding.
    """
    acc1 = np.zeros(n)
    acc2 = np.zeros(n)
    seen1 = np.zeros(n, dtype=np.bool_)
    seen2 = np.zeros(n, dtype=np.bool_)
    cols1 = np.empty(n, dtype=np.int64)
    cols2 = np.empty(n, dtype=np.int64)

    cap = max(16, x_idx.shape[0] + n)
    out_idx = np.empty(cap, dtype=np.int64)
    out_val = np.empty(cap, dtype=np.float64)
    out_ptr = np.zeros(n + 1, dtype=np.int64)
    nnz = 0
    widest = 0

    for i in range(n):
        m1 = 0
        for a in range(wt_ptr[i], wt_ptr[i + 1]):
            p = wt_idx[a]
            wpi = wt_val[a]
            for b in range(x_ptr[p], x_ptr[p + 1]):
                q = x_idx[b]
                if not seen1[q]:
                    seen1[q] = True
                    cols1[m1] = q
                    m1 += 1
                acc1[q] += wpi * x_val[b]
        cols1[:m1].sort()

        m2 = 0
        for t in range(m1):
            q = cols1[t]
            tq = acc1[q]
            acc1[q] = 0.0
            seen1[q] = False
            if tq == 0.0:
                continue
            for b in range(w_ptr[q], w_ptr[q + 1]):
                j = w_idx[b]
                if not seen2[j]:
                    seen2[j] = True
                    cols2[m2] = j
                    m2 += 1
                acc2[j] += tq * w_val[b]
        if m2 > widest:
            widest = m2

        if nnz + m2 > cap:
            cap = max(2 * cap, nnz + m2)
            out_idx = _grow(out_idx, cap)
            out_val = _grow(out_val, cap)
        # stash survivors in acc1 (all zero again here) and sort only them
        start = nnz
        for t in range(m2):
            j = cols2[t]
            v = acc2[j]
            acc2[j] = 0.0
            seen2[j] = False
            if v != 0.0 and abs(v) >= tau:
                out_idx[nnz] = j
                nnz += 1
                acc1[j] = v
        if nnz > start:
            out_idx[start:nnz].sort()
            for t in range(start, nnz):
                j = out_idx[t]
                out_val[t] = acc1[j]
                acc1[j] = 0.0
        out_ptr[i + 1] = nnz

    return out_ptr, out_idx[:nnz].copy(), out_val[:nnz].copy(), widest


@njit(cache=True)
def csr_matvec(ptr, idx, val, x):
    n = ptr.shape[0] - 1
    y = np.zeros(n)
    for i in range(n):
        s = 0.0
        for a in range(ptr[i], ptr[i + 1]):
            s += val[a] * x[idx[a]]
        y[i] = s
    return y


@njit(cache=True)
def csr_diagonal(ptr, idx, val, n):
    d = np.zeros(n)
    for i in range(n):
        for a in range(ptr[i], ptr[i + 1]):
            if idx[a] == i:
                d[i] = val[a]
                break
            if idx[a] > i:
                break
    return d
