"""Pure-numpy sparse kernels.

This is the fallback path used when numba is missing or when
``SPECTRA_BACKEND=numpy``.  The incomplete Cholesky loop is written in
plain Python over flat arrays so that the numba module can compile the very
same function.
"""
import numpy as np


def csr_matvec(row_ptr, col_idx, values, x):
    n = row_ptr.shape[0] - 1
    rows = np.repeat(np.arange(n), np.diff(row_ptr))
    return np.bincount(rows, weights=values * x[col_idx], minlength=n)


def lower_solve(row_ptr, col_idx, values, b):
    """Solve L y = b; the diagonal is the last entry of every row."""
    n = row_ptr.shape[0] - 1
    y = np.empty(n)
    for i in range(n):
        a, e = row_ptr[i], row_ptr[i + 1] - 1
        y[i] = (b[i] - values[a:e] @ y[col_idx[a:e]]) / values[e]
    return y


def lower_transpose_solve(row_ptr, col_idx, values, b):
    """Solve L^T x = b by a column sweep over the rows of L."""
    n = row_ptr.shape[0] - 1
    x = np.array(b, dtype=np.float64)
    for i in range(n - 1, -1, -1):
        a, e = row_ptr[i], row_ptr[i + 1] - 1
        x[i] /= values[e]
        x[col_idx[a:e]] -= values[a:e] * x[i]
    return x


def ic_factor_loop(n, row_ptr, col_idx, values, lfil, tau, shift):
    """Dual-threshold row-wise incomplete Cholesky of ``A + shift*I``.

    Row ``i`` of L is built by eliminating against the already finished rows,
    reached through per-column linked lists.  An elimination value whose
    magnitude (in units of A) falls below ``tau * ||a_i||_2`` is dropped on
    the spot; afterwards only the ``lfil`` largest off-diagonal entries
    survive.  The pivot is recomputed from the kept entries so that the
    diagonal of L L^T reproduces that of A.

    Returns ``(lptr, lcol, lval, bad_row)``; ``bad_row`` is -1 on success,
    otherwise the row whose pivot was not safely positive.
    """
    cap = n * (lfil + 1)
    tri = n * (n + 1) // 2
    if tri < cap:
        cap = tri
    lptr = np.zeros(n + 1, dtype=np.int64)
    lcol = np.empty(cap, dtype=np.int64)
    lval = np.empty(cap, dtype=np.float64)
    lrow = np.empty(cap, dtype=np.int64)
    cnext = np.full(cap, -1, dtype=np.int64)
    chead = np.full(n, -1, dtype=np.int64)
    ctail = np.full(n, -1, dtype=np.int64)
    ldiag = np.empty(n, dtype=np.float64)

    w = np.zeros(n, dtype=np.float64)
    active = np.zeros(n, dtype=np.bool_)
    lnext = np.full(n, -1, dtype=np.int64)
    cand_col = np.empty(n, dtype=np.int64)
    cand_val = np.empty(n, dtype=np.float64)

    pos = 0
    for i in range(n):
        # scatter the strictly lower part of row i into a sorted linked list
        head = -1
        last = -1
        rownorm2 = 0.0
        aii = shift
        for p in range(row_ptr[i], row_ptr[i + 1]):
            j = col_idx[p]
            v = values[p]
            if j == i:
                v += shift
                aii = v
            rownorm2 += v * v
            if j < i:
                w[j] = v
                active[j] = True
                if last == -1:
                    head = j
                else:
                    lnext[last] = j
                lnext[j] = -1
                last = j
        droptol = tau * np.sqrt(rownorm2)

        ncand = 0
        k = head
        while k != -1:
            wk = w[k]
            if wk != 0.0 and abs(wk) >= droptol:
                lik = wk / ldiag[k]
                cand_col[ncand] = k
                cand_val[ncand] = lik
                ncand += 1
                q = chead[k]
                while q != -1:
                    j = lrow[q]
                    if not active[j]:
                        # j > k: insert after k keeping the list sorted
                        prev = k
                        nxt = lnext[k]
                        while nxt != -1 and nxt < j:
                            prev = nxt
                            nxt = lnext[nxt]
                        lnext[prev] = j
                        lnext[j] = nxt
                        active[j] = True
                        w[j] = 0.0
                    w[j] -= lik * lval[q]
                    q = cnext[q]
            k = lnext[k]

        # reset the work row
        k = head
        while k != -1:
            w[k] = 0.0
            active[k] = False
            nk = lnext[k]
            lnext[k] = -1
            k = nk

        if ncand > lfil:
            order = np.argsort(-np.abs(cand_val[:ncand]), kind="mergesort")[:lfil]
            keep = np.sort(order)
            nkeep = lfil
        else:
            keep = np.arange(ncand)
            nkeep = ncand

        d = aii
        for t in range(nkeep):
            v = cand_val[keep[t]]
            d -= v * v
        if not d > 1e-12 * aii:
            return lptr, lcol[:pos].copy(), lval[:pos].copy(), i

        for t in range(nkeep):
            c = cand_col[keep[t]]
            lcol[pos] = c
            lval[pos] = cand_val[keep[t]]
            lrow[pos] = i
            if chead[c] == -1:
                chead[c] = pos
            else:
                cnext[ctail[c]] = pos
            ctail[c] = pos
            pos += 1
        ldiag[i] = np.sqrt(d)
        lcol[pos] = i
        lval[pos] = ldiag[i]
        lrow[pos] = i
        pos += 1
        lptr[i + 1] = pos

    return lptr, lcol[:pos].copy(), lval[:pos].copy(), -1
