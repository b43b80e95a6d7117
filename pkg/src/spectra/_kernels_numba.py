"""numba-compiled sparse kernels (default backend)."""
import numpy as np
from numba import njit

from . import _kernels_numpy


@njit(cache=True)
def csr_matvec(row_ptr, col_idx, values, x):
    n = row_ptr.shape[0] - 1
    y = np.empty(n)
    for i in range(n):
        acc = 0.0
        for p in range(row_ptr[i], row_ptr[i + 1]):
            acc += values[p] * x[col_idx[p]]
        y[i] = acc
    return y


@njit(cache=True)
def lower_solve(row_ptr, col_idx, values, b):
    n = row_ptr.shape[0] - 1
    y = np.empty(n)
    for i in range(n):
        e = row_ptr[i + 1] - 1
        acc = b[i]
        for p in range(row_ptr[i], e):
            acc -= values[p] * y[col_idx[p]]
        y[i] = acc / values[e]
    return y


@njit(cache=True)
def lower_transpose_solve(row_ptr, col_idx, values, b):
    n = row_ptr.shape[0] - 1
    x = b.copy()
    for i in range(n - 1, -1, -1):
        e = row_ptr[i + 1] - 1
        xi = x[i] / values[e]
        x[i] = xi
        for p in range(row_ptr[i], e):
            x[col_idx[p]] -= values[p] * xi
    return x


ic_factor_loop = njit(cache=True)(_kernels_numpy.ic_factor_loop)
