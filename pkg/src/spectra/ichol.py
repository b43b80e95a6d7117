"""Dual-threshold incomplete Cholesky factorization IC(lfil, tau_ic)."""
import logging
from dataclasses import dataclass

import numpy as np

from . import kernels
from .sparse import SparseMatrix

log = logging.getLogger(__name__)

MAX_SHIFT_RETRIES = 8


class ICBreakdown(RuntimeError):
    """No admissible diagonal shift produced positive pivots."""


@dataclass(frozen=True, eq=False)
class ICFactor:
    """Lower-triangular factor L with P0 = (L L^T)^-1.

    ``L`` is stored in CSR with the diagonal as the last entry of every row.
    """

    n: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray
    fill_ratio: float
    lfil: int
    tau_ic: float
    shift_used: float = 0.0

    @property
    def nnz(self):
        return int(self.values.size)

    def diagonal(self):
        return self.values[self.row_ptr[1:] - 1]

    def toarray(self):
        L = np.zeros((self.n, self.n))
        rows = np.repeat(np.arange(self.n), np.diff(self.row_ptr))
        L[rows, self.col_idx] = self.values
        return L

    def apply(self, g):
        return apply_p0(self, g)


def factor(A: SparseMatrix, lfil=30, tau_ic=1e-2) -> ICFactor:
    """Incomplete Cholesky of ``A``; restarts with a diagonal shift on breakdown.

    The first shift is ``1e-3 * max(diag A)``, multiplied by 10 on every retry,
    at most :data:`MAX_SHIFT_RETRIES` times.  :class:`ICBreakdown` is raised
    when every attempt fails.
    """
    if lfil < 0 or tau_ic < 0:
        raise ValueError("lfil and tau_ic must be nonnegative")
    if not A.has_positive_diagonal:
        raise ValueError("incomplete Cholesky needs a strictly positive diagonal")
    lfil = int(min(lfil, A.n))
    shift = 0.0
    for attempt in range(MAX_SHIFT_RETRIES + 1):
        lptr, lcol, lval, bad = kernels.ic_factor_loop(
            A.n, A.row_ptr, A.col_idx, A.values, lfil, float(tau_ic), shift
        )
        if bad < 0:
            return ICFactor(
                n=A.n, row_ptr=lptr, col_idx=lcol, values=lval,
                fill_ratio=lval.size / A.nnz_lower, lfil=lfil, tau_ic=float(tau_ic),
                shift_used=shift,
            )
        shift = 1e-3 * float(A.diagonal.max()) if attempt == 0 else shift * 10.0
        if attempt < MAX_SHIFT_RETRIES:
            log.info("IC breakdown at row %d; restarting with shift %.3e", bad, shift)
    raise ICBreakdown(f"incomplete Cholesky failed after {MAX_SHIFT_RETRIES} shifted restarts")


def diagonal_factor(A: SparseMatrix) -> ICFactor:
    """Jacobi fallback ``L = sqrt(diag A)`` for when :func:`factor` breaks down."""
    d = np.sqrt(A.diagonal)
    return ICFactor(
        n=A.n, row_ptr=np.arange(A.n + 1, dtype=np.int64),
        col_idx=np.arange(A.n, dtype=np.int64), values=d,
        fill_ratio=A.n / A.nnz_lower, lfil=0, tau_ic=np.inf,
    )


def apply_p0(F: ICFactor, g):
    """Return ``(L L^T)^-1 g`` by forward then backward substitution."""
    g = np.asarray(g, dtype=np.float64)
    if g.shape != (F.n,):
        raise ValueError(f"dimension mismatch: factor is {F.n}, vector is {g.shape}")
    y = kernels.lower_solve(F.row_ptr, F.col_idx, F.values, g)
    return kernels.lower_transpose_solve(F.row_ptr, F.col_idx, F.values, y)
