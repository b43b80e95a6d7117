"""Symmetric CSR storage, the counted matvec, and test-matrix generators."""
from dataclasses import dataclass, field

import numpy as np

from . import kernels


class SparseFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Symmetric matrix in CSR form with both triangles stored.

    Construction validates the structure (pointer monotonicity, strictly
    increasing columns) and numerical symmetry.  Positivity of the diagonal is
    reported by :attr:`has_positive_diagonal` rather than enforced, since a
    loaded file may legitimately fail it and SPD is checked by the solvers.
    """

    n: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray
    _diag: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        row_ptr = np.ascontiguousarray(self.row_ptr, dtype=np.int64)
        col_idx = np.ascontiguousarray(self.col_idx, dtype=np.int64)
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        for arr in (row_ptr, col_idx, values):
            arr.setflags(write=False)
        object.__setattr__(self, "row_ptr", row_ptr)
        object.__setattr__(self, "col_idx", col_idx)
        object.__setattr__(self, "values", values)
        self._validate()
        rows = np.repeat(np.arange(self.n), np.diff(row_ptr))
        diag = np.zeros(self.n)
        on_diag = rows == col_idx
        diag[rows[on_diag]] = values[on_diag]
        diag.setflags(write=False)
        object.__setattr__(self, "_diag", diag)

    def _validate(self):
        n, rp, ci, v = self.n, self.row_ptr, self.col_idx, self.values
        if n < 1:
            raise SparseFormatError("matrix dimension must be positive")
        if rp.shape != (n + 1,) or rp[0] != 0 or rp[-1] != ci.size:
            raise SparseFormatError("row_ptr must have n+1 entries, start at 0 and end at nnz")
        if ci.size != v.size:
            raise SparseFormatError("col_idx and values differ in length")
        if np.any(np.diff(rp) < 0):
            raise SparseFormatError("row_ptr is not nondecreasing")
        if ci.size and (ci.min() < 0 or ci.max() >= n):
            raise SparseFormatError("column index out of range")
        rows = np.repeat(np.arange(n), np.diff(rp))
        same_row = rows[1:] == rows[:-1]
        if np.any(ci[1:][same_row] <= ci[:-1][same_row]):
            raise SparseFormatError("column indices must be strictly increasing within a row")
        if not np.all(np.isfinite(v)):
            raise SparseFormatError("non-finite matrix entry")
        # symmetry: the transposed pattern, sorted the same way, must coincide
        order = np.lexsort((rows, ci))
        if not (np.array_equal(ci[order], rows) and np.array_equal(rows[order], ci)):
            raise SparseFormatError("pattern is not symmetric")
        vt = v[order]
        if np.any(np.abs(v - vt) > 1e-12 * np.maximum(1.0, np.abs(v))):
            raise SparseFormatError("values are not symmetric")

    @property
    def nnz(self):
        return int(self.values.size)

    @property
    def diagonal(self):
        return self._diag

    @property
    def has_positive_diagonal(self):
        return bool(np.all(self._diag > 0))

    @property
    def nnz_lower(self):
        """Stored entries in the lower triangle, diagonal included."""
        return (self.nnz + int(np.count_nonzero(self._diag))) // 2

    def frobenius_norm(self):
        return float(np.linalg.norm(self.values))

    def toarray(self):
        dense = np.zeros((self.n, self.n))
        rows = np.repeat(np.arange(self.n), np.diff(self.row_ptr))
        dense[rows, self.col_idx] = self.values
        return dense

    @classmethod
    def from_coo(cls, n, rows, cols, vals):
        """Build from full-pattern triplets; duplicates are summed."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        key = rows * n + cols
        uniq, inv = np.unique(key, return_inverse=True)
        summed = np.zeros(uniq.size)
        np.add.at(summed, inv, vals)
        r, c = np.divmod(uniq, n)
        row_ptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(row_ptr, r + 1, 1)
        return cls(n, np.cumsum(row_ptr), c, summed)

    @classmethod
    def from_dense(cls, dense, tol=0.0):
        dense = np.asarray(dense, dtype=np.float64)
        r, c = np.nonzero(np.abs(dense) > tol)
        return cls.from_coo(dense.shape[0], r, c, dense[r, c])


def matvec(A, x, trace=None):
    """Return ``A @ x``; counts one MVP on ``trace`` when given."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (A.n,):
        raise ValueError(f"dimension mismatch: matrix is {A.n}, vector is {x.shape}")
    if trace is not None:
        trace.mvp += 1
    return kernels.csr_matvec(A.row_ptr, A.col_idx, A.values, x)


def rayleigh_quotient(A, u, trace=None):
    u = np.asarray(u, dtype=np.float64)
    uu = float(u @ u)
    if uu == 0.0:
        raise ValueError("Rayleigh quotient of the zero vector")
    return float(u @ matvec(A, u, trace)) / uu


def _edges_to_laplacian(n, i, j, w, shift=0.0):
    """Graph Laplacian (or Dirichlet stencil) from undirected weighted edges."""
    deg = np.zeros(n)
    np.add.at(deg, i, w)
    np.add.at(deg, j, w)
    ar = np.arange(n)
    rows = np.concatenate([ar, i, j])
    cols = np.concatenate([ar, j, i])
    vals = np.concatenate([deg + shift, -w, -w])
    return SparseMatrix.from_coo(n, rows, cols, vals)


def _grid_edges(shape):
    idx = np.arange(int(np.prod(shape))).reshape(shape)
    src, dst = [], []
    for axis in range(len(shape)):
        lo = [slice(None)] * len(shape)
        hi = [slice(None)] * len(shape)
        lo[axis] = slice(0, -1)
        hi[axis] = slice(1, None)
        src.append(idx[tuple(lo)].ravel())
        dst.append(idx[tuple(hi)].ravel())
    return np.concatenate(src), np.concatenate(dst)


def generate_laplacian(kind, *dims, degree=4, shortcuts=0.05, max_weight=3,
                       shift=0.0, seed=0):
    """Finite-difference or graph Laplacian.

    ``path-1d n``, ``grid-2d nx [ny]``, ``grid-3d nx [ny nz]`` give the
    Dirichlet 3/5/7-point stencils (diagonal ``2*d``).  ``graph n`` builds a
    connected small-world graph: a ring where every node links to its
    ``degree // 2`` nearest neighbours on each side, plus ``shortcuts * n``
    random chords, with integer weights in ``[1, max_weight]``.  The graph
    Laplacian is singular (constant null vector) unless ``shift > 0``.
    """
    if not dims or any(int(d) < 1 for d in dims):
        raise ValueError(f"sizes must be positive, got {dims}")
    dims = tuple(int(d) for d in dims)
    if kind == "path-1d":
        shape = dims[:1]
    elif kind == "grid-2d":
        shape = dims[:2] if len(dims) >= 2 else dims * 2
    elif kind == "grid-3d":
        shape = dims[:3] if len(dims) >= 3 else (dims[0],) * 3
    elif kind == "graph":
        return _small_world(dims[0], degree, shortcuts, max_weight, shift, seed)
    else:
        raise ValueError(f"unknown Laplacian kind {kind!r}")
    n = int(np.prod(shape))
    i, j = _grid_edges(shape)
    A = _edges_to_laplacian(n, i, j, np.ones(i.size))
    # Dirichlet boundary: every node sees 2*d neighbours, present or not
    ar = np.arange(n)
    boundary_fix = 2.0 * len(shape) - A.diagonal
    if np.any(boundary_fix):
        fix = SparseMatrix.from_coo(n, ar, ar, boundary_fix)
        A = _add(A, fix)
    return A


def _add(A, B):
    ra = np.repeat(np.arange(A.n), np.diff(A.row_ptr))
    rb = np.repeat(np.arange(B.n), np.diff(B.row_ptr))
    return SparseMatrix.from_coo(
        A.n,
        np.concatenate([ra, rb]),
        np.concatenate([A.col_idx, B.col_idx]),
        np.concatenate([A.values, B.values]),
    )


def _small_world(n, degree, shortcuts, max_weight, shift, seed):
    if n < 3:
        raise ValueError("graph Laplacian needs at least 3 nodes")
    rng = np.random.default_rng(seed)
    half = max(1, degree // 2)
    ring_i, ring_j = [], []
    for h in range(1, min(half, (n - 1) // 2) + 1):
        ring_i.append(np.arange(n))
        ring_j.append((np.arange(n) + h) % n)
    i = np.concatenate(ring_i)
    j = np.concatenate(ring_j)
    m = int(round(shortcuts * n))
    if m:
        ci = rng.integers(0, n, size=m)
        cj = rng.integers(0, n, size=m)
        i = np.concatenate([i, ci])
        j = np.concatenate([j, cj])
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    keep = lo != hi
    pairs = np.unique(np.stack([lo[keep], hi[keep]], axis=1), axis=0)
    w = rng.integers(1, max_weight + 1, size=pairs.shape[0]).astype(np.float64)
    return _edges_to_laplacian(n, pairs[:, 0], pairs[:, 1], w, shift)
