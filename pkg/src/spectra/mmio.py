"""Matrix Market coordinate I/O for real symmetric matrices."""
import logging

import numpy as np

from .sparse import SparseMatrix

log = logging.getLogger(__name__)

_BANNER = "%%matrixmarket"


class MatrixMarketError(ValueError):
    pass


def load_matrix_market(path):
    """Read a ``coordinate real|integer symmetric`` file.

    Either triangle (or both) may be stored; the result always holds the full
    symmetric pattern.  A nonpositive diagonal only triggers a warning.
    """
    with open(path, "r") as fh:
        header = fh.readline()
        tokens = header.strip().lower().split()
        if len(tokens) != 5 or tokens[0] != _BANNER:
            raise MatrixMarketError(f"{path}: malformed Matrix Market banner: {header.strip()!r}")
        obj, fmt, field, symmetry = tokens[1:]
        if obj != "matrix" or fmt != "coordinate":
            raise MatrixMarketError(f"{path}: only 'matrix coordinate' files are supported")
        if field not in ("real", "integer", "double"):
            raise MatrixMarketError(f"{path}: field {field!r} is not real")
        if symmetry != "symmetric":
            raise MatrixMarketError(f"{path}: symmetry {symmetry!r} is not 'symmetric'")

        line = fh.readline()
        while line.startswith("%") or not line.strip():
            if not line:
                raise MatrixMarketError(f"{path}: missing size line")
            line = fh.readline()
        try:
            nrows, ncols, nnz = (int(t) for t in line.split())
        except ValueError:
            raise MatrixMarketError(f"{path}: malformed size line {line.strip()!r}") from None
        if nrows != ncols:
            raise MatrixMarketError(f"{path}: matrix is {nrows}x{ncols}, not square")

        data = np.loadtxt(fh, ndmin=2, comments="%") if nnz else np.empty((0, 3))
    if data.shape != (nnz, 3):
        raise MatrixMarketError(f"{path}: expected {nnz} entries, found {data.shape[0]}")

    i = data[:, 0].astype(np.int64) - 1
    j = data[:, 1].astype(np.int64) - 1
    v = data[:, 2]
    if nnz and (min(i.min(), j.min()) < 0 or max(i.max(), j.max()) >= nrows):
        raise MatrixMarketError(f"{path}: index out of range")

    # fold everything into the lower triangle, then mirror
    lo, hi = np.maximum(i, j), np.minimum(i, j)
    key = lo * nrows + hi
    uniq, first = np.unique(key, return_index=True)
    if uniq.size != key.size:
        # both triangles stored: mirrored duplicates must agree
        dup = np.ones(key.size, dtype=bool)
        dup[first] = False
        ref = dict(zip(key[first], v[first]))
        for k, val in zip(key[dup], v[dup]):
            if abs(ref[k] - val) > 1e-12 * max(1.0, abs(val)):
                raise MatrixMarketError(f"{path}: stored entries are not symmetric")
    lo, hi, v = lo[first], hi[first], v[first]
    off = lo != hi
    A = SparseMatrix.from_coo(
        nrows,
        np.concatenate([lo, hi[off]]),
        np.concatenate([hi, lo[off]]),
        np.concatenate([v, v[off]]),
    )
    if not A.has_positive_diagonal:
        log.warning("%s: nonpositive or missing diagonal entries; matrix is not SPD", path)
    return A


def write_matrix_market(A, path, comment=None):
    """Write the lower triangle in ``coordinate real symmetric`` form.

    Values are printed with 17 significant digits so that a reload is exact.
    """
    rows = np.repeat(np.arange(A.n), np.diff(A.row_ptr))
    lower = A.col_idx <= rows
    r, c, v = rows[lower] + 1, A.col_idx[lower] + 1, A.values[lower]
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate real symmetric\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{A.n} {A.n} {r.size}\n")
        for a, b, val in zip(r.tolist(), c.tolist(), v.tolist()):
            fh.write(f"{a} {b} {val!r}\n")
