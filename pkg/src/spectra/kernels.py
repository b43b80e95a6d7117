"""Backend dispatch for the hot sparse loops.

``SPECTRA_BACKEND=numpy`` selects the pure-numpy path; the default is the
numba path whenever numba imports cleanly.  The choice is made once, at
import time.
"""
import os

from . import _kernels_numpy

BACKEND = os.environ.get("SPECTRA_BACKEND", "numba").strip().lower()
if BACKEND not in ("numba", "numpy"):
    raise ValueError(f"SPECTRA_BACKEND must be 'numba' or 'numpy', got {BACKEND!r}")

_impl = _kernels_numpy
if BACKEND == "numba":
    try:
        from . import _kernels_numba as _impl
    except ImportError:  # pragma: no cover - depends on the environment
        BACKEND = "numpy"

csr_matvec = _impl.csr_matvec
lower_solve = _impl.lower_solve
lower_transpose_solve = _impl.lower_transpose_solve
ic_factor_loop = _impl.ic_factor_loop
