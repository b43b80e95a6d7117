"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_backends.py [--grid 60] [--repeat 5]

Kernels are timed in-process by importing both backend modules directly.
The end-to-end solve runs in a subprocess per backend because the backend
is fixed when ``spectra.kernels`` is imported.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from spectra import _kernels_numba as nb
from spectra import _kernels_numpy as npk
from spectra import ichol
from spectra.sparse import generate_laplacian

SOLVE_SNIPPET = """
import time
from spectra import SolverConfig, generate_laplacian, solve_leftmost
A = generate_laplacian("grid-2d", {g}, {g})
solve_leftmost(generate_laplacian("grid-2d", 5, 5), SolverConfig(n_eig=2))
t0 = time.perf_counter()
solve_leftmost(A, SolverConfig(n_eig={neig}))
print(time.perf_counter() - t0)
"""


def best_of(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05 and number < 10_000:
        number *= 4
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def solve_time(backend, grid, neig):
    env = dict(os.environ, SPECTRA_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", SOLVE_SNIPPET.format(g=grid, neig=neig)],
                         env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=60)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--neig", type=int, default=5)
    ap.add_argument("--skip-solve", action="store_true")
    args = ap.parse_args()

    A = generate_laplacian("grid-2d", args.grid, args.grid)
    F = ichol.factor(A, 30, 1e-2)
    x = np.random.default_rng(0).standard_normal(A.n)
    csr = (A.row_ptr, A.col_idx, A.values)
    low = (F.row_ptr, F.col_idx, F.values)

    cases = {
        "matvec": (lambda: nb.csr_matvec(*csr, x), lambda: npk.csr_matvec(*csr, x)),
        "lower_solve": (lambda: nb.lower_solve(*low, x), lambda: npk.lower_solve(*low, x)),
        "lower_T_solve": (lambda: nb.lower_transpose_solve(*low, x),
                          lambda: npk.lower_transpose_solve(*low, x)),
        "ic_factor": (lambda: nb.ic_factor_loop(A.n, *csr, 30, 1e-2, 0.0),
                      lambda: npk.ic_factor_loop(A.n, *csr, 30, 1e-2, 0.0)),
    }
    print(f"grid {args.grid}x{args.grid}  n={A.n}  nnz={A.nnz}")
    print(f"{'kernel':<14} {'numba [s]':>12} {'numpy [s]':>12} {'speedup':>8}")
    for name, (fast, slow) in cases.items():
        fast()  # compile
        tf = best_of(fast, args.repeat)
        ts = best_of(slow, 1 if name == "ic_factor" else args.repeat)
        print(f"{name:<14} {tf:12.3e} {ts:12.3e} {ts / tf:8.1f}")

    if not args.skip_solve:
        tf = solve_time("numba", args.grid, args.neig)
        ts = solve_time("numpy", args.grid, args.neig)
        print(f"{'solve':<14} {tf:12.3e} {ts:12.3e} {ts / tf:8.1f}")


if __name__ == "__main__":
    main()
