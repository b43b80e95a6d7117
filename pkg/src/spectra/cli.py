"""``spectra`` command line: load or generate a matrix, solve, write CSV and a report."""
import argparse
import csv
import dataclasses
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .dacg import DacgConfig
from .deflation import DeflationBasis
from .jd import JdConfig, jd_solve
from .mmio import MatrixMarketError, load_matrix_market, write_matrix_market
from .newton import (
    SolverConfig, build_factor, format_comparison, solve_dacg_only, solve_leftmost, summarize,
)
from .pcg import PcgConfig
from .sparse import SparseFormatError, generate_laplacian
from .trace import TRACE_COLUMNS

log = logging.getLogger("spectra")

SCHEMA = "v1"
SUMMARY_COLUMNS = ("solver", "k_max", "itmax_pcg", "level", "eigenvalue", "rel_residual",
                   "converged", "outer_its", "dacg_its", "mvp_dacg", "mvp_newton", "run_wall_s")
COMPARISON_COLUMNS = ("solver", "itmax_pcg", "k_max", "dacg_its", "mvp_dacg", "outer_its",
                      "mvp_newton", "mvp_total", "converged",
                      "wall_dacg_s", "wall_newton_s", "wall_total_s")

GENERATORS = {"path1d": "path-1d", "grid2d": "grid-2d", "grid3d": "grid-3d", "graph": "graph"}

EXIT_OK, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")
    if not vals or min(vals) < 0:
        raise argparse.ArgumentTypeError(f"expected nonnegative integers, got {text!r}")
    return vals


def build_parser():
    p = _Parser(prog="spectra",
                description="Leftmost eigenpairs of a sparse SPD matrix by DACG-Newton.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", metavar="PATH", help="symmetric Matrix Market file")
    src.add_argument("--generate", metavar="KIND:SIZE",
                     help="grid2d:20, grid2d:20x30, grid3d:8, path1d:100 or graph:1000[:seed]")
    p.add_argument("--solver", choices=("dacg-newton", "jd", "dacg-pure"), default="dacg-newton")
    p.add_argument("--neig", type=int, default=20)
    p.add_argument("--tau", type=float, default=1e-8)
    p.add_argument("--itmax", type=int, default=100)
    p.add_argument("--tau-dacg", type=float, default=1e-2)
    p.add_argument("--itmax-dacg", type=int, default=5000)
    p.add_argument("--beta", choices=("fletcher-reeves", "polak-ribiere"),
                   default="fletcher-reeves")
    p.add_argument("--tau-pcg", type=float, default=1e-2)
    p.add_argument("--itmax-pcg", type=int, default=20)
    p.add_argument("--lfil", type=int, default=30)
    p.add_argument("--tau-ic", type=float, default=1e-2)
    p.add_argument("--kmax", type=int, default=5)
    p.add_argument("--kmax-sweep", type=_int_list, metavar="LIST",
                   help="comma separated k_max values, one run each")
    p.add_argument("--itmax-pcg-sweep", type=_int_list, metavar="LIST",
                   help="comma separated itmax_pcg values, one run each")
    p.add_argument("--m-min", type=int, default=5, help="JD restart size")
    p.add_argument("--m-max", type=int, default=10, help="JD maximum subspace size")
    p.add_argument("--deflate-constant", action="store_true",
                   help="deflate the constant vector (singular graph Laplacians)")
    p.add_argument("--graph-shift", type=float, default=None, metavar="EPS",
                   help="shift generated graphs by EPS*I instead of deflating the constant")
    p.add_argument("--seed", type=int, default=0, help="overridden by SPECTRA_SEED")
    p.add_argument("--out", default="spectra-out", metavar="DIR")
    p.add_argument("--export-matrix", metavar="PATH", help="also write the matrix to PATH")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def parse_generator(spec, shift=None):
    """``(matrix, deflate_constant)`` from a ``kind:size`` generator spec."""
    parts = spec.split(":")
    kind = GENERATORS.get(parts[0])
    if kind is None or len(parts) < 2:
        raise UsageError(f"bad generator spec {spec!r}")
    try:
        dims = [int(d) for d in parts[1].lower().split("x")]
        seed = int(parts[2]) if len(parts) > 2 else 0
    except ValueError:
        raise UsageError(f"bad generator spec {spec!r}")
    if kind == "graph":
        if len(dims) != 1 or len(parts) > 3:
            raise UsageError(f"bad generator spec {spec!r}")
        A = generate_laplacian("graph", dims[0], seed=seed, shift=shift or 0.0)
        return A, not shift
    if len(parts) > 2:
        raise UsageError(f"bad generator spec {spec!r}")
    try:
        return generate_laplacian(kind, *dims), False
    except ValueError as exc:
        raise UsageError(str(exc))


def _configs(args, seed):
    try:
        dacg = DacgConfig(tau_dacg=args.tau_dacg, itmax_dacg=args.itmax_dacg, beta=args.beta)
        pcg = PcgConfig(tau_pcg=args.tau_pcg, itmax_pcg=args.itmax_pcg)
        cfg = SolverConfig(n_eig=args.neig, tau=args.tau, itmax=args.itmax, dacg=dacg, pcg=pcg,
                           lfil=args.lfil, tau_ic=args.tau_ic, k_max=args.kmax, seed=seed)
        jd = JdConfig(n_eig=args.neig, m_min=args.m_min, m_max=args.m_max, tau=args.tau,
                      itmax=args.itmax, pcg=pcg, seed=seed)
    except ValueError as exc:
        raise UsageError(str(exc))
    return cfg, jd


def _run_specs(args, cfg):
    kmax = args.kmax_sweep or [cfg.k_max]
    itpcg = args.itmax_pcg_sweep or [cfg.pcg.itmax_pcg]
    for it in itpcg:
        for k in kmax:
            yield dataclasses.replace(cfg, k_max=k,
                                      pcg=dataclasses.replace(cfg.pcg, itmax_pcg=it))


def _fmt(x):
    return f"{x:.16e}"


def _write_csv(path, name, columns, rows):
    with open(path, "w", newline="") as fh:
        fh.write(f"# spectra {name} {SCHEMA}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)


def execute(args):
    """Run the solver(s) described by parsed ``args``; returns the exit code."""
    env_seed = os.environ.get("SPECTRA_SEED")
    try:
        seed = int(env_seed) if env_seed else args.seed
    except ValueError:
        raise UsageError(f"SPECTRA_SEED must be an integer, got {env_seed!r}")
    cfg, jd_cfg = _configs(args, seed)

    if args.matrix:
        try:
            A = load_matrix_market(args.matrix)
        except FileNotFoundError:
            raise UsageError(f"matrix file not found: {args.matrix}")
        except (MatrixMarketError, SparseFormatError) as exc:
            raise UsageError(f"cannot read {args.matrix}: {exc}")
        deflate_const = args.deflate_constant
        source = args.matrix
    else:
        A, deflate_const = parse_generator(args.generate, args.graph_shift)
        deflate_const = deflate_const or args.deflate_constant
        source = args.generate
    if not A.has_positive_diagonal:
        raise UsageError("matrix diagonal is not strictly positive; A is not SPD")
    n_avail = A.n - (1 if deflate_const else 0)
    if cfg.n_eig > n_avail:
        raise UsageError(f"--neig {cfg.n_eig} exceeds the available dimension {n_avail}")
    deflate = DeflationBasis(A.n, np.full((A.n, 1), 1.0 / np.sqrt(A.n))) if deflate_const else None

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".spectra-write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise UsageError(f"output directory {out} is not writable: {exc}")
    if args.export_matrix:
        write_matrix_market(A, args.export_matrix, comment=f"generated from {source}")

    t_ic = time.perf_counter()
    F = build_factor(A, cfg)
    t_ic = time.perf_counter() - t_ic

    runs = []
    if args.solver == "jd":
        t0 = time.perf_counter()
        pairs, trace = jd_solve(A, F, jd_cfg, deflate=deflate)
        runs.append(("jd", cfg, pairs, trace, time.perf_counter() - t0))
    elif args.solver == "dacg-pure":
        t0 = time.perf_counter()
        pairs, trace = solve_dacg_only(A, cfg, deflate=deflate, factor=F)
        runs.append(("dacg-pure", cfg, pairs, trace, time.perf_counter() - t0))
    else:
        for run_cfg in _run_specs(args, cfg):
            t0 = time.perf_counter()
            pairs, trace = solve_leftmost(A, run_cfg, deflate=deflate, factor=F)
            runs.append(("dacg-newton", run_cfg, pairs, trace, time.perf_counter() - t0))

    summary, comparison, trace_rows, table = [], [], [], []
    for solver, rc, pairs, trace, wall in runs:
        for p in pairs:
            summary.append((solver, rc.k_max, rc.pcg.itmax_pcg, p.level, _fmt(p.value),
                            f"{p.residual:.6e}", int(p.converged), p.outer_its, p.dacg_its,
                            p.mvp_dacg, p.mvp_newton, f"{wall:.4f}"))
        row = summarize(pairs, trace, rc)
        if solver == "jd":
            row = dataclasses.replace(row, newton_mvp=trace.mvp, newton_cpu=wall)
        table.append(row)
        comparison.append((solver, row.itmax_pcg, row.k_max, row.dacg_its, row.dacg_mvp,
                           row.outer_its, row.newton_mvp, row.total_mvp, int(row.converged),
                           f"{row.dacg_cpu:.4f}", f"{row.newton_cpu:.4f}",
                           f"{row.total_cpu:.4f}"))
        for tr in trace.rows:
            trace_rows.append((solver, rc.k_max, rc.pcg.itmax_pcg, tr.level, tr.phase,
                               tr.outer_iter, tr.inner_iter, tr.cumulative_mvp,
                               f"{tr.eigenresidual_rel:.6e}", _fmt(tr.theta)))

    _write_csv(out / "summary.csv", "summary", SUMMARY_COLUMNS, summary)
    _write_csv(out / "comparison.csv", "comparison", COMPARISON_COLUMNS, comparison)
    _write_csv(out / "trace.csv", "trace", ("solver", "k_max", "itmax_pcg") + TRACE_COLUMNS,
               trace_rows)

    lines = [
        f"spectra {__version__} report",
        f"matrix: {source}  n={A.n}  nnz={A.nnz}  nnz_lower={A.nnz_lower}",
        f"IC factor: lfil={F.lfil} tau_ic={F.tau_ic:g} fill ratio sigma={F.fill_ratio:.3f}"
        f" shift={F.shift_used:g} wall={t_ic:.3f}s",
        f"solver: {args.solver}  neig={cfg.n_eig} tau={cfg.tau:g} itmax={cfg.itmax}"
        f" tau_dacg={cfg.dacg.tau_dacg:g} tau_pcg={cfg.pcg.tau_pcg:g} seed={seed}",
    ]
    if deflate_const:
        lines.append("constant null vector deflated")
    lines += ["", format_comparison(table, "comparison (MVP and wall clock in seconds)"), ""]
    for solver, rc, pairs, trace, wall in runs:
        phases = "  ".join(f"{k}={v:.3f}s" for k, v in sorted(trace.wall.items()))
        lines.append(f"[{solver} k_max={rc.k_max} itmax_pcg={rc.pcg.itmax_pcg}] "
                     f"wall {wall:.3f}s  phases: {phases}  MVP={trace.mvp}")
        for p in pairs:
            flag = "" if p.converged else "  NOT CONVERGED"
            lines.append(f"  {p.level:3d}  {p.value:.12e}  res={p.residual:.2e}{flag}")
        lines += [f"  note: {e}" for e in trace.events]
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))

    ok = all(p.converged for _, _, pairs, _, _ in runs for p in pairs)
    return EXIT_OK if ok else EXIT_PARTIAL


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return execute(args)
    except UsageError as exc:
        print(f"spectra: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
