"""DACG-Newton driver for the leftmost eigenpairs of a sparse SPD matrix."""
import dataclasses
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import ichol
from .bfgs import BfgsWindow, apply_preconditioner
from .dacg import DacgConfig, dacg_minimize, rayleigh_ritz_2d
from .deflation import DeflationBasis, ProjectedJacobian, eigenresidual, orthogonalize
from .pcg import INDEFINITE, PcgConfig, solve_correction
from .sparse import matvec
from .trace import DACG, NEWTON, ConvergenceTrace

log = logging.getLogger(__name__)


@dataclass
class SolverConfig:
    """Parameters of a DACG-Newton run; defaults follow the reference settings."""

    n_eig: int = 20
    tau: float = 1e-8
    itmax: int = 100
    dacg: DacgConfig = field(default_factory=DacgConfig)
    pcg: PcgConfig = field(default_factory=PcgConfig)
    lfil: int = 30
    tau_ic: float = 1e-2
    k_max: int = 5
    seed: int = 0
    keep_window: bool = False

    def __post_init__(self):
        if self.n_eig < 1:
            raise ValueError("n_eig must be at least 1")
        if not self.tau > 0 or self.itmax < 1:
            raise ValueError("tau must be positive and itmax at least 1")
        if self.k_max < 0:
            raise ValueError("k_max must be nonnegative")
        # the early PCG exit tests against the outer tolerance
        self.pcg = dataclasses.replace(self.pcg, tau_outer=self.tau)


@dataclass
class EigenPair:
    value: float
    vector: np.ndarray
    level: int
    outer_its: int
    mvp_dacg: int
    mvp_newton: int
    residual: float
    converged: bool
    dacg_its: int = 0


@dataclass
class NewtonStep:
    """State handed to ``step_hook``: everything defining J_k and P_k."""

    A: object
    factor: object
    level: int
    k: int
    theta: float
    u: np.ndarray
    basis: DeflationBasis
    window: BfgsWindow
    residual: float
    final: bool


def build_factor(A, cfg, trace=None):
    """IC factor with the diagonal fallback on unrecoverable breakdown."""
    t0 = time.perf_counter()
    try:
        F = ichol.factor(A, cfg.lfil, cfg.tau_ic)
        fallback = False
    except ichol.ICBreakdown:
        log.warning("incomplete Cholesky broke down; using the diagonal preconditioner")
        F = ichol.diagonal_factor(A)
        fallback = True
    if trace is not None:
        trace.wall["IC"] += time.perf_counter() - t0
        trace.info.update(fill_ratio=F.fill_ratio, ic_shift=F.shift_used, ic_fallback=fallback)
    return F


def initial_vectors(n, seed):
    """Endless stream of fixed-seed random starting vectors."""
    rng = np.random.default_rng(seed)
    while True:
        yield rng.standard_normal(n)


def newton_level(A, F, deflate, u, Au, cfg, window, trace, level, step_hook=None):
    """Newton iteration for one eigenpair starting from the unit vector ``u``.

    Returns ``(u, theta, rnorm, outer_its)``.  ``window`` is updated in place.
    """
    theta, r, rnorm = eigenresidual(A, u, trace, Au=Au)
    Au = r + theta * u
    trace.record(level, NEWTON, 0, 0, rnorm / theta, theta)
    k = 0
    inner = 0
    while rnorm > cfg.tau * theta and k < cfg.itmax:
        Q = deflate.with_column(u)
        if step_hook is not None:
            step_hook(NewtonStep(A, F, level, k, theta, u, Q, window, rnorm, False))
        rk = Q.project(r)
        J = ProjectedJacobian(A, theta, Q, trace)

        def precond(g, Q=Q):
            return apply_preconditioner(window, F, Q, g)

        def on_iter(l, gnorm, eig, theta_p, k=k, base=inner):
            trace.record(level, NEWTON, k, base + l, eig / theta_p, theta_p)

        out = solve_correction(J, -rk, precond, cfg.pcg, u, Au, callback=on_iter)
        inner += out.iterations
        s = out.s
        snorm = float(np.linalg.norm(s))
        ortho = float(np.linalg.norm(Q.Q.T @ s)) / snorm if snorm else 0.0
        if snorm > 0.0:
            t = u + s
            u_new = t / np.linalg.norm(t)
        elif out.exit_reason == INDEFINITE:
            # no usable correction: fall back to a Rayleigh-Ritz step along p
            p = out.direction
            step = rayleigh_ritz_2d(u, Au, p, matvec(A, p, trace))
            u_new = u if step is None else step[0]
            trace.note(f"level {level} step {k}: indefinite Jacobian, Rayleigh-Ritz fallback")
        else:
            u_new = u
        u_new = orthogonalize(u_new, deflate)
        u_new /= np.linalg.norm(u_new)
        accepted = window.push(s, rk) if snorm > 0.0 else False

        u = u_new
        rnorm_old = rnorm
        theta, r, rnorm = eigenresidual(A, u, trace)
        Au = r + theta * u
        k += 1
        trace.record(level, NEWTON, k, inner, rnorm / theta, theta)
        trace.steps.append(dict(
            level=level, k=k, pcg_its=out.iterations, exit=out.exit_reason,
            ortho_s=ortho, min_zeta=out.min_zeta, pair_accepted=accepted,
            res_before=rnorm_old, res_after=rnorm, theta=theta,
        ))
    if step_hook is not None:
        step_hook(NewtonStep(A, F, level, k, theta, u, deflate.with_column(u), window,
                             rnorm, True))
    return u, theta, rnorm, k


def solve_leftmost(A, cfg=None, deflate=None, factor=None, step_hook=None):
    """Leftmost ``cfg.n_eig`` eigenpairs of the SPD matrix ``A``.

    ``deflate`` holds known orthonormal vectors to exclude (e.g. the constant
    null vector of a graph Laplacian).  ``factor`` reuses an existing IC
    factor.  Returns ``(pairs, trace)``; pairs are sorted by eigenvalue and
    carry a ``converged`` flag, levels that hit ``itmax`` included.
    """
    cfg = cfg or SolverConfig()
    if not A.has_positive_diagonal:
        raise ValueError("matrix diagonal is not strictly positive; A is not SPD")
    trace = ConvergenceTrace()
    F = factor if factor is not None else build_factor(A, cfg, trace)
    if factor is not None:
        trace.info.update(fill_ratio=F.fill_ratio, ic_shift=F.shift_used, ic_fallback=False)
    Qt = deflate if deflate is not None else DeflationBasis(A.n)
    starts = initial_vectors(A.n, cfg.seed)
    window = BfgsWindow(cfg.k_max, A.n)
    pairs = []
    for level in range(1, cfg.n_eig + 1):
        for attempt in range(3):
            if not cfg.keep_window:
                window.clear()
            m0 = trace.mvp
            with trace.phase(DACG):
                warm = dacg_minimize(A, F, Qt, next(starts), cfg.dacg, trace, level)
            m1 = trace.mvp
            with trace.phase(NEWTON):
                u, theta, rnorm, its = newton_level(
                    A, F, Qt, warm.u, warm.Au, cfg, window, trace, level, step_hook)
            if not _duplicate(u, theta, pairs):
                break
            trace.note(f"level {level}: converged to a known pair, restarting")
        converged = rnorm <= cfg.tau * theta
        if not converged:
            log.warning("level %d: outer itmax reached (residual %.2e)", level, rnorm / theta)
        pairs.append(EigenPair(theta, u, level, its, m1 - m0, trace.mvp - m1,
                               rnorm / theta, converged, warm.iterations))
        Qt = Qt.with_column(u)
    pairs.sort(key=lambda p: p.value)
    return pairs, trace


def solve_dacg_only(A, cfg=None, deflate=None, factor=None):
    """Baseline: DACG alone, run to the outer tolerance ``cfg.tau`` at every level."""
    cfg = cfg or SolverConfig()
    trace = ConvergenceTrace()
    F = factor if factor is not None else build_factor(A, cfg, trace)
    dcfg = dataclasses.replace(cfg.dacg, tau_dacg=cfg.tau)
    Qt = deflate if deflate is not None else DeflationBasis(A.n)
    starts = initial_vectors(A.n, cfg.seed)
    pairs = []
    for level in range(1, cfg.n_eig + 1):
        m0 = trace.mvp
        with trace.phase(DACG):
            res = dacg_minimize(A, F, Qt, next(starts), dcfg, trace, level)
        pairs.append(EigenPair(res.theta, res.u, level, 0, trace.mvp - m0, 0,
                               res.residual / res.theta, res.converged, res.iterations))
        Qt = Qt.with_column(res.u)
    pairs.sort(key=lambda p: p.value)
    return pairs, trace


def _duplicate(u, theta, pairs):
    return any(abs(theta - p.value) < 1e-12 * abs(p.value) and abs(u @ p.vector) > 0.5
               for p in pairs)


@dataclass
class ComparisonRow:
    k_max: int
    itmax_pcg: int
    dacg_its: int
    dacg_mvp: int
    dacg_cpu: float
    outer_its: int
    newton_mvp: int
    newton_cpu: float
    converged: bool

    @property
    def total_mvp(self):
        return self.dacg_mvp + self.newton_mvp

    @property
    def total_cpu(self):
        return self.dacg_cpu + self.newton_cpu


def summarize(pairs, trace, cfg):
    return ComparisonRow(
        k_max=cfg.k_max, itmax_pcg=cfg.pcg.itmax_pcg,
        dacg_its=sum(p.dacg_its for p in pairs),
        dacg_mvp=trace.mvp_by_phase[DACG], dacg_cpu=trace.wall[DACG],
        outer_its=sum(p.outer_its for p in pairs),
        newton_mvp=trace.mvp_by_phase[NEWTON], newton_cpu=trace.wall[NEWTON],
        converged=all(p.converged for p in pairs),
    )


def run_comparison(A, cfg, kmax_list, deflate=None, factor=None):
    """One :func:`solve_leftmost` per ``k_max``, sharing the IC factor and seed.

    Returns ``(rows, runs)`` where ``runs[i] = (pairs, trace)``.
    """
    F = factor if factor is not None else build_factor(A, cfg)
    rows, runs = [], []
    for k_max in kmax_list:
        run_cfg = dataclasses.replace(cfg, k_max=int(k_max))
        pairs, trace = solve_leftmost(A, run_cfg, deflate=deflate, factor=F)
        rows.append(summarize(pairs, trace, run_cfg))
        runs.append((pairs, trace))
    return rows, runs


def format_comparison(rows, title=None):
    """Aligned text table in the DACG / Newton / TOT column layout."""
    head = (f"{'itmax_pcg':>9} {'k_max':>5} | {'DACG its':>8} {'CPU':>7} | "
            f"{'outer its':>9} {'MVP':>6} {'CPU':>7} || {'MVP':>6} {'CPU':>7}")
    lines = [title] if title else []
    lines += [head, "-" * len(head)]
    for r in rows:
        if r.converged:
            newton = f"{r.outer_its:>9} {r.newton_mvp:>6} {r.newton_cpu:>7.2f}"
            total = f"{r.total_mvp:>6} {r.total_cpu:>7.2f}"
        else:
            newton = f"{'‡':>9} {'‡':>6} {'‡':>7}"
            total = f"{'--':>6} {'--':>7}"
        lines.append(f"{r.itmax_pcg:>9} {r.k_max:>5} | {r.dacg_its:>8} {r.dacg_cpu:>7.2f} | "
                     f"{newton} || {total}")
    lines.append("‡ = no convergence")
    return "\n".join(lines)
