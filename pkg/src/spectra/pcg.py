"""PCG on the projected correction equation with a dynamic exit strategy."""
from dataclasses import dataclass, field

import numpy as np

LINEAR_TOL = "linear-tol"
EIGEN_TOL = "eigen-tol"
STAGNATION = "stagnation"
MAXIT = "maxit"
INDEFINITE = "indefinite"


@dataclass
class PcgConfig:
    tau_pcg: float = 1e-2
    itmax_pcg: int = 20
    tau_outer: float = 1e-8
    stagnation_window: int = 2
    eig_check_stride: int = 1

    def __post_init__(self):
        if not 0.0 < self.tau_pcg < 1.0:
            raise ValueError("tau_pcg must lie in (0, 1)")
        if self.itmax_pcg < 1:
            raise ValueError("itmax_pcg must be at least 1")
        if self.stagnation_window < 1 or self.eig_check_stride < 1:
            raise ValueError("stagnation_window and eig_check_stride must be positive")


@dataclass
class PcgOutcome:
    s: np.ndarray
    iterations: int
    exit_reason: str
    # per iteration: (||g_l||, ||A x'_l - theta'_l x'_l||, theta'_l), x'_l = (u+x_l)/||u+x_l||
    trace: list = field(default_factory=list)
    min_zeta: float = np.inf
    direction: np.ndarray = None


def solve_correction(J, rhs, precond, cfg, u, Au, callback=None):
    """Solve ``J s = rhs`` for ``s`` orthogonal to ``J.basis``, starting from zero.

    ``precond`` maps a residual ``g`` (orthogonal to the basis) to ``P_k g``.
    ``u`` is the current unit iterate and ``Au`` its product with A; together
    with the ``A p`` products returned by the Jacobian they give the
    eigenresidual of ``(u + x_l)/||u + x_l||`` at no extra matvec cost.

    Exits on the first of: relative linear residual below ``tau_pcg``,
    eigenresidual below ``tau_outer * theta'``, the eigenresidual decreasing
    more slowly than the linear residual for ``stagnation_window``
    consecutive iterations, or ``itmax_pcg`` iterations.  A nonpositive
    curvature ``p^T J p`` aborts with reason ``indefinite`` and the last
    iterate.  ``callback(l, ||g_l||, eigenresidual, theta')`` runs after every
    iteration.
    """
    n = rhs.shape[0]
    x = np.zeros(n)
    Ax = np.zeros(n)
    g = np.array(rhs, dtype=np.float64)
    gnorm0 = float(np.linalg.norm(g))
    out = PcgOutcome(s=x, iterations=0, exit_reason=LINEAR_TOL)
    if gnorm0 == 0.0:
        return out

    prev_eig = float(np.linalg.norm(Au - (u @ Au) * u))
    prev_g = gnorm0
    slow = 0
    c = precond(g)
    zeta = float(g @ c)
    out.min_zeta = zeta
    p = c
    l = 0
    while True:
        Jp, Ap = J.apply_with_product(p)
        curv = float(p @ Jp)
        if not curv > 0.0:
            out.exit_reason = INDEFINITE
            out.direction = p
            break
        a = zeta / curv
        x += a * p
        Ax += a * Ap
        g -= a * Jp
        l += 1
        gnorm = float(np.linalg.norm(g))

        eig = np.nan
        theta_p = np.nan
        if l % cfg.eig_check_stride == 0:
            t = u + x
            At = Au + Ax
            tt = float(t @ t)
            theta_p = float(t @ At) / tt
            eig = float(np.linalg.norm(At - theta_p * t)) / np.sqrt(tt)
        out.trace.append((gnorm, eig, theta_p))
        if callback is not None:
            callback(l, gnorm, eig, theta_p)

        if gnorm <= cfg.tau_pcg * gnorm0:
            out.exit_reason = LINEAR_TOL
            break
        if eig < cfg.tau_outer * theta_p:
            out.exit_reason = EIGEN_TOL
            break
        if not np.isnan(eig):
            rho = eig / prev_eig if prev_eig > 0.0 else np.inf
            gamma = gnorm / prev_g
            slow = slow + 1 if (rho > 1.0 or rho > gamma) else 0
            prev_eig = eig
            prev_g = gnorm
            if slow >= cfg.stagnation_window:
                out.exit_reason = STAGNATION
                break
        if l >= cfg.itmax_pcg:
            out.exit_reason = MAXIT
            break

        c = precond(g)
        zeta_new = float(g @ c)
        out.min_zeta = min(out.min_zeta, zeta_new)
        p = c + (zeta_new / zeta) * p
        zeta = zeta_new

    Q = J.basis.Q
    if Q.shape[1] and np.linalg.norm(Q.T @ x) > 1e-12 * np.linalg.norm(x):
        x = J.basis.project(x)
    out.s = x
    out.iterations = l
    return out
