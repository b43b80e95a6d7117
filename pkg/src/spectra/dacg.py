"""Deflation-accelerated conjugate gradient minimization of the Rayleigh quotient.

Used as the warm start of every Newton level and, run to full accuracy, as the
"pure DACG" baseline.
"""
from dataclasses import dataclass

import numpy as np

from .deflation import DeflationBasis, orthogonalize
from .ichol import apply_p0
from .sparse import matvec
from .trace import DACG


@dataclass
class DacgConfig:
    tau_dacg: float = 1e-2
    itmax_dacg: int = 5000
    beta: str = "fletcher-reeves"
    restart: int = 50

    def __post_init__(self):
        if not 0.0 < self.tau_dacg <= 1.0:
            raise ValueError("tau_dacg must lie in (0, 1]")
        if self.beta not in ("fletcher-reeves", "polak-ribiere"):
            raise ValueError(f"unknown beta formula {self.beta!r}")


@dataclass
class DacgResult:
    u: np.ndarray
    theta: float
    iterations: int
    converged: bool
    residual: float
    Au: np.ndarray


def rayleigh_ritz_2d(x, Ax, p, Ap):
    """Minimize q over span{x, p} for unit ``x``.

    Returns ``(x_new, Ax_new, theta_new)`` with unit ``x_new``, or None when
    ``p`` is numerically parallel to ``x``.  The smallest root of the 2x2
    projected problem is taken in closed form.
    """
    c = x @ p
    ph = p - c * x
    Aph = Ap - c * Ax
    nrm = np.linalg.norm(ph)
    if nrm <= 1e-14 * np.linalg.norm(p):
        return None
    ph /= nrm
    Aph /= nrm
    a = float(x @ Ax)
    b = float(ph @ Ax)
    d = float(ph @ Aph)
    lam = 0.5 * (a + d) - np.hypot(0.5 * (a - d), b)
    y1, y2 = d - lam, -b
    alt1, alt2 = -b, a - lam
    if np.hypot(alt1, alt2) > np.hypot(y1, y2):
        y1, y2 = alt1, alt2
    h = np.hypot(y1, y2)
    if h == 0.0:
        return x, Ax, a
    y1, y2 = y1 / h, y2 / h
    if y1 < 0.0:
        y1, y2 = -y1, -y2
    xn = y1 * x + y2 * ph
    Axn = y1 * Ax + y2 * Aph
    s = np.linalg.norm(xn)
    xn /= s
    Axn /= s
    return xn, Axn, float(xn @ Axn)


def dacg_minimize(A, F, deflate, x0, cfg, trace=None, level=0):
    """Approximate the smallest eigenpair of A restricted to span(deflate)^perp.

    ``F`` supplies the preconditioner ``(L L^T)^-1``.  Stops when
    ``||A u - theta u|| <= tau_dacg * theta`` or after ``itmax_dacg``
    iterations (``converged`` is then False and the last iterate returned).
    """
    if deflate is None:
        deflate = DeflationBasis(A.n)
    x = orthogonalize(x0, deflate)
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        raise ValueError("initial vector lies in the deflated subspace")
    x = x / nrm
    Ax = matvec(A, x, trace)
    theta = float(x @ Ax)
    r = Ax - theta * x
    rnorm = float(np.linalg.norm(r))
    if trace is not None:
        trace.record(level, DACG, 0, 0, rnorm / theta, theta)

    p = None
    g_prev = None
    zeta_prev = 0.0
    its = 0
    while rnorm > cfg.tau_dacg * theta and its < cfg.itmax_dacg:
        its += 1
        if its % cfg.restart == 0:
            # refresh A x and orthogonality; drop the CG history
            x = orthogonalize(x, deflate)
            x /= np.linalg.norm(x)
            Ax = matvec(A, x, trace)
            theta = float(x @ Ax)
            r = Ax - theta * x
            p = None
        g = r
        gt = deflate.project(apply_p0(F, g))
        zeta = float(g @ gt)
        if p is None:
            p = -gt
        else:
            if cfg.beta == "fletcher-reeves":
                beta = zeta / zeta_prev
            else:
                beta = max(0.0, (zeta - float(g_prev @ gt)) / zeta_prev)
            p = deflate.project(-gt + beta * p)
            if not float(p @ g) < 0.0:
                p = -gt
        g_prev, zeta_prev = g, zeta
        Ap = matvec(A, p, trace)
        step = rayleigh_ritz_2d(x, Ax, p, Ap)
        if step is None:
            break
        x, Ax, theta = step
        r = Ax - theta * x
        rnorm = float(np.linalg.norm(r))
        if trace is not None:
            trace.record(level, DACG, 0, its, rnorm / theta, theta)

    return DacgResult(x, theta, its, bool(rnorm <= cfg.tau_dacg * theta), rnorm, Ax)
