"""Jacobi-Davidson baseline with Rayleigh-Ritz extraction and thick restarts.

The correction equation is the same projected system the Newton driver
solves, handled by the same PCG with the same exit tests, but always with the
fixed projected IC preconditioner.
"""
import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .deflation import DeflationBasis, ProjectedJacobian, orthogonalize
from .ichol import apply_p0
from .newton import EigenPair, initial_vectors
from .pcg import PcgConfig, solve_correction
from .sparse import matvec
from .trace import JD, ConvergenceTrace


@dataclass
class JdConfig:
    n_eig: int = 20
    m_min: int = 5
    m_max: int = 10
    tau: float = 1e-8
    itmax: int = 100
    pcg: PcgConfig = field(default_factory=PcgConfig)
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.m_min < self.m_max <= 50:
            raise ValueError("need 1 <= m_min < m_max <= 50")
        if self.n_eig < 1:
            raise ValueError("n_eig must be at least 1")
        self.pcg = dataclasses.replace(self.pcg, tau_outer=self.tau)


class RitzSubspace:
    """Orthonormal search basis V with ``W = A V`` and ``H = V^T A V``."""

    def __init__(self, n):
        self.V = np.zeros((n, 0))
        self.W = np.zeros((n, 0))

    @property
    def size(self):
        return self.V.shape[1]

    def add(self, v, Av):
        self.V = np.column_stack([self.V, v])
        self.W = np.column_stack([self.W, Av])

    def ritz(self):
        H = self.V.T @ self.W
        H = 0.5 * (H + H.T)
        return np.linalg.eigh(H)

    def compress(self, Y):
        """Replace the basis by ``V Y`` (Y with orthonormal columns)."""
        self.V = self.V @ Y
        self.W = self.W @ Y


def _expand(A, space, v, deflate, trace, rng_vectors):
    """Orthonormalize ``v`` against deflate and V and append it."""
    for _ in range(3):
        full = deflate.with_column(space.V) if space.size else deflate
        w = orthogonalize(v, full)
        if w.any():
            w = orthogonalize(w, full)
        nrm = np.linalg.norm(w)
        if nrm > 0.0:
            w /= nrm
            space.add(w, matvec(A, w, trace))
            return
        v = next(rng_vectors)
    raise RuntimeError("could not expand the search subspace")


def jd_solve(A, F, cfg=None, deflate=None):
    """Leftmost ``cfg.n_eig`` eigenpairs by Jacobi-Davidson; returns ``(pairs, trace)``.

    The search space starts from ``m_min`` fixed-seed random vectors; after a
    pair converges the remaining Ritz vectors seed the next level.
    """
    cfg = cfg or JdConfig()
    trace = ConvergenceTrace()
    Qt = deflate if deflate is not None else DeflationBasis(A.n)
    starts = initial_vectors(A.n, cfg.seed)
    space = RitzSubspace(A.n)
    pairs = []
    with trace.phase(JD):
        for level in range(1, cfg.n_eig + 1):
            m0 = trace.mvp
            while space.size < cfg.m_min:
                _expand(A, space, next(starts), Qt, trace, starts)
            its = 0
            inner = 0
            while True:
                vals, Y = space.ritz()
                theta = float(vals[0])
                u = space.V @ Y[:, 0]
                Au = space.W @ Y[:, 0]
                r = Au - theta * u
                rnorm = float(np.linalg.norm(r))
                trace.record(level, JD, its, inner, rnorm / theta, theta)
                if rnorm <= cfg.tau * theta or its >= cfg.itmax:
                    break
                if space.size >= cfg.m_max:
                    space.compress(Y[:, :cfg.m_min])
                    trace.steps.append(dict(level=level, k=its, restart=True,
                                            theta_before=theta,
                                            theta_after=float(space.ritz()[0][0])))
                Q = Qt.with_column(u)
                rk = Q.project(r)
                J = ProjectedJacobian(A, theta, Q, trace)

                def precond(g, Q=Q):
                    return Q.project(apply_p0(F, g))

                def on_iter(l, gnorm, eig, theta_p, k=its, base=inner):
                    trace.record(level, JD, k, base + l, eig / theta_p, theta_p)

                out = solve_correction(J, -rk, precond, cfg.pcg, u, Au, callback=on_iter)
                inner += out.iterations
                its += 1
                s = out.s
                snorm = float(np.linalg.norm(s))
                trace.steps.append(dict(
                    level=level, k=its, pcg_its=out.iterations, exit=out.exit_reason,
                    ortho_s=float(np.linalg.norm(Q.Q.T @ s)) / snorm if snorm else 0.0,
                ))
                _expand(A, space, s if snorm > 0.0 else precond(-rk), Qt, trace, starts)
            pairs.append(EigenPair(theta, u, level, its, 0, trace.mvp - m0,
                                   rnorm / theta, rnorm <= cfg.tau * theta))
            Qt = Qt.with_column(u)
            # keep the other Ritz vectors, which are orthogonal to u
            space.compress(Y[:, 1:])
    pairs.sort(key=lambda p: p.value)
    return pairs, trace
