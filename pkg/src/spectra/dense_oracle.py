"""Brute-force dense references for tests and spectral diagnostics.

Nothing here is on a performance path.
"""
from dataclasses import dataclass

import numpy as np

MAX_DENSE_EIGEN = 2000
MAX_DENSE_JACOBIAN = 500
ZERO_CUTOFF = 1e-10


@dataclass
class DenseSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def xi(self, j):
        """``lambda_j / (lambda_{j+1} - lambda_j)`` for 1-based level ``j``."""
        lam = self.eigenvalues
        return lam[j - 1] / (lam[j] - lam[j - 1])


def _dense(A):
    return A.toarray() if hasattr(A, "toarray") else np.asarray(A, dtype=np.float64)


def dense_eigen(A):
    """Full symmetric eigendecomposition, ascending eigenvalues."""
    M = _dense(A)
    if M.shape[0] > MAX_DENSE_EIGEN:
        raise ValueError(f"dense oracle limited to n <= {MAX_DENSE_EIGEN}")
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    return DenseSpectrum(w, V)


def dense_p0(F):
    """``(L L^T)^-1`` as a dense matrix."""
    L = F.toarray()
    Linv = np.linalg.solve(L, np.eye(F.n))
    return Linv.T @ Linv


def dense_bfgs_recursion(P0, pairs):
    """Apply the rank-two update once per ``(s, r)`` pair, oldest first."""
    P = np.array(P0, dtype=np.float64)
    n = P.shape[0]
    eye = np.eye(n)
    for s, r, *_ in pairs:
        a = s @ r
        left = eye - np.outer(s, r) / a
        P = -np.outer(s, s) / a + left @ P @ left.T
    return P


def dense_jacobian(A, theta, Q):
    M = _dense(A)
    n = M.shape[0]
    proj = np.eye(n) - Q @ Q.T
    return proj @ (M - theta * np.eye(n)) @ proj


def sqrtm_psd(M):
    """Symmetric square root; negative eigenvalues are clipped to zero.

    Returns ``(root, smallest_eigenvalue_before_clipping)``.
    """
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T, float(w.min())


@dataclass
class JacobianSpectrum:
    eigenvalues: np.ndarray  # of J^1/2 P J^1/2, ascending
    kappa: float
    e_norm: float
    lambda_min: float  # smallest eigenvalue counted as nonzero
    lambda_max: float
    jacobian_min: float  # smallest eigenvalue of J before clipping


def preconditioned_jacobian_spectrum(A, theta, basis, window, F):
    """Spectrum of ``J^1/2 P J^1/2`` with ``J``, ``P`` projected on ``basis``.

    Eigenvalues below ``ZERO_CUTOFF * max`` belong to deflated (or clipped)
    directions and are excluded from the condition number
    ``max / min{lambda > 0}`` and from ``||E|| = max |1 - lambda|``.
    """
    n = basis.n
    if n > MAX_DENSE_JACOBIAN:
        raise ValueError(f"dense Jacobian spectrum limited to n <= {MAX_DENSE_JACOBIAN}")
    Q = basis.Q
    J = dense_jacobian(A, theta, Q)
    root, jmin = sqrtm_psd(J)
    proj = np.eye(n) - Q @ Q.T
    P = proj @ dense_bfgs_recursion(dense_p0(F), window.pairs()) @ proj
    Jt = root @ P @ root
    w = np.linalg.eigvalsh(0.5 * (Jt + Jt.T))
    top = w.max()
    live = w[w > ZERO_CUTOFF * top]
    return JacobianSpectrum(
        eigenvalues=w, kappa=float(top / live.min()),
        e_norm=float(np.abs(1.0 - live).max()),
        lambda_min=float(live.min()), lambda_max=float(top), jacobian_min=jmin,
    )
