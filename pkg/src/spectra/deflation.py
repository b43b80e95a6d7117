"""Deflation basis, Gram-Schmidt, the eigenresidual and the projected Jacobian."""
import numpy as np

from .sparse import matvec

REORTH_DROP = 10.0
DEGENERATE = 1e-14


class DeflationBasis:
    """Orthonormal columns ``Q`` kept as a dense ``n x m`` array.

    The last column is the current iterate during a Newton solve; earlier
    columns are the converged eigenvectors (or known null vectors).
    """

    def __init__(self, n, columns=None):
        self.n = n
        if columns is None:
            self.Q = np.zeros((n, 0))
        else:
            self.Q = np.array(columns, dtype=np.float64, ndmin=2).reshape(n, -1)

    @property
    def size(self):
        return self.Q.shape[1]

    def __len__(self):
        return self.size

    def with_column(self, u):
        return DeflationBasis(self.n, np.column_stack([self.Q, u]))

    def project(self, v):
        """``(I - Q Q^T) v`` in one classical Gram-Schmidt sweep."""
        if self.size == 0:
            return np.array(v, dtype=np.float64)
        return v - self.Q @ (self.Q.T @ v)

    def orthogonalize(self, v):
        return orthogonalize(v, self)

    def orthonormality_error(self):
        m = self.size
        return float(np.abs(self.Q.T @ self.Q - np.eye(m)).max()) if m else 0.0


def orthogonalize(v, basis):
    """Classical Gram-Schmidt of ``v`` against ``basis`` with one conditional re-pass.

    A second sweep runs when the norm drops by more than a factor of 10.
    If ``v`` lies numerically in span(Q) the result is exactly zero.
    """
    v = np.asarray(v, dtype=np.float64)
    vnorm = np.linalg.norm(v)
    w = basis.project(v)
    if basis.size == 0:
        return w
    wnorm = np.linalg.norm(w)
    if wnorm * REORTH_DROP < vnorm:
        w = basis.project(w)
        wnorm = np.linalg.norm(w)
    if wnorm < DEGENERATE * vnorm or wnorm == 0.0:
        return np.zeros_like(w)
    return w


def eigenresidual(A, u, trace=None, Au=None):
    """Return ``(theta, r, ||r||)`` for the normalized ``u``; ``r = A u - theta u``.

    ``Au`` may be passed to skip the matvec when it is already known for the
    normalized vector.
    """
    u = np.asarray(u, dtype=np.float64)
    nrm = np.linalg.norm(u)
    if nrm == 0.0:
        raise ValueError("eigenresidual of the zero vector")
    if nrm != 1.0:
        u = u / nrm
        Au = None if Au is None else Au / nrm
    if Au is None:
        Au = matvec(A, u, trace)
    theta = float(u @ Au)
    r = Au - theta * u
    return theta, r, float(np.linalg.norm(r))


class ProjectedJacobian:
    """``J = (I - Q Q^T)(A - theta I)(I - Q Q^T)`` applied to vectors orthogonal to Q.

    Only the left projector is applied; callers keep their iterates in
    span(Q)^perp.  With ``debug=True`` both projectors are applied and the
    agreement is asserted.
    """

    def __init__(self, A, theta, basis, trace=None, debug=False):
        self.A = A
        self.theta = float(theta)
        self.basis = basis
        self.trace = trace
        self.debug = debug

    def apply_with_product(self, z):
        """Return ``(J z, A z)``; costs exactly one matvec on A."""
        Az = matvec(self.A, z, self.trace)
        Jz = self.basis.project(Az - self.theta * z)
        if self.debug:
            zp = self.basis.project(z)
            full = self.basis.project(matvec(self.A, zp) - self.theta * zp)
            scale = max(1.0, np.linalg.norm(Jz))
            assert np.linalg.norm(full - Jz) <= 1e-10 * scale, "input not orthogonal to Q"
        return Jz, Az

    def apply(self, z):
        return self.apply_with_product(z)[0]

    __call__ = apply


def apply_jacobian(J, z):
    return J.apply(z)
