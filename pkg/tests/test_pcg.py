import numpy as np
import pytest

from spectra import (BfgsWindow, DeflationBasis, PcgConfig, ProjectedJacobian, SparseMatrix,
                     apply_p0, apply_preconditioner, eigenresidual, factor, generate_laplacian)
from spectra.dense_oracle import dense_eigen, dense_jacobian
from spectra.pcg import EIGEN_TOL, INDEFINITE, LINEAR_TOL, MAXIT, STAGNATION, solve_correction


def _setup(A, u, deflate=None):
    deflate = deflate or DeflationBasis(A.n)
    theta, r, _ = eigenresidual(A, u)
    Q = deflate.with_column(u)
    F = factor(A, 30, 0.0)
    J = ProjectedJacobian(A, theta, Q)
    return J, Q, Q.project(r), F, r + theta * u


def test_zero_rhs():
    A = generate_laplacian("path-1d", 6)
    u = np.ones(6) / np.sqrt(6)
    J, Q, rk, F, Au = _setup(A, u)
    out = solve_correction(J, np.zeros(6), lambda g: g, PcgConfig(), u, Au)
    assert out.iterations == 0 and out.exit_reason == LINEAR_TOL and not out.s.any()


def test_exact_eigenvector_gives_zero_correction():
    A = SparseMatrix.from_dense(np.diag([1.0, 2.0, 3.0]))
    u = np.array([1.0, 0.0, 0.0])
    J, Q, rk, F, Au = _setup(A, u)
    assert not rk.any()
    out = solve_correction(J, -rk, lambda g: Q.project(apply_p0(F, g)), PcgConfig(), u, Au)
    assert not out.s.any() and out.iterations == 0


def test_matches_dense_projected_solve():
    A = generate_laplacian("path-1d", 20)
    spec = dense_eigen(A)
    rng = np.random.default_rng(0)
    u = spec.eigenvectors[:, 0] + 1e-2 * rng.standard_normal(20)
    u /= np.linalg.norm(u)
    J, Q, rk, F, Au = _setup(A, u)
    cfg = PcgConfig(tau_pcg=1e-13, itmax_pcg=200, tau_outer=1e-300, stagnation_window=10**6)
    out = solve_correction(J, -rk, lambda g: Q.project(apply_p0(F, g)), cfg, u, Au)
    Jd = dense_jacobian(A, J.theta, Q.Q)
    expected = np.linalg.lstsq(Jd, -rk, rcond=1e-12)[0]
    expected = Q.project(expected)
    assert out.exit_reason == LINEAR_TOL
    assert np.linalg.norm(out.s - expected) <= 1e-6 * np.linalg.norm(expected)
    assert np.linalg.norm(Q.Q.T @ out.s) <= 1e-10 * np.linalg.norm(out.s)


def _trial(A, j, noise, seed, cfg):
    spec = dense_eigen(A)
    rng = np.random.default_rng(seed)
    Qt = DeflationBasis(A.n, spec.eigenvectors[:, :j - 1])
    u = Qt.project(spec.eigenvectors[:, j - 1] + noise * rng.standard_normal(A.n) / np.sqrt(A.n))
    u /= np.linalg.norm(u)
    J, Q, rk, F, Au = _setup(A, u, Qt)
    w = BfgsWindow(5, A.n)
    out = solve_correction(J, -rk, lambda g: apply_preconditioner(w, F, Q, g), cfg, u, Au)
    return out, u, Au


def test_trace_and_eigenresidual_recurrence():
    A = generate_laplacian("grid-2d", 8, 8)
    calls = []
    cfg = PcgConfig(tau_pcg=1e-10, itmax_pcg=7, tau_outer=1e-300, stagnation_window=10**6)
    spec = dense_eigen(A)
    u = spec.eigenvectors[:, 0] + 0.05 * np.random.default_rng(1).standard_normal(A.n)
    u /= np.linalg.norm(u)
    J, Q, rk, F, Au = _setup(A, u)
    F = factor(A, 0, 1e-1)
    out = solve_correction(J, -rk, lambda g: Q.project(apply_p0(F, g)), cfg, u, Au,
                           callback=lambda *a: calls.append(a))
    assert out.exit_reason == MAXIT and out.iterations == 7 == len(calls) == len(out.trace)
    t = u + out.s
    t /= np.linalg.norm(t)
    _, _, rn = eigenresidual(A, t)
    assert out.trace[-1][1] == pytest.approx(rn, rel=1e-8)
    assert out.min_zeta > 0


def test_eigen_tol_exit():
    A = generate_laplacian("path-1d", 30)
    cfg = PcgConfig(tau_pcg=1e-14, itmax_pcg=100, tau_outer=1e-3)
    out, u, Au = _trial(A, 1, 1e-3, 0, cfg)
    assert out.exit_reason == EIGEN_TOL
    gn, eig, th = out.trace[-1]
    assert eig < 1e-3 * th


def test_stagnation_exit():
    # tiny outer tolerance: the eigenresidual floors at the linearization error
    A = generate_laplacian("grid-2d", 12, 12)
    cfg = PcgConfig(tau_pcg=1e-14, itmax_pcg=200, tau_outer=1e-300)
    out, u, Au = _trial(A, 2, 0.1, 3, cfg)
    assert out.exit_reason == STAGNATION and out.iterations < 200


def test_stride_skips_eigen_checks():
    A = generate_laplacian("grid-2d", 8, 8)
    cfg = PcgConfig(tau_pcg=1e-14, itmax_pcg=6, tau_outer=1e-300, eig_check_stride=3,
                    stagnation_window=10**6)
    out, u, Au = _trial(A, 1, 0.1, 0, cfg)
    evaluated = [not np.isnan(e) for _, e, _ in out.trace]
    assert evaluated == [False, False, True, False, False, True]


def test_indefinite_signal():
    # theta above the second eigenvalue makes J indefinite on the complement
    A = SparseMatrix.from_dense(np.diag([1.0, 2.0, 3.0, 4.0]))
    u = np.array([0.0, 0.0, 1.0, 1.0]) / np.sqrt(2)
    J, Q, rk, F, Au = _setup(A, u)
    out = solve_correction(J, Q.project(np.array([1.0, 1.0, 0.0, 0.0])), lambda g: g,
                           PcgConfig(), u, Au)
    assert out.exit_reason == INDEFINITE
    assert out.direction is not None


@pytest.mark.parametrize("kw", [dict(tau_pcg=0.0), dict(tau_pcg=1.0), dict(itmax_pcg=0),
                                dict(stagnation_window=0), dict(eig_check_stride=0)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        PcgConfig(**kw)
