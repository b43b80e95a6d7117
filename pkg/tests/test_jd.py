import numpy as np
import pytest

from spectra import JdConfig, SolverConfig, SparseMatrix, factor, jd_solve, solve_leftmost
from spectra.dense_oracle import dense_eigen


def test_diagonal():
    A = SparseMatrix.from_dense(np.diag(np.arange(1.0, 11.0)))
    pairs, _ = jd_solve(A, factor(A), JdConfig(n_eig=3, m_min=2, m_max=5))
    assert [p.value for p in pairs] == pytest.approx([1.0, 2.0, 3.0], rel=1e-12)


def test_agrees_with_newton(grid10):
    F = factor(grid10)
    jd, jtr = jd_solve(grid10, F, JdConfig(n_eig=5))
    nw, _ = solve_leftmost(grid10, SolverConfig(n_eig=5))
    lam = dense_eigen(grid10).eigenvalues[:5]
    for pairs in (jd, nw):
        assert np.allclose([p.value for p in pairs], lam, rtol=1e-7)
    V = np.column_stack([p.vector for p in jd])
    assert np.abs(V.T @ V - np.eye(5)).max() <= 1e-8
    mvps = [r.cumulative_mvp for r in jtr.rows]
    assert mvps == sorted(mvps)


def test_restart_keeps_best_ritz_value(grid10):
    cfg = JdConfig(n_eig=3, m_min=2, m_max=4)
    pairs, trace = jd_solve(grid10, factor(grid10), cfg)
    restarts = [s for s in trace.steps if s.get("restart")]
    assert restarts
    for s in restarts:
        assert s["theta_after"] == pytest.approx(s["theta_before"], rel=1e-12)
    assert all(p.converged for p in pairs)


def test_config_validation():
    with pytest.raises(ValueError):
        JdConfig(m_min=5, m_max=5)
    with pytest.raises(ValueError):
        JdConfig(n_eig=0)
