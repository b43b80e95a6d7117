import numpy as np
import pytest
from hypothesis import given, strategies as st

from spectra import BfgsWindow, DeflationBasis, SparseMatrix, factor, generate_laplacian
from spectra.dense_oracle import (dense_eigen, preconditioned_jacobian_spectrum, sqrtm_psd)


def test_sorted_diagonal():
    spec = dense_eigen(SparseMatrix.from_dense(np.diag([3.0, 1.0, 2.0])))
    assert np.array_equal(spec.eigenvalues, [1.0, 2.0, 3.0])


def test_dirichlet_formula():
    lam = dense_eigen(generate_laplacian("path-1d", 10)).eigenvalues
    k = np.arange(1, 11)
    assert np.allclose(lam, 4 * np.sin(k * np.pi / 22) ** 2, rtol=1e-12)


@given(st.integers(0, 10_000))
def test_reconstruction(seed):
    M = np.random.default_rng(seed).standard_normal((30, 30))
    M = M + M.T
    spec = dense_eigen(M)
    V, lam = spec.eigenvectors, spec.eigenvalues
    assert np.allclose((V * lam) @ V.T, M, atol=1e-9)


def test_xi():
    spec = dense_eigen(np.diag([1.0, 3.0, 4.0]))
    assert spec.xi(1) == 0.5 and spec.xi(2) == 3.0


def test_size_guard():
    with pytest.raises(ValueError):
        dense_eigen(np.eye(2001))


def test_sqrtm_psd():
    M = np.array([[4.0, 0.0], [0.0, -1e-18]])
    root, wmin = sqrtm_psd(M)
    assert np.allclose(root, np.diag([2.0, 0.0])) and wmin < 0


def test_exact_p0_clusters_near_one():
    A = generate_laplacian("path-1d", 30)
    spec = dense_eigen(A)
    u = spec.eigenvectors[:, 0]
    theta = spec.eigenvalues[0]
    F = factor(A, 30, 0.0)
    js = preconditioned_jacobian_spectrum(A, theta, DeflationBasis(30, u[:, None]),
                                          BfgsWindow(0, 30), F)
    assert np.isfinite(js.kappa) and js.kappa >= 1
    # live spectrum of (A - theta)^1/2 A^-1 (A - theta)^1/2: 1 - theta/lambda_i, i >= 2
    expected = 1 - theta / spec.eigenvalues[1:]
    assert np.allclose(np.sort(js.eigenvalues[js.eigenvalues > 1e-10 * js.lambda_max]),
                       expected, rtol=1e-9)
    assert js.e_norm == pytest.approx(theta / spec.eigenvalues[1], rel=1e-9)
