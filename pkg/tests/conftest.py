import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from spectra import SparseMatrix, generate_laplacian

settings.register_profile("spectra", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("spectra")


def random_spd(n, density=0.1, seed=0):
    """Sparse, strictly diagonally dominant symmetric matrix."""
    rng = np.random.default_rng(seed)
    M = np.where(rng.random((n, n)) < density, rng.standard_normal((n, n)), 0.0)
    M = np.tril(M, -1)
    M = M + M.T
    M += np.diag(np.abs(M).sum(axis=1) + 1.0 + rng.random(n))
    return SparseMatrix.from_dense(M)


def tridiag(n):
    return generate_laplacian("path-1d", n)


@pytest.fixture(scope="session")
def grid10():
    return generate_laplacian("grid-2d", 10, 10)


@pytest.fixture(scope="session")
def grid20():
    return generate_laplacian("grid-2d", 20, 20)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
