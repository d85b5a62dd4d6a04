import numpy as np
import pytest

from diffassoc import center_kernel, gaussian_kernel_matrix, pooled_product_matrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


def random_pooled(rng, m, n, p=3, q=2):
    """Pooled product built from random data through the real kernel path."""
    X = rng.standard_normal((m + n, p))
    Y = X[:, :1] ** 2 + rng.standard_normal((m + n, q))
    Kx = center_kernel(gaussian_kernel_matrix(X), [m, n])
    Ky = center_kernel(gaussian_kernel_matrix(Y), [m, n])
    return pooled_product_matrix(Kx, Ky, m, n)


def random_symmetric(rng, N):
    M = rng.standard_normal((N, N))
    M = M + M.T
    np.fill_diagonal(M, 0.0)
    return M


# (criterion, passed, detail) rows from test_acceptance, echoed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
