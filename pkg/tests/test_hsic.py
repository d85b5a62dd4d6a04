from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from diffassoc import (
    GroupTooSmall,
    SizeMismatch,
    center_kernel,
    gaussian_kernel_matrix,
    hsic_nodiag,
    hsic_sums,
    hsic_trace,
)


def hsic_sums_literal(Kx, Ky):
    """Unrestricted triple-term sum, evaluated exactly with rationals."""
    N = len(Kx)
    r = range(N)
    t1 = sum(Kx[i][j] * Ky[i][j] for i, j in product(r, r))
    t2 = sum(Kx[i][j] * Ky[u][v] for i, j, u, v in product(r, r, r, r))
    t3 = sum(Kx[i][j] * Ky[i][u] for i, j, u in product(r, r, r))
    return Fraction(t1, N**2) + Fraction(t2, N**4) - Fraction(2 * t3, N**3)


def test_constant_kernel_gives_zero(rng):
    Kx = gaussian_kernel_matrix(rng.standard_normal((9, 2)))
    assert abs(hsic_trace(Kx, np.ones((9, 9)))) < 1e-15
    assert abs(hsic_sums(Kx, np.ones((9, 9)))) < 1e-14


def test_centered_rank_one(rng):
    N = 6
    v = rng.standard_normal(N)
    v -= v.mean()
    v /= np.linalg.norm(v)
    K = np.outer(v, v)
    assert hsic_trace(K, K) == pytest.approx(1 / N**2, rel=1e-12)


def test_two_by_two_identity_exact():
    I2 = [[1, 0], [0, 1]]
    assert hsic_sums_literal(I2, I2) == Fraction(1, 4)
    assert hsic_sums(np.eye(2), np.eye(2)) == pytest.approx(0.25, abs=1e-15)
    assert hsic_trace(np.eye(2), np.eye(2)) == pytest.approx(0.25, abs=1e-15)


def test_sums_literal_oracle_integer_kernels(rng):
    A = rng.integers(-3, 4, (5, 5))
    B = rng.integers(-3, 4, (5, 5))
    Kx, Ky = A @ A.T, B @ B.T
    exact = hsic_sums_literal(Kx.tolist(), Ky.tolist())
    assert hsic_sums(Kx, Ky) == pytest.approx(float(exact), rel=1e-12)
    assert hsic_trace(Kx, Ky) == pytest.approx(float(exact), rel=1e-12)


@pytest.mark.parametrize("N", [8, 12])
def test_trace_matches_sums(rng, N):
    X = rng.standard_normal((N, 3))
    Y = np.sin(X[:, :2]) + 0.3 * rng.standard_normal((N, 2))
    Kx, Ky = gaussian_kernel_matrix(X), gaussian_kernel_matrix(Y)
    assert hsic_trace(Kx, Ky) == pytest.approx(hsic_sums(Kx, Ky), rel=1e-10)


def test_trace_symmetric_and_nonnegative(rng):
    for _ in range(20):
        N = int(rng.integers(3, 30))
        A = rng.standard_normal((N, 4))
        B = rng.standard_normal((N, 2))
        Kx, Ky = A @ A.T, gaussian_kernel_matrix(B)
        assert hsic_trace(Kx, Ky) == hsic_trace(Ky, Kx)
        assert hsic_trace(Kx, Ky) >= -1e-12


def test_nodiag_examples(rng):
    assert hsic_nodiag(np.zeros((4, 4)), rng.standard_normal((4, 4))) == 0.0
    c, n = 0.7, 5
    K = np.full((n, n), c)
    np.fill_diagonal(K, 3.0)
    assert hsic_nodiag(K, K) == pytest.approx(c**2, rel=1e-14)


def test_nodiag_double_loop(rng):
    n = 9
    Kx = center_kernel(gaussian_kernel_matrix(rng.standard_normal((n, 2))))
    Ky = center_kernel(gaussian_kernel_matrix(rng.standard_normal((n, 3))))
    oracle = sum(Kx[i, j] * Ky[i, j] for i in range(n) for j in range(n) if i != j) / (n * (n - 1))
    assert hsic_nodiag(Kx, Ky, n) == pytest.approx(oracle, abs=1e-12)
    # same as the trace of the diagonal-removed product
    Dx, Dy = Kx - np.diag(np.diag(Kx)), Ky - np.diag(np.diag(Ky))
    assert hsic_nodiag(Kx, Ky) == pytest.approx(np.trace(Dx @ Dy) / (n * (n - 1)), rel=1e-12)


def test_errors():
    with pytest.raises(SizeMismatch):
        hsic_trace(np.eye(3), np.eye(4))
    with pytest.raises(SizeMismatch):
        hsic_nodiag(np.eye(3), np.eye(3), n_group=4)
    with pytest.raises(GroupTooSmall):
        hsic_nodiag(np.eye(1), np.eye(1))


def test_copy_beats_shuffled_copy():
    wins = 0
    for seed in range(100):
        r = np.random.default_rng(seed)
        X = r.standard_normal((100, 3))
        Kx = gaussian_kernel_matrix(X)
        dep = hsic_trace(Kx, gaussian_kernel_matrix(X.copy()))
        ind = hsic_trace(Kx, gaussian_kernel_matrix(X[r.permutation(100)]))
        wins += dep > ind
    assert wins >= 95
