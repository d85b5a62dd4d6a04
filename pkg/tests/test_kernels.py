import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from diffassoc import (
    BlockMismatch,
    DegenerateData,
    center_kernel,
    gaussian_kernel_matrix,
    linear_kernel_matrix,
    median_heuristic_bandwidth,
    pairwise_sq_distances,
)


def brute_sq_dist(X):
    n = len(X)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            D[i, j] = sum((a - b) ** 2 for a, b in zip(X[i], X[j]))
    return D


def centering(k):
    return np.eye(k) - np.ones((k, k)) / k


def test_sq_distances_345():
    np.testing.assert_array_equal(pairwise_sq_distances([[0, 0], [3, 4]]), [[0, 25], [25, 0]])


def test_sq_distances_identical_rows():
    assert np.all(pairwise_sq_distances(np.ones((4, 3)) * 2.5) == 0)


def test_sq_distances_match_double_loop(rng):
    X = rng.standard_normal((5, 3))
    D = pairwise_sq_distances(X)
    np.testing.assert_allclose(D, brute_sq_dist(X), rtol=0, atol=1e-12)
    assert np.array_equal(D, D.T)
    assert np.all(np.diag(D) == 0) and np.all(D >= 0)


def _dist2_from_upper(vals):
    N = int(round((1 + np.sqrt(1 + 8 * len(vals))) / 2))
    D = np.zeros((N, N))
    D[np.triu_indices(N, 1)] = vals
    return D + D.T


def test_median_heuristic_small_cases():
    assert median_heuristic_bandwidth(_dist2_from_upper([2.0])) == 1.0
    assert median_heuristic_bandwidth(_dist2_from_upper([2.0, 8.0, 18.0])) == 2.0


def test_median_heuristic_sort_oracle(rng):
    X = rng.standard_normal((20, 4))
    D = pairwise_sq_distances(X)
    vals = sorted(D[i, j] for i in range(20) for j in range(i + 1, 20))
    k = len(vals)  # 190, even
    med = (vals[k // 2 - 1] + vals[k // 2]) / 2
    assert median_heuristic_bandwidth(D) == pytest.approx(np.sqrt(med / 2), rel=1e-12)


def test_median_heuristic_degenerate():
    with pytest.raises(DegenerateData):
        median_heuristic_bandwidth(np.zeros((3, 3)))


def test_gaussian_identical_samples():
    np.testing.assert_array_equal(gaussian_kernel_matrix(np.zeros((4, 2)), 1.3), np.ones((4, 4)))


def test_gaussian_direct_formula():
    K = gaussian_kernel_matrix([[0.0, 0.0], [1.0, 1.0]], bandwidth=1.0)
    assert K[0, 1] == pytest.approx(np.exp(-1.0), abs=1e-15)
    assert K[0, 1] == pytest.approx(0.367879, abs=1e-6)


def test_gaussian_scalar_oracle(rng):
    X = rng.standard_normal((10, 4))
    bw = 1.7
    K = gaussian_kernel_matrix(X, bw)
    oracle = np.exp(-brute_sq_dist(X) / (2 * bw**2))
    np.testing.assert_allclose(K, oracle, rtol=0, atol=1e-12)
    assert np.array_equal(K, K.T)
    assert np.all((K > 0) & (K <= 1)) and np.all(np.diag(K) == 1)


def test_linear_kernel_examples(rng):
    np.testing.assert_array_equal(linear_kernel_matrix([[1, 0], [0, 1]]), np.eye(2))
    x = np.array([[1.0, -2.0, 3.0]])
    np.testing.assert_array_equal(linear_kernel_matrix(x), [[14.0]])
    X = rng.standard_normal((8, 3))
    oracle = [[sum(a * b for a, b in zip(X[i], X[j])) for j in range(8)] for i in range(8)]
    np.testing.assert_allclose(linear_kernel_matrix(X), oracle, rtol=0, atol=1e-12)


def test_center_examples(rng):
    assert np.allclose(center_kernel(np.ones((5, 5))), 0, atol=1e-15)
    np.testing.assert_allclose(center_kernel(np.eye(2)), centering(2), atol=1e-15)
    M = rng.standard_normal((10, 10))
    K = M + M.T
    Kc = center_kernel(K, [4, 6])
    H4, H6 = centering(4), centering(6)
    np.testing.assert_allclose(Kc[:4, :4], H4 @ K[:4, :4] @ H4, atol=1e-12)
    np.testing.assert_allclose(Kc[4:, 4:], H6 @ K[4:, 4:] @ H6, atol=1e-12)
    np.testing.assert_allclose(Kc[:4, 4:], H4 @ K[:4, 4:] @ H6, atol=1e-12)


def test_center_full_matrix_oracle(rng):
    M = rng.standard_normal((7, 7))
    K = M @ M.T
    H = np.zeros((7, 7))
    H[:3, :3], H[3:, 3:] = centering(3), centering(4)
    np.testing.assert_allclose(center_kernel(K, [3, 4]), H @ K @ H, atol=1e-12)
    np.testing.assert_allclose(center_kernel(K), centering(7) @ K @ centering(7), atol=1e-12)


def test_center_block_mismatch():
    with pytest.raises(BlockMismatch):
        center_kernel(np.eye(5), [2, 2])
    with pytest.raises(BlockMismatch):
        center_kernel(np.eye(4), [4, 0])


sym_sizes = st.integers(2, 12).flatmap(
    lambda N: st.tuples(st.just(N), st.integers(1, N - 1) if N > 2 else st.just(1))
)


@settings(max_examples=60, deadline=None)
@given(sym_sizes, st.integers(0, 2**32 - 1))
def test_center_idempotent_and_block_sums(sizes, seed):
    N, m = sizes
    r = np.random.default_rng(seed)
    M = r.standard_normal((N, N)) * r.uniform(0.1, 100)
    K = M @ M.T
    blocks = [m, N - m]
    Kc = center_kernel(K, blocks)
    assert np.array_equal(Kc, Kc.T)
    np.testing.assert_allclose(center_kernel(Kc, blocks), Kc, rtol=1e-10, atol=1e-10 * np.abs(Kc).max())
    tol = 1e-8 * np.abs(Kc).max()
    for sl in (slice(0, m), slice(m, N)):
        blk = Kc[sl, sl]
        assert np.all(np.abs(blk.sum(axis=0)) <= tol)
        assert np.all(np.abs(blk.sum(axis=1)) <= tol)


finite = st.floats(-50, 50, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(2, 10), st.integers(1, 4)), elements=finite),
       arrays(np.float64, 4, elements=finite))
def test_gaussian_translation_invariant(X, shift):
    shift = shift[: X.shape[1]]
    K1 = gaussian_kernel_matrix(X, 3.0)
    K2 = gaussian_kernel_matrix(X + shift, 3.0)
    assert np.max(np.abs(K1 - K2)) < 1e-10


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 4)), elements=finite),
       st.sampled_from([-3.0, -0.5, 0.25, 2.0, 4.0]))
def test_linear_kernel_scales_quadratically(X, c):
    # powers of two keep c*X exact, so the identity holds to rounding of the products
    np.testing.assert_allclose(linear_kernel_matrix(c * X), c**2 * linear_kernel_matrix(X),
                               rtol=1e-12, atol=1e-9)
