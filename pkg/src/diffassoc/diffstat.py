"""Differential HSIC statistic and its exact permutation moments.

The pooled product ``P`` holds ``Kc_x[i,j] * Kc_y[i,j]`` (zero diagonal),
where both kernels were built on the pooled samples and centered with the
two-block centering matrix. The statistic is the mean of ``P`` over the
condition-A block minus the mean over the condition-B block, off-diagonal
entries only. Relabeling samples permutes indices of ``P`` but never its
entries, which is what makes the permutation moments closed-form.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _hot
from .errors import BlockMismatch, GroupTooSmall, NonPositiveVariance


@dataclass(frozen=True)
class PooledProduct:
    entries: np.ndarray
    m: int
    n: int

    @property
    def N(self) -> int:
        return self.m + self.n

    def __post_init__(self):
        E = self.entries
        if E.ndim != 2 or E.shape != (self.N, self.N):
            raise BlockMismatch(f"pooled product is {E.shape}, expected ({self.N}, {self.N})")
        if self.m < 2 or self.n < 2:
            raise GroupTooSmall(f"each condition needs >= 2 samples (m={self.m}, n={self.n})")


@dataclass(frozen=True)
class MomentSummary:
    A: float
    B: float
    C: float
    rowsums: np.ndarray
    total: float


@dataclass(frozen=True)
class DiffStatResult:
    t_tilde: float
    variance: float
    z: float


def pooled_product_matrix(Kc_x_U, Kc_y_U, m: int, n: int) -> PooledProduct:
    """Hadamard product of two block-centered pooled kernels, diagonal zeroed."""
    Kx = np.asarray(Kc_x_U, dtype=np.float64)
    Ky = np.asarray(Kc_y_U, dtype=np.float64)
    N = m + n
    if Kx.shape != (N, N) or Ky.shape != (N, N):
        raise BlockMismatch(f"centered kernels {Kx.shape}, {Ky.shape} do not match m+n={N}")
    P = Kx * Ky
    np.fill_diagonal(P, 0.0)
    return PooledProduct(P, int(m), int(n))


def from_square(P, m: int) -> PooledProduct:
    """Wrap an arbitrary symmetric matrix as a pooled product (diagonal zeroed)."""
    P = np.array(P, dtype=np.float64)
    np.fill_diagonal(P, 0.0)
    return PooledProduct(P, int(m), P.shape[0] - int(m))


def _t_from_block_sums(s_a, s_b, m: int, n: int):
    return s_a / (m * (m - 1)) - s_b / (n * (n - 1))


def statistic_tilde(P: PooledProduct) -> float:
    m, n = P.m, P.n
    E = P.entries
    return float(_t_from_block_sums(E[:m, :m].sum(), E[m:, m:].sum(), m, n))


def relabeled_statistics(P: PooledProduct, idx_a: np.ndarray, idx_b: np.ndarray) -> np.ndarray:
    """Statistic for each relabeling; row r of ``idx_a`` lists its pseudo-A indices."""
    s_a, s_b = _hot.relabel_sums(P.entries, idx_a, idx_b)
    return _t_from_block_sums(s_a, s_b, P.m, P.n)


def moment_sums(P: PooledProduct) -> MomentSummary:
    """A, B, C of the permutation moments, summed over mutually distinct indices.

    With a zero diagonal the distinct-index sums follow from row sums in O(N^2):
    ``B = sum_i r_i^2 - A`` and ``C = S^2 - 4B - 2A``.
    """
    E = P.entries
    A = float(np.sum(E * E))
    rowsums = E.sum(axis=1)
    total = float(rowsums.sum())
    B = float(np.dot(rowsums, rowsums)) - A
    C = total * total - 4.0 * B - 2.0 * A
    return MomentSummary(A, B, C, rowsums, total)


def _falling(x: int, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= x - i
    return out


def permutation_variance(ms: MomentSummary, m: int, n: int) -> float:
    """Exact variance of the statistic under uniform relabeling.

    Raises
    ------
    NonPositiveVariance
        If the variance is not clearly positive relative to the scale of its
        leading (A) term, which happens only for degenerate data.
    """
    if m < 2 or n < 2:
        raise GroupTooSmall(f"each condition needs >= 2 samples (m={m}, n={n})")
    N = m + n
    f1 = lambda x: _falling(x, 2) / _falling(N, 2)  # noqa: E731
    f2 = lambda x: _falling(x, 3) / _falling(N, 3)  # noqa: E731
    # f3 vanishes for x < 4 and for N < 4 the C sum is empty, so guard the 0/0.
    f3 = lambda x: _falling(x, 4) / _falling(N, 4) if N >= 4 else 0.0  # noqa: E731

    def group_term(x):
        return (2 * ms.A * f1(x) + 4 * ms.B * f2(x) + ms.C * f3(x)) / _falling(x, 2) ** 2

    cross = 2 * ms.C / _falling(N, 4) if N >= 4 else 0.0
    var = group_term(m) + group_term(n) - cross
    scale = 2 * ms.A * (f1(m) / _falling(m, 2) ** 2 + f1(n) / _falling(n, 2) ** 2)
    if not np.isfinite(var) or var <= 1e-12 * scale or var <= 0.0:
        raise NonPositiveVariance(
            f"permutation variance {var:.3e} is not positive (degenerate kernels?)"
        )
    return float(var)


def z_score(P: PooledProduct) -> DiffStatResult:
    """Standardized statistic; the permutation mean is exactly zero."""
    t = statistic_tilde(P)
    var = permutation_variance(moment_sums(P), P.m, P.n)
    return DiffStatResult(t, var, t / np.sqrt(var))
