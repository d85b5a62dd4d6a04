"""Gram matrices for the Gaussian and linear kernels, and block centering."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from . import _hot
from .errors import BlockMismatch, DegenerateData, InputError

KernelKind = Literal["gaussian", "linear"]


@dataclass(frozen=True)
class KernelSpec:
    """Which kernel to build.

    ``bandwidth=None`` means the median heuristic on the supplied samples
    (Gaussian only; ignored for the linear kernel).
    """

    kind: KernelKind = "gaussian"
    bandwidth: float | None = None

    def __post_init__(self):
        if self.kind not in ("gaussian", "linear"):
            raise InputError(f"unknown kernel kind {self.kind!r}")
        if self.bandwidth is not None and not (np.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise InputError(f"bandwidth must be positive, got {self.bandwidth!r}")


def as_samples(data, name: str = "data") -> np.ndarray:
    """Validate and return an (n, d) float64 sample matrix."""
    X = np.asarray(data, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise InputError(f"{name}: expected a non-empty 2-D matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InputError(f"{name}: contains NaN or Inf")
    return X


def pairwise_sq_distances(data) -> np.ndarray:
    """Squared Euclidean distances between all pairs of rows."""
    return _hot.sq_distances(as_samples(data))


def median_heuristic_bandwidth(dist2: np.ndarray) -> float:
    """``sqrt(median(d2) / 2)`` over the strictly upper triangle of ``dist2``.

    Raises
    ------
    DegenerateData
        If the median squared distance is zero.
    """
    dist2 = np.asarray(dist2, dtype=np.float64)
    N = dist2.shape[0]
    if N < 2:
        raise InputError("median heuristic needs at least 2 samples")
    med = float(np.median(dist2[np.triu_indices(N, k=1)]))
    if med <= 0.0:
        raise DegenerateData("median pairwise distance is zero; cannot pick a Gaussian bandwidth")
    return float(np.sqrt(med / 2.0))


def gaussian_from_sq_distances(dist2: np.ndarray, bandwidth: float) -> np.ndarray:
    if not bandwidth > 0:
        raise InputError(f"bandwidth must be positive, got {bandwidth!r}")
    K = np.exp(dist2 * (-0.5 / bandwidth**2))
    np.fill_diagonal(K, 1.0)
    return K


def gaussian_kernel_matrix(data, bandwidth: float | None = None) -> np.ndarray:
    """Gaussian Gram matrix ``exp(-|x_i - x_j|^2 / (2 bw^2))``.

    With ``bandwidth=None`` the median heuristic is applied to ``data``.
    """
    dist2 = pairwise_sq_distances(data)
    if bandwidth is None:
        bandwidth = median_heuristic_bandwidth(dist2)
    return gaussian_from_sq_distances(dist2, bandwidth)


def linear_kernel_matrix(data) -> np.ndarray:
    X = as_samples(data)
    K = X @ X.T
    return 0.5 * (K + K.T)


def kernel_matrix(data, spec: KernelSpec) -> tuple[np.ndarray, float | None]:
    """Gram matrix for ``spec``; also returns the bandwidth actually used."""
    if spec.kind == "linear":
        return linear_kernel_matrix(data), None
    dist2 = pairwise_sq_distances(data)
    bw = spec.bandwidth if spec.bandwidth is not None else median_heuristic_bandwidth(dist2)
    return gaussian_from_sq_distances(dist2, bw), bw


def _check_blocks(N: int, blocks: Sequence[int]) -> list[int]:
    blocks = [int(b) for b in blocks]
    if any(b < 1 for b in blocks) or sum(blocks) != N:
        raise BlockMismatch(f"block sizes {blocks} do not partition {N} samples")
    return blocks


def center_kernel(K: np.ndarray, blocks: Sequence[int] | None = None) -> np.ndarray:
    """Return ``H K H`` with ``H`` block-diagonal of per-block centering matrices.

    ``blocks=None`` (or ``[N]``) is ordinary double centering. Computed in
    O(N^2) from block means rather than by forming ``H``.
    """
    K = np.asarray(K, dtype=np.float64)
    N = K.shape[0]
    if K.ndim != 2 or K.shape[1] != N:
        raise BlockMismatch(f"kernel matrix must be square, got {K.shape}")
    blocks = _check_blocks(N, [N] if blocks is None else blocks)
    bounds = np.cumsum([0] + blocks)
    # row_means[i, b] = mean of K[i, block b]
    row_means = np.column_stack(
        [K[:, lo:hi].mean(axis=1) for lo, hi in zip(bounds[:-1], bounds[1:])]
    )
    label = np.repeat(np.arange(len(blocks)), blocks)
    # block_means[a, b] = mean of K[block a, block b]
    block_means = np.vstack(
        [row_means[lo:hi].mean(axis=0) for lo, hi in zip(bounds[:-1], bounds[1:])]
    )
    r = row_means[:, label]  # mean over j's block, for each (i, j)
    Kc = K - r - r.T + block_means[label][:, label]
    return 0.5 * (Kc + Kc.T)
