"""Empirical HSIC estimators.

``hsic_trace`` is the production path. ``hsic_sums`` evaluates the same
quantity as the raw three-term double/triple/quadruple sum and exists as an
independent check on it. ``hsic_nodiag`` is the diagonal-removed version
used by the differential statistic.
"""
from __future__ import annotations

import numpy as np

from .errors import GroupTooSmall, SizeMismatch
from .kernels import center_kernel


def _pair(Kx, Ky):
    Kx = np.asarray(Kx, dtype=np.float64)
    Ky = np.asarray(Ky, dtype=np.float64)
    if Kx.shape != Ky.shape or Kx.ndim != 2 or Kx.shape[0] != Kx.shape[1]:
        raise SizeMismatch(f"kernel shapes differ or are not square: {Kx.shape} vs {Ky.shape}")
    return Kx, Ky


def hsic_trace(Kx, Ky) -> float:
    """``trace(H Kx H H Ky H) / N^2``."""
    Kx, Ky = _pair(Kx, Ky)
    N = Kx.shape[0]
    if N < 2:
        raise GroupTooSmall("HSIC needs at least 2 samples")
    # trace(A B) for symmetric A, B is the Frobenius inner product; summing the
    # elementwise product in a fixed order keeps hsic_trace(Kx, Ky) == hsic_trace(Ky, Kx).
    return float(np.sum(center_kernel(Kx) * center_kernel(Ky)) / N**2)


def hsic_sums(Kx, Ky) -> float:
    """Three-term sum form of the biased HSIC estimate, over unrestricted indices."""
    Kx, Ky = _pair(Kx, Ky)
    N = Kx.shape[0]
    term1 = np.sum(Kx * Ky) / N**2
    term2 = Kx.sum() * Ky.sum() / N**4
    # sum_{i,j,u} Kx[i,j] Ky[i,u] = sum_i rowsum(Kx)_i rowsum(Ky)_i
    term3 = 2.0 * np.dot(Kx.sum(axis=1), Ky.sum(axis=1)) / N**3
    return float(term1 + term2 - term3)


def hsic_nodiag(Kc_x, Kc_y, n_group: int | None = None) -> float:
    """``sum_{i != j} Kc_x[i,j] Kc_y[i,j] / (n (n - 1))`` for centered kernels."""
    Kc_x, Kc_y = _pair(Kc_x, Kc_y)
    n = Kc_x.shape[0]
    if n_group is not None and n_group != n:
        raise SizeMismatch(f"n_group={n_group} but kernels are {n}x{n}")
    if n < 2:
        raise GroupTooSmall("diagonal-removed HSIC needs at least 2 samples")
    prod = Kc_x * Kc_y
    return float((prod.sum() - np.trace(prod)) / (n * (n - 1)))
