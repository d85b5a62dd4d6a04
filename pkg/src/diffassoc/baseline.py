"""dCoxS comparison method.

Per condition, correlate the pairwise Euclidean sample distances in X-space
with those in Y-space, Fisher-transform, and compare conditions by a
permutation test that reassigns (X, Y) pairs between conditions.
"""
from __future__ import annotations

import numpy as np

from . import _hot
from .errors import DegenerateData, DimensionMismatch, InputError
from .inference import PairedDataset
from .kernels import as_samples


def _distances(X: np.ndarray) -> np.ndarray:
    return np.sqrt(_hot.sq_distances(X))


def dcoxs_score(X, Y) -> float:
    """Fisher z of the correlation between X- and Y-space sample distances."""
    X = as_samples(X, "X")
    Y = as_samples(Y, "Y")
    if X.shape[0] != Y.shape[0]:
        raise DimensionMismatch(f"X has {X.shape[0]} samples but Y has {Y.shape[0]}")
    if X.shape[0] < 3:
        raise InputError("dCoxS needs at least 3 samples")
    iu = np.triu_indices(X.shape[0], k=1)
    dx = _distances(X)[iu]
    dy = _distances(Y)[iu]
    if np.ptp(dx) == 0 or np.ptp(dy) == 0:
        raise DegenerateData("pairwise distance vector is constant")
    r = np.corrcoef(dx, dy)[0, 1]
    return float(np.arctanh(np.clip(r, -1 + 1e-12, 1 - 1e-12)))


def _shifted(D: np.ndarray) -> np.ndarray:
    # Pearson is shift-invariant; centering keeps the one-pass sums accurate.
    iu = np.triu_indices(D.shape[0], k=1)
    out = D - D[iu].mean()
    np.fill_diagonal(out, 0.0)
    return out


def dcoxs_test(ds: PairedDataset, reps: int = 999, seed=0) -> float:
    """Two-sided add-one permutation p-value of ``z_A - z_B``.

    Pooled distance matrices are computed once; each relabeling picks the
    within-group pairs out of them, which equals recomputing distances on
    the relabeled groups.
    """
    if reps < 1:
        raise InputError("reps must be >= 1")
    observed = dcoxs_score(ds.XA, ds.YA) - dcoxs_score(ds.XB, ds.YB)
    X, Y = ds.pooled()
    Dx = _shifted(_distances(X))
    Dy = _shifted(_distances(Y))
    rng = np.random.default_rng(seed)
    idx_a, idx_b = _hot.random_relabelings(rng, ds.m + ds.n, ds.m, reps)
    perm = _hot.dcoxs_relabel(Dx, Dy, idx_a, idx_b)
    thresh = abs(observed) * (1.0 - 1e-10)
    hits = int(np.count_nonzero(np.abs(perm) >= thresh))  # NaN never counts
    return (1 + hits) / (reps + 1)
