"""Inner loops, each in a numba and a pure-numpy flavour.

The public dispatchers (``sq_distances``, ``relabel_sums``, ``dcoxs_relabel``)
route to the numba kernels when numba imports and ``DIFFASSOC_NUMBA`` is not
set to ``0``; otherwise to the numpy versions. Both flavours agree to ~1e-12
relative but are not bit-identical, so a given run is reproducible only
within one backend.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

HAVE_NUMBA = numba is not None
_FLAG = os.environ.get("DIFFASSOC_NUMBA", "1").strip().lower()
USE_NUMBA = HAVE_NUMBA and _FLAG not in ("0", "false", "no", "off")

# Indicator matrices in the numpy path are built this many relabelings at a time.
_CHUNK = 512


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


def _njit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# --------------------------------------------------------------------------
# pairwise squared distances
# --------------------------------------------------------------------------
def sq_distances_numpy(X: np.ndarray) -> np.ndarray:
    sq = np.einsum("ij,ij->i", X, X)
    D = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(D, 0.0, out=D)  # rounding can push tiny distances below zero
    D = 0.5 * (D + D.T)
    np.fill_diagonal(D, 0.0)
    return D


@_njit
def sq_distances_jit(X):
    n, d = X.shape
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            for k in range(d):
                t = X[i, k] - X[j, k]
                s += t * t
            D[i, j] = s
            D[j, i] = s
    return D


# --------------------------------------------------------------------------
# block sums of the pooled product under relabeling
# --------------------------------------------------------------------------
def relabel_sums_numpy(P, idx_a, idx_b):
    N = P.shape[0]
    n_rep = idx_a.shape[0]
    s_a = np.empty(n_rep)
    s_b = np.empty(n_rep)
    for start in range(0, n_rep, _CHUNK):
        stop = min(start + _CHUNK, n_rep)
        ind = np.zeros((N, stop - start))
        cols = np.arange(stop - start)
        ind[idx_a[start:stop].T, cols] = 1.0
        s_a[start:stop] = np.einsum("ib,ib->b", ind, P @ ind)
        ind = 1.0 - ind
        s_b[start:stop] = np.einsum("ib,ib->b", ind, P @ ind)
    return s_a, s_b


@_njit
def _block_sum(P, g):
    s = 0.0
    k = g.shape[0]
    for a in range(k):
        i = g[a]
        for c in range(k):
            s += P[i, g[c]]
    return s


@_njit
def relabel_sums_jit(P, idx_a, idx_b):
    n_rep = idx_a.shape[0]
    s_a = np.empty(n_rep)
    s_b = np.empty(n_rep)
    for r in range(n_rep):
        s_a[r] = _block_sum(P, idx_a[r])
        s_b[r] = _block_sum(P, idx_b[r])
    return s_a, s_b


# --------------------------------------------------------------------------
# dCoxS: Fisher-z difference under relabeling
# --------------------------------------------------------------------------
_R_CLIP = 1.0 - 1e-12


def _fisher_from_sums(k, sx, sy, sxx, syy, sxy):
    n_pairs = k * (k - 1) / 2.0
    vx = sxx - sx * sx / n_pairs
    vy = syy - sy * sy / n_pairs
    cxy = sxy - sx * sy / n_pairs
    with np.errstate(invalid="ignore", divide="ignore"):
        r = cxy / np.sqrt(vx * vy)
    r = np.where((vx > 0) & (vy > 0), r, np.nan)
    return np.arctanh(np.clip(r, -_R_CLIP, _R_CLIP))


def dcoxs_relabel_numpy(Dx, Dy, idx_a, idx_b):
    """Fisher-z(A) minus Fisher-z(B) for every relabeling.

    ``Dx`` and ``Dy`` must have zero diagonals; callers should shift them to
    roughly zero mean off the diagonal to keep the one-pass sums accurate.
    """
    N = Dx.shape[0]
    m = idx_a.shape[1]
    n = idx_b.shape[1]
    stack = np.concatenate([Dx, Dy, Dx * Dx, Dy * Dy, Dx * Dy], axis=0)
    n_rep = idx_a.shape[0]
    out = np.empty(n_rep)
    for start in range(0, n_rep, _CHUNK):
        stop = min(start + _CHUNK, n_rep)
        ind = np.zeros((N, stop - start))
        ind[idx_a[start:stop].T, np.arange(stop - start)] = 1.0
        zs = []
        for I, k in ((ind, m), (1.0 - ind, n)):
            q = (stack @ I).reshape(5, N, -1)
            sums = 0.5 * np.einsum("tib,ib->tb", q, I)
            zs.append(_fisher_from_sums(k, *sums))
        out[start:stop] = zs[0] - zs[1]
    return out


@_njit
def _fisher_group(Dx, Dy, g):
    k = g.shape[0]
    sx = 0.0
    sy = 0.0
    sxx = 0.0
    syy = 0.0
    sxy = 0.0
    for a in range(k):
        i = g[a]
        for c in range(a + 1, k):
            j = g[c]
            x = Dx[i, j]
            y = Dy[i, j]
            sx += x
            sy += y
            sxx += x * x
            syy += y * y
            sxy += x * y
    n_pairs = k * (k - 1) / 2.0
    vx = sxx - sx * sx / n_pairs
    vy = syy - sy * sy / n_pairs
    if vx <= 0.0 or vy <= 0.0:
        return np.nan
    r = (sxy - sx * sy / n_pairs) / np.sqrt(vx * vy)
    r = min(max(r, -_R_CLIP), _R_CLIP)
    return np.arctanh(r)


@_njit
def dcoxs_relabel_jit(Dx, Dy, idx_a, idx_b):
    n_rep = idx_a.shape[0]
    out = np.empty(n_rep)
    for r in range(n_rep):
        out[r] = _fisher_group(Dx, Dy, idx_a[r]) - _fisher_group(Dx, Dy, idx_b[r])
    return out


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------
def sq_distances(X: np.ndarray) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    return sq_distances_jit(X) if USE_NUMBA else sq_distances_numpy(X)


def relabel_sums(P, idx_a, idx_b):
    P = np.ascontiguousarray(P, dtype=np.float64)
    idx_a = np.ascontiguousarray(idx_a, dtype=np.int64)
    idx_b = np.ascontiguousarray(idx_b, dtype=np.int64)
    if USE_NUMBA:
        return relabel_sums_jit(P, idx_a, idx_b)
    return relabel_sums_numpy(P, idx_a, idx_b)


def dcoxs_relabel(Dx, Dy, idx_a, idx_b):
    Dx = np.ascontiguousarray(Dx, dtype=np.float64)
    Dy = np.ascontiguousarray(Dy, dtype=np.float64)
    idx_a = np.ascontiguousarray(idx_a, dtype=np.int64)
    idx_b = np.ascontiguousarray(idx_b, dtype=np.int64)
    if USE_NUMBA:
        return dcoxs_relabel_jit(Dx, Dy, idx_a, idx_b)
    return dcoxs_relabel_numpy(Dx, Dy, idx_a, idx_b)


def random_relabelings(rng: np.random.Generator, N: int, m: int, reps: int):
    """Draw ``reps`` uniformly random m-subsets of range(N) and their complements.

    Consumes the generator in fixed 4096-row blocks so the draw depends only
    on (rng state, N, m, reps).
    """
    idx_a = np.empty((reps, m), dtype=np.int64)
    idx_b = np.empty((reps, N - m), dtype=np.int64)
    for start in range(0, reps, 4096):
        stop = min(start + 4096, reps)
        perm = np.argsort(rng.random((stop - start, N)), axis=1, kind="stable")
        idx_a[start:stop] = np.sort(perm[:, :m], axis=1)
        idx_b[start:stop] = np.sort(perm[:, m:], axis=1)
    return idx_a, idx_b
