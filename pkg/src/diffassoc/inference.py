"""Normal-approximation p-values, Cauchy omnibus, and the end-to-end test."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np
from scipy import special

from . import _hot
from .diffstat import (
    DiffStatResult,
    PooledProduct,
    pooled_product_matrix,
    relabeled_statistics,
    statistic_tilde,
    z_score,
)
from .errors import DimensionMismatch, GroupTooSmall, InputError, TooLarge
from .hsic import hsic_nodiag, hsic_trace
from .kernels import (
    as_samples,
    center_kernel,
    gaussian_from_sq_distances,
    linear_kernel_matrix,
    median_heuristic_bandwidth,
    pairwise_sq_distances,
)

# Algorithm-level constant: p-values are capped here before the tangent transform.
P_CLAMP = 0.99
EXACT_LIMIT = 200_000


@dataclass
class PairedDataset:
    """Paired (X, Y) samples for conditions A (m rows) and B (n rows)."""

    XA: np.ndarray
    YA: np.ndarray
    XB: np.ndarray
    YB: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.XA = as_samples(self.XA, "XA")
        self.YA = as_samples(self.YA, "YA")
        self.XB = as_samples(self.XB, "XB")
        self.YB = as_samples(self.YB, "YB")
        if self.XA.shape[0] != self.YA.shape[0]:
            raise DimensionMismatch(f"XA has {self.XA.shape[0]} rows but YA has {self.YA.shape[0]}")
        if self.XB.shape[0] != self.YB.shape[0]:
            raise DimensionMismatch(f"XB has {self.XB.shape[0]} rows but YB has {self.YB.shape[0]}")
        if self.XA.shape[1] != self.XB.shape[1]:
            raise DimensionMismatch(f"XA has {self.XA.shape[1]} columns but XB has {self.XB.shape[1]}")
        if self.YA.shape[1] != self.YB.shape[1]:
            raise DimensionMismatch(f"YA has {self.YA.shape[1]} columns but YB has {self.YB.shape[1]}")
        if self.m < 2 or self.n < 2:
            raise GroupTooSmall(f"each condition needs >= 2 samples (m={self.m}, n={self.n})")

    @property
    def m(self) -> int:
        return self.XA.shape[0]

    @property
    def n(self) -> int:
        return self.XB.shape[0]

    def pooled(self) -> tuple[np.ndarray, np.ndarray]:
        return np.vstack([self.XA, self.XB]), np.vstack([self.YA, self.YB])


@dataclass
class KernelResult:
    t_tilde: float
    variance: float
    z: float
    p: float


@dataclass
class TestResult:
    gaussian: KernelResult
    linear: KernelResult
    p_omnibus: float
    bandwidths: dict
    hsic_report: dict
    m: int
    n: int

    # not a pytest test class
    __test__ = False

    @property
    def z_gaussian(self) -> float:
        return self.gaussian.z

    @property
    def z_linear(self) -> float:
        return self.linear.z

    @property
    def p_gaussian(self) -> float:
        return self.gaussian.p

    @property
    def p_linear(self) -> float:
        return self.linear.p

    def to_dict(self) -> dict:
        return asdict(self)


def normal_pvalue(z: float) -> float:
    """Two-sided standard-normal p-value, ``2 (1 - Phi(|z|))``."""
    return float(special.erfc(abs(z) / math.sqrt(2.0)))


def _cauchy_transform(p: float) -> float:
    """``tan((0.5 - min(p, 0.99)) pi)``; written as ``cot(p pi)`` below 1/2,
    which avoids rounding (0.5 - p) near the pole at p = 0."""
    p = min(p, P_CLAMP)
    if p <= 0.0:
        return math.inf
    if p <= 0.5:
        return 1.0 / math.tan(p * math.pi)
    return math.tan((0.5 - p) * math.pi)


def cauchy_statistic(p_g: float, p_l: float) -> float:
    return 0.5 * _cauchy_transform(p_g) + 0.5 * _cauchy_transform(p_l)


def cauchy_combine(p_g: float, p_l: float) -> float:
    """Equal-weight Cauchy combination of the Gaussian- and linear-kernel p-values.

    The averaged tangent transform is a standard Cauchy variate under the
    null; the omnibus p-value is its upper tail ``1/2 - arctan(S)/pi``.
    """
    for p in (p_g, p_l):
        if not 0.0 <= p <= 1.0:
            raise InputError(f"p-values must lie in [0, 1], got {p!r}")
    S = cauchy_statistic(p_g, p_l)
    if math.isinf(S):
        return 0.0
    if S > 1.0:
        # same value, without cancellation for large S
        return math.atan(1.0 / S) / math.pi
    return 0.5 - math.atan(S) / math.pi


def _kernel_pair(X, Y, kind, bw_x=None, bw_y=None):
    if kind == "linear":
        return linear_kernel_matrix(X), linear_kernel_matrix(Y), None, None
    dx = pairwise_sq_distances(X)
    dy = pairwise_sq_distances(Y)
    if bw_x is None:
        bw_x = median_heuristic_bandwidth(dx)
    if bw_y is None:
        bw_y = median_heuristic_bandwidth(dy)
    return gaussian_from_sq_distances(dx, bw_x), gaussian_from_sq_distances(dy, bw_y), bw_x, bw_y


def pooled_product_for(ds: PairedDataset, kind: str, bw_x=None, bw_y=None):
    """Pooled product for one kernel, plus raw pooled Gram matrices and bandwidths."""
    X, Y = ds.pooled()
    Kx, Ky, bw_x, bw_y = _kernel_pair(X, Y, kind, bw_x, bw_y)
    blocks = [ds.m, ds.n]
    P = pooled_product_matrix(center_kernel(Kx, blocks), center_kernel(Ky, blocks), ds.m, ds.n)
    return P, Kx, Ky, (bw_x, bw_y)


def _group_hsic(Kx, Ky, m):
    out = {}
    for name, sl in (("A", slice(0, m)), ("B", slice(m, None))):
        kx, ky = Kx[sl, sl], Ky[sl, sl]
        out[name] = {
            "trace": hsic_trace(kx, ky),
            "nodiag": hsic_nodiag(center_kernel(kx), center_kernel(ky)),
        }
    return out


def run_test(
    ds: PairedDataset,
    bandwidth_x: float | None = None,
    bandwidth_y: float | None = None,
    report_hsic: bool = True,
) -> TestResult:
    """Gaussian- and linear-kernel differential tests combined into one p-value.

    Gaussian bandwidths default to the median heuristic on the pooled X and
    pooled Y samples, so the kernel does not depend on the condition labels.
    """
    per_kernel = {}
    report = {}
    bandwidths = {}
    for kind in ("gaussian", "linear"):
        P, Kx, Ky, (bx, by) = pooled_product_for(ds, kind, bandwidth_x, bandwidth_y)
        res: DiffStatResult = z_score(P)
        per_kernel[kind] = KernelResult(res.t_tilde, res.variance, float(res.z), normal_pvalue(res.z))
        if kind == "gaussian":
            bandwidths = {"x": bx, "y": by}
        if report_hsic:
            report[kind] = _group_hsic(Kx, Ky, ds.m)
    p_omni = cauchy_combine(per_kernel["gaussian"].p, per_kernel["linear"].p)
    return TestResult(
        per_kernel["gaussian"], per_kernel["linear"], p_omni, bandwidths, report, ds.m, ds.n
    )


def _exceed_count(t_perm: np.ndarray, t_obs: float) -> int:
    # Relabelings that mirror the observed one can reproduce |t| only up to
    # summation-order rounding; treat those as ties.
    thresh = abs(t_obs) * (1.0 - 1e-10)
    return int(np.count_nonzero(np.abs(t_perm) >= thresh))


def monte_carlo_permutation_pvalue(P: PooledProduct, reps: int, seed=0) -> float:
    """Add-one Monte Carlo two-sided permutation p-value of the statistic.

    Entries of ``P`` stay fixed; only the condition labels are redrawn.
    """
    if reps < 1:
        raise InputError("reps must be >= 1")
    rng = np.random.default_rng(seed)
    t_obs = statistic_tilde(P)
    idx_a, idx_b = _hot.random_relabelings(rng, P.N, P.m, reps)
    t_perm = relabeled_statistics(P, idx_a, idx_b)
    return (1 + _exceed_count(t_perm, t_obs)) / (reps + 1)


def _all_subsets(N: int, m: int):
    if math.comb(N, m) > EXACT_LIMIT:
        raise TooLarge(f"C({N},{m}) = {math.comb(N, m)} exceeds {EXACT_LIMIT}")
    idx_a = np.array(list(combinations(range(N), m)), dtype=np.int64)
    mask = np.ones((idx_a.shape[0], N), dtype=bool)
    mask[np.arange(idx_a.shape[0])[:, None], idx_a] = False
    idx_b = np.nonzero(mask)[1].reshape(idx_a.shape[0], N - m)
    return idx_a, idx_b


def exact_permutation_distribution(P: PooledProduct) -> np.ndarray:
    """Statistic for every m-subset of the pooled indices (lexicographic order)."""
    idx_a, idx_b = _all_subsets(P.N, P.m)
    return relabeled_statistics(P, idx_a, idx_b)


def exact_permutation_pvalue(P: PooledProduct) -> float:
    t_all = exact_permutation_distribution(P)
    return _exceed_count(t_all, statistic_tilde(P)) / t_all.size
