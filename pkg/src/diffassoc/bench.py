"""Monte Carlo size/power estimation and Q-Q data for the permutation z-score.

Replicate ``r`` of a run seeded with ``seed`` draws everything from
``SeedSequence([seed, r])`` (data from its first child, dCoxS relabelings
from its second), so counts do not depend on how replicates are spread
over worker processes.
"""
from __future__ import annotations

import csv
import io
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from . import _hot
from .baseline import dcoxs_test
from .diffstat import moment_sums, permutation_variance, relabeled_statistics
from .errors import InputError
from .inference import pooled_product_for, run_test
from .simgen import SimConfig, generate

METHODS = ("new", "dcoxs")
CSV_FIELDS = ["setting", "rho", "method", "replicates", "rejections", "rate", "alpha", "seed"]


@dataclass
class PowerEstimate:
    setting: str
    rho: float
    replicates: int
    alpha: float
    seed: int
    rejections_new: int | None = None
    rejections_dcoxs: int | None = None
    wall_time: float = 0.0

    @property
    def rate_new(self) -> float | None:
        return None if self.rejections_new is None else self.rejections_new / self.replicates

    @property
    def rate_dcoxs(self) -> float | None:
        return None if self.rejections_dcoxs is None else self.rejections_dcoxs / self.replicates


def worker_cap(jobs: int) -> int:
    """Effective worker count: ``jobs`` capped by DIFFASSOC_THREADS (0 = no cap)."""
    if jobs <= 0:
        jobs = os.cpu_count() or 1
    try:
        cap = int(os.environ.get("DIFFASSOC_THREADS", "0"))
    except ValueError:
        cap = 0
    return max(1, min(jobs, cap) if cap > 0 else jobs)


def _replicate(cfg: SimConfig, r: int, methods: tuple, alpha: float, dcoxs_reps: int):
    data_ss, perm_ss = np.random.SeedSequence([cfg.seed, r]).spawn(2)
    ds = generate(cfg, np.random.default_rng(data_ss))
    hit_new = hit_dcoxs = 0
    if "new" in methods:
        hit_new = int(run_test(ds, report_hsic=False).p_omnibus <= alpha)
    if "dcoxs" in methods:
        hit_dcoxs = int(dcoxs_test(ds, dcoxs_reps, np.random.default_rng(perm_ss)) <= alpha)
    return hit_new, hit_dcoxs


def _run_chunk(args):
    cfg, rs, methods, alpha, dcoxs_reps = args
    out = np.zeros(2, dtype=np.int64)
    for r in rs:
        out += _replicate(cfg, r, methods, alpha, dcoxs_reps)
    return cfg.rho, out


def _check(replicates, alpha, methods):
    if replicates < 1:
        raise InputError("replicates must be >= 1")
    if not 0.0 <= alpha <= 1.0:
        raise InputError(f"alpha must be in [0, 1], got {alpha}")
    bad = set(methods) - set(METHODS)
    if bad or not methods:
        raise InputError(f"methods must be a nonempty subset of {METHODS}, got {sorted(methods)}")


def power_curve(
    cfg: SimConfig,
    rho_grid,
    replicates: int = 1000,
    alpha: float = 0.05,
    methods=("new", "dcoxs"),
    jobs: int = 1,
    dcoxs_reps: int = 999,
) -> list[PowerEstimate]:
    """One :class:`PowerEstimate` per grid value of rho."""
    methods = tuple(m for m in METHODS if m in methods)
    _check(replicates, alpha, methods)
    rho_grid = [float(r) for r in rho_grid]
    if not rho_grid:
        raise InputError("rho grid is empty")
    cfgs = [replace(cfg, rho=rho) for rho in rho_grid]  # validates each rho
    workers = worker_cap(jobs)
    n_chunks = max(1, min(replicates, 4 * workers))
    tasks = []
    for i, c in enumerate(cfgs):
        for rs in np.array_split(np.arange(replicates), n_chunks):
            if rs.size:
                tasks.append((i, (c, rs.tolist(), methods, alpha, dcoxs_reps)))
    totals = [np.zeros(2, dtype=np.int64) for _ in cfgs]
    elapsed = [0.0 for _ in cfgs]
    t0 = time.perf_counter()
    if workers == 1:
        for i, task in tasks:
            t1 = time.perf_counter()
            totals[i] += _run_chunk(task)[1]
            elapsed[i] += time.perf_counter() - t1
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for (i, _), (_, counts) in zip(tasks, pool.map(_run_chunk, [t for _, t in tasks])):
                totals[i] += counts
        elapsed = [(time.perf_counter() - t0) / len(cfgs)] * len(cfgs)
    out = []
    for c, tot, wt in zip(cfgs, totals, elapsed):
        out.append(
            PowerEstimate(
                setting=c.setting,
                rho=c.rho,
                replicates=replicates,
                alpha=alpha,
                seed=c.seed,
                rejections_new=int(tot[0]) if "new" in methods else None,
                rejections_dcoxs=int(tot[1]) if "dcoxs" in methods else None,
                wall_time=wt,
            )
        )
    return out


def estimate_size_power(
    cfg: SimConfig,
    replicates: int = 1000,
    alpha: float = 0.05,
    methods=("new", "dcoxs"),
    jobs: int = 1,
    dcoxs_reps: int = 999,
) -> PowerEstimate:
    return power_curve(cfg, [cfg.rho], replicates, alpha, methods, jobs, dcoxs_reps)[0]


def estimates_to_csv(estimates: list[PowerEstimate]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for e in estimates:
        for method, hits in (("new", e.rejections_new), ("dcoxs", e.rejections_dcoxs)):
            if hits is None:
                continue
            w.writerow(
                [e.setting, repr(e.rho), method, e.replicates, hits,
                 repr(hits / e.replicates), repr(e.alpha), e.seed]
            )
    return buf.getvalue()


def qq_data(cfg: SimConfig, n_perms: int = 10_000, kernel: str = "gaussian"):
    """Sorted permutation z-scores paired with standard-normal quantiles.

    One null dataset is drawn from ``cfg``; its pooled product is fixed and
    only the labels are redrawn, so the variance is shared by all relabelings.

    Returns
    -------
    theoretical, observed : ndarray
        ``Phi^{-1}((i - 0.5) / n_perms)`` and the ascending z-scores.
    """
    if n_perms < 100:
        raise InputError("n_perms must be >= 100")
    if cfg.rho != 0:
        raise InputError("Q-Q data is defined under the null (rho = 0)")
    if kernel not in ("gaussian", "linear"):
        raise InputError(f"kernel must be gaussian or linear, got {kernel!r}")
    data_ss, perm_ss = np.random.SeedSequence(cfg.seed).spawn(2)
    ds = generate(cfg, np.random.default_rng(data_ss))
    P = pooled_product_for(ds, kernel)[0]
    sd = np.sqrt(permutation_variance(moment_sums(P), P.m, P.n))
    idx_a, idx_b = _hot.random_relabelings(np.random.default_rng(perm_ss), P.N, P.m, n_perms)
    z = np.sort(relabeled_statistics(P, idx_a, idx_b) / sd)
    theo = stats.norm.ppf((np.arange(1, n_perms + 1) - 0.5) / n_perms)
    return theo, z


def ks_distance(z) -> float:
    """Kolmogorov-Smirnov distance between the sample and N(0, 1)."""
    return float(stats.kstest(np.asarray(z), "norm").statistic)
