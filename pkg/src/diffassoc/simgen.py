"""Seeded generators for the simulation settings.

Random streams come from numpy's ``default_rng`` (PCG64 bit generator,
ziggurat normals). A seed may be an int, a sequence of ints (hashed through
``SeedSequence``, used for per-replicate substreams), or a ``Generator``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import linalg

from .errors import FactorizationFailure, InputError, InvalidCaseParameter, InvalidRho
from .inference import PairedDataset

SETTINGS = ("s1-normal", "s1-lognormal", "s2-case1", "s2-case2", "s2-case3", "s2-case4")
CASE4_BASE = 10


@dataclass(frozen=True)
class SimConfig:
    setting: str = "s1-normal"
    rho: float = 0.0
    m: int = 100
    n: int = 100
    p: int = 50
    q: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.setting not in SETTINGS:
            raise InputError(f"unknown setting {self.setting!r}; choose from {', '.join(SETTINGS)}")
        if self.m < 2 or self.n < 2:
            raise InputError("m and n must be >= 2")
        if self.p < 1 or self.q < 1:
            raise InputError("p and q must be >= 1")
        validate_rho(self.setting, self.rho, self.p, self.q)

    def to_dict(self) -> dict:
        return asdict(self)


def validate_rho(setting: str, rho: float, p: int, q: int) -> None:
    if not math.isfinite(rho):
        raise InvalidRho(f"rho must be finite, got {rho!r}")
    if setting.startswith("s1"):
        if abs(rho) >= 1:
            raise InvalidRho(f"{setting}: need |rho| < 1, got {rho}")
    elif setting in ("s2-case1", "s2-case2"):
        if abs(0.4 + rho) >= 1:
            raise InvalidCaseParameter(f"{setting}: need |0.4 + rho| < 1, got rho={rho}")
    elif setting == "s2-case3":
        if rho < 0:
            raise InvalidCaseParameter(f"{setting}: need rho >= 0, got {rho}")
        if q > p:
            raise InvalidCaseParameter(f"{setting}: Y is built from the first q of p X-coordinates; need q <= p")
    elif setting == "s2-case4":
        if rho < 0 or rho != int(rho):
            raise InvalidCaseParameter(f"{setting}: rho must be a nonnegative integer, got {rho}")
        if CASE4_BASE + int(rho) > q:
            raise InvalidCaseParameter(f"{setting}: need {CASE4_BASE} + rho <= q (q={q})")


def case4_dependent(rho: float) -> tuple[int, int]:
    """Number of Y coordinates tied to X's first coordinate in (A, B)."""
    return CASE4_BASE, CASE4_BASE + int(rho)


def ar1_covariance(dim: int, rho: float) -> np.ndarray:
    """Matrix with entries ``rho ** |i - j|``."""
    if not abs(rho) < 1:
        raise InvalidRho(f"AR(1) covariance needs |rho| < 1, got {rho}")
    lag = np.abs(np.subtract.outer(np.arange(dim), np.arange(dim)))
    return np.power(float(rho), lag)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def mvn_sample(cov: np.ndarray, count: int, seed=0) -> np.ndarray:
    """``count`` iid rows from N(0, cov) via the lower Cholesky factor."""
    cov = np.asarray(cov, dtype=np.float64)
    try:
        L = linalg.cholesky(cov, lower=True)
    except linalg.LinAlgError as exc:
        raise FactorizationFailure(f"covariance is not positive definite: {exc}") from exc
    z = _rng(seed).standard_normal((count, cov.shape[0]))
    return z @ L.T


def gen_setting1(dist: str, rho: float, cfg: SimConfig, seed=None) -> PairedDataset:
    """A: N(0, I); B: N(0, AR1(rho)) over p + q coordinates, split into X | Y.

    ``dist='lognormal'`` exponentiates elementwise.
    """
    if dist not in ("normal", "lognormal"):
        raise InputError(f"dist must be 'normal' or 'lognormal', got {dist!r}")
    validate_rho("s1-" + dist, rho, cfg.p, cfg.q)
    rng = _rng(cfg.seed if seed is None else seed)
    d = cfg.p + cfg.q
    A = mvn_sample(np.eye(d), cfg.m, rng)
    B = mvn_sample(ar1_covariance(d, rho), cfg.n, rng)
    if dist == "lognormal":
        A, B = np.exp(A), np.exp(B)
    meta = {"setting": "s1-" + dist, "rho": rho}
    return PairedDataset(A[:, : cfg.p], A[:, cfg.p :], B[:, : cfg.p], B[:, cfg.p :], meta)


def _case4_group(rng, count, p, q, dependent):
    Z = rng.standard_normal((count, p))
    X = np.log(np.abs(Z))
    Y = np.sin(rng.standard_normal((count, q)))
    Y[:, :dependent] = np.sin(Z[:, :1])
    return X, Y


def gen_setting2(case: int, rho: float, cfg: SimConfig, seed=None) -> PairedDataset:
    setting = f"s2-case{case}"
    if case not in (1, 2, 3, 4):
        raise InvalidCaseParameter(f"case must be 1..4, got {case}")
    validate_rho(setting, rho, cfg.p, cfg.q)
    rng = _rng(cfg.seed if seed is None else seed)
    p, q = cfg.p, cfg.q
    meta = {"setting": setting, "rho": rho}
    if case in (1, 2):
        A = mvn_sample(ar1_covariance(p + q, 0.4), cfg.m, rng)
        B = mvn_sample(ar1_covariance(p + q, 0.4 + rho), cfg.n, rng)
        if case == 2:
            A, B = np.exp(A), np.exp(B)
        return PairedDataset(A[:, :p], A[:, p:], B[:, :p], B[:, p:], meta)
    if case == 3:
        XA = rng.standard_normal((cfg.m, p))
        XB = rng.standard_normal((cfg.n, p))
        YA = np.sin(2.0 * np.pi * XA[:, :q] / 3.0)
        YB = np.sin((2.0 + rho) * np.pi * XB[:, :q] / 3.0)
        return PairedDataset(XA, YA, XB, YB, meta)
    dep_a, dep_b = case4_dependent(rho)
    meta["dependent_coordinates"] = {"A": dep_a, "B": dep_b}
    XA, YA = _case4_group(rng, cfg.m, p, q, dep_a)
    XB, YB = _case4_group(rng, cfg.n, p, q, dep_b)
    return PairedDataset(XA, YA, XB, YB, meta)


def generate(cfg: SimConfig, seed=None) -> PairedDataset:
    """Dataset for ``cfg``; ``seed`` overrides ``cfg.seed`` (e.g. a replicate substream)."""
    if cfg.setting.startswith("s1-"):
        ds = gen_setting1(cfg.setting[3:], cfg.rho, cfg, seed)
    else:
        ds = gen_setting2(int(cfg.setting[-1]), cfg.rho, cfg, seed)
    ds.meta["config"] = cfg.to_dict()
    return ds
