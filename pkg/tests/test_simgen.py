import numpy as np
import pytest
from scipy import stats

from diffassoc import SimConfig, ar1_covariance, gen_setting1, gen_setting2, generate, mvn_sample
from diffassoc.errors import FactorizationFailure, InputError, InvalidCaseParameter, InvalidRho
from diffassoc.simgen import SETTINGS


def test_ar1_examples():
    np.testing.assert_array_equal(ar1_covariance(4, 0.0), np.eye(4))
    np.testing.assert_allclose(ar1_covariance(3, 0.5), [[1, .5, .25], [.5, 1, .5], [.25, .5, 1]])
    S = ar1_covariance(50, 0.4)
    L = np.linalg.cholesky(S)
    assert np.max(np.abs(L @ L.T - S)) < 1e-10
    with pytest.raises(InvalidRho):
        ar1_covariance(3, 1.0)


@pytest.mark.parametrize("rho", [-0.95, -0.5, 0.3, 0.95])
def test_ar1_positive_definite(rho):
    assert np.linalg.eigvalsh(ar1_covariance(200, rho)).min() > 0


def test_mvn_moments_and_determinism():
    Z = mvn_sample(np.eye(2), 50_000, 1)
    assert np.all((Z.var(axis=0) > 0.97) & (Z.var(axis=0) < 1.03))
    np.testing.assert_array_equal(mvn_sample(np.eye(2), 100, 5), mvn_sample(np.eye(2), 100, 5))
    W = mvn_sample([[1, 0.9], [0.9, 1]], 50_000, 2)
    assert 0.885 <= np.corrcoef(W.T)[0, 1] <= 0.915
    with pytest.raises(FactorizationFailure):
        mvn_sample([[1, 2], [2, 1]], 10, 0)


def test_setting1_shapes_and_lognormal():
    cfg = SimConfig("s1-lognormal", 0.3, m=7, n=9, p=4, q=4, seed=3)
    ds = gen_setting1("lognormal", 0.3, cfg)
    assert ds.XA.shape == (7, 4) and ds.YB.shape == (9, 4)
    assert all(np.all(M > 0) for M in (ds.XA, ds.YA, ds.XB, ds.YB))


def test_setting1_split_carries_cross_covariance():
    cfg = SimConfig("s1-normal", 0.8, m=2, n=40_000, p=2, q=2, seed=0)
    ds = generate(cfg)
    # X's last and Y's first coordinate are adjacent in the AR(1) chain
    r = np.corrcoef(ds.XB[:, 1], ds.YB[:, 0])[0, 1]
    assert abs(r - 0.8) < 0.01


def test_case3_range():
    ds = gen_setting2(3, 0.5, SimConfig("s2-case3", 0.5, m=20, n=20, p=8, q=5))
    assert np.all(np.abs(ds.YA) <= 1) and np.all(np.abs(ds.YB) <= 1)
    np.testing.assert_allclose(ds.YA, np.sin(2 * np.pi * ds.XA[:, :5] / 3))
    np.testing.assert_allclose(ds.YB, np.sin(2.5 * np.pi * ds.XB[:, :5] / 3))


def test_case4_dependence_structure():
    ds = gen_setting2(4, 2, SimConfig("s2-case4", 2, m=30, n=30, p=12, q=15))
    assert ds.meta["dependent_coordinates"] == {"A": 10, "B": 12}
    assert np.allclose(ds.YA[:, :10], ds.YA[:, :1])
    # X1 = log|Z1| pins down |Z1|; the sign of Z1 is what sin(Z1) keeps beyond that
    assert np.allclose(np.abs(ds.YA[:, 0]), np.abs(np.sin(np.exp(ds.XA[:, 0]))))
    assert not np.allclose(ds.YA[:, 10], ds.YA[:, 0])
    assert np.allclose(ds.YB[:, :12], ds.YB[:, :1])
    assert not np.allclose(ds.YB[:, 12], ds.YB[:, 0])


@pytest.mark.parametrize("setting,rho", [
    ("s2-case1", 0.7), ("s2-case2", -1.5), ("s2-case3", -0.1),
    ("s2-case4", 1.5), ("s2-case4", -1), ("s2-case4", 41), ("s1-normal", 1.0),
])
def test_invalid_parameters(setting, rho):
    with pytest.raises(InputError):
        SimConfig(setting, rho)


def test_case_param_errors_are_case_errors():
    with pytest.raises(InvalidCaseParameter):
        SimConfig("s2-case1", 0.7)


@pytest.mark.parametrize("setting", SETTINGS)
def test_generators_deterministic(setting):
    cfg = SimConfig(setting, 0.0, m=5, n=6, p=10, q=10, seed=42)
    a, b = generate(cfg), generate(cfg)
    for name in ("XA", "YA", "XB", "YB"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))


@pytest.mark.parametrize("setting", SETTINGS)
def test_null_conditions_match(setting):
    # at rho = 0 the A and B generators coincide in distribution
    cfg = SimConfig(setting, 0.0, m=1000, n=1000, p=10, q=10, seed=7)
    ds = generate(cfg)
    for a, b in ((ds.XA[:, 0], ds.XB[:, 0]), (ds.YA[:, 0], ds.YB[:, 0])):
        assert stats.ks_2samp(a, b).pvalue > 0.001
