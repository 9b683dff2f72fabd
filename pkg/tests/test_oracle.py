import math

import numpy as np
import pytest
from scipy import stats

from riskdist import oracle
from riskdist.dependence import AggregatePosition
from riskdist.distortion import IDENTITY, Mixture, TVaRCap, VaRIndicator, WangTransform, dual
from riskdist.distributions import Empirical, Laplace, LogNormal, Normal, StudentT, Uniform
from riskdist.oracle import (OracleSample, empirical_quantile, empirical_rho, grid_sample, oracle_rho,
                             spectral_weights, xside_rho)
from riskdist.risk_measures import rho


def sample(values):
    v = np.sort(np.asarray(values, dtype=float))
    return OracleSample(v, "test", v.size)


# -- worked examples -------------------------------------------------------

def test_grid_sample_examples():
    s = grid_sample(AggregatePosition.counter_pair(Normal(0, 1), Normal(0, 1)), 1000)
    np.testing.assert_array_equal(s.values, 0.0)
    s = grid_sample(AggregatePosition.comonotone([Uniform(0, 1)]), 4)
    np.testing.assert_allclose(s.values, [0.125, 0.375, 0.625, 0.875], atol=1e-16)
    s = grid_sample(AggregatePosition.counter_pair(Normal(0, 2), Normal(0, 1)), 10 ** 6)
    assert empirical_quantile(s, 0.95) == pytest.approx(stats.norm.ppf(0.95), abs=1e-3)


def test_empirical_rho_examples():
    s = grid_sample(AggregatePosition.comonotone([LogNormal(0, 0.5)]), 1000)
    assert empirical_rho(IDENTITY, s) == pytest.approx(float(np.mean(s.values)), rel=1e-14)
    s = grid_sample(AggregatePosition.comonotone([LogNormal(0, 0.5)]), 1001)
    for p in (0.5, 0.9, 0.95):
        assert empirical_rho(VaRIndicator(p), s) == s.values[math.ceil(p * s.n) - 1]
    # when pN is an integer the node j/N ties with the float 1 - p and may land one rank higher
    s = grid_sample(AggregatePosition.comonotone([LogNormal(0, 0.5)]), 1000)
    for p in (0.5, 0.9, 0.95):
        k = math.ceil(p * s.n) - 1
        assert empirical_rho(VaRIndicator(p), s) in (s.values[k], s.values[k + 1])
    s = grid_sample(AggregatePosition.comonotone([Uniform(0, 1)]), 10)
    assert empirical_rho(TVaRCap(0.9), s) == pytest.approx(0.95, abs=1e-15)


def test_empirical_quantile_examples():
    s = sample([1, 2, 3, 4])
    assert empirical_quantile(s, 0.5, "left") == 2
    assert empirical_quantile(s, 0.5, "right") == 3
    assert empirical_quantile(s, 0.5, alpha=0.5) == 2.5
    with pytest.raises(ValueError):
        empirical_quantile(s, 0.5, "middle")
    with pytest.raises(ValueError):
        empirical_quantile(s, 1.0)


def test_xside_examples():
    assert xside_rho(IDENTITY, Normal(1.3, 2)) == pytest.approx(1.3, abs=1e-9)
    assert xside_rho(TVaRCap(0.95), Normal(0, 1)) == pytest.approx(2.062713, abs=1e-6)
    assert xside_rho(VaRIndicator(0.9), Uniform(0, 1)) == pytest.approx(0.9, abs=1e-10)


# -- structure ---------------------------------------------------------------

def test_spectral_weights_telescope():
    for g in (IDENTITY, TVaRCap(0.9), WangTransform(0.99), dual(VaRIndicator(0.3))):
        w = spectral_weights(g, 1000)
        assert w.sum() == pytest.approx(1.0, abs=1e-14)
        assert np.all(w >= -1e-16)


def test_oracle_sample_validation():
    with pytest.raises(ValueError):
        OracleSample(np.array([2.0, 1.0]), "x", 2)
    with pytest.raises(ValueError):
        OracleSample(np.array([1.0]), "x", 2)
    with pytest.raises(ValueError):
        grid_sample(AggregatePosition.comonotone([Normal(0, 1)]), 0)
    s = sample([1, 2])
    with pytest.raises(ValueError):
        s.values[0] = 5.0


def test_grid_sample_is_deterministic():
    pos = AggregatePosition.counter_pair(StudentT(3), LogNormal(0, 1))
    a = grid_sample(pos, 4096)
    b = grid_sample(pos, 4096)
    np.testing.assert_array_equal(a.values, b.values)
    assert empirical_rho(WangTransform(0.9), a) == empirical_rho(WangTransform(0.9), b)


def test_as_distribution_roundtrip():
    s = grid_sample(AggregatePosition.comonotone([Normal(0, 1), Uniform(0, 1)]), 2000)
    d = s.as_distribution()
    assert isinstance(d, Empirical)
    # the oracle is itself an empirical law, so the engine must reproduce it exactly
    for g in (TVaRCap(0.9), VaRIndicator(0.95), WangTransform(0.8)):
        assert rho(g, d).value == pytest.approx(empirical_rho(g, s), rel=1e-12, abs=1e-13)


def test_default_n_env_override(monkeypatch):
    monkeypatch.delenv(oracle.ENV_N, raising=False)
    assert oracle.default_n() == 2 ** 20
    assert oracle.default_n(heavy=True) == 2 ** 22
    monkeypatch.setenv(oracle.ENV_N, "4096")
    assert oracle.default_n(heavy=True) == 4096
    monkeypatch.setenv(oracle.ENV_N, "0")
    with pytest.raises(ValueError):
        oracle.default_n()


# -- convergence -------------------------------------------------------------

@pytest.mark.parametrize("g,d", [
    (TVaRCap(0.9), Uniform(0, 1)),
    (IDENTITY, Normal(0, 1)),
    (TVaRCap(0.9), Normal(1, 2)),
    (dual(TVaRCap(0.8)), Laplace(0, 1)),
    (Mixture(0.5, TVaRCap(0.9), 0.5, IDENTITY), LogNormal(0, 0.5)),
])
def test_oracle_converges_on_lipschitz_targets(g, d):
    # quantiles with light tails and Lipschitz g: the error at least halves when N grows by 4
    exact = rho(g, d).value
    errs = []
    for n in (2 ** 12, 2 ** 14, 2 ** 16):
        errs.append(abs(oracle_rho(g, AggregatePosition.comonotone([d]), n) - exact))
    assert errs[-1] < 1e-4 * max(1.0, abs(exact))
    for coarse, fine in zip(errs[:-1], errs[1:]):
        assert fine <= coarse / 2 or fine < 1e-13


@pytest.mark.parametrize("g", [TVaRCap(0.99), WangTransform(0.99)])
def test_oracle_converges_monotonically_on_heavy_tails(g):
    # the counter-monotonic t2 & t5 pair that dominates the oracle's error budget:
    # the gap to the exact value shrinks with N and keeps one sign (the oracle sits below)
    exact = rho(g, StudentT(2)).value + rho(dual(g), StudentT(5)).value
    pos = AggregatePosition.counter_pair(StudentT(2), StudentT(5))
    gaps = [oracle_rho(g, pos, n) - exact for n in (2 ** 12, 2 ** 14, 2 ** 16, 2 ** 18)]
    assert all(gap < 0 for gap in gaps)
    assert all(abs(b) < abs(a) for a, b in zip(gaps[:-1], gaps[1:]))


# -- x-side representation -----------------------------------------------------

@pytest.mark.parametrize("d", [Normal(0.5, 1.5), StudentT(2), LogNormal(0, 1), Uniform(-1, 3), Laplace(2, 0.5)])
@pytest.mark.parametrize("g", [IDENTITY, VaRIndicator(0.9), TVaRCap(0.95), WangTransform(0.9),
                               dual(TVaRCap(0.7)), Mixture(0.4, VaRIndicator(0.9), 0.6, dual(VaRIndicator(0.8)))])
def test_xside_matches_quantile_side(g, d):
    a = rho(g, d).value
    b = xside_rho(g, d)
    assert a == pytest.approx(b, rel=1e-8, abs=1e-10)


def test_xside_empirical_is_exact():
    d = Empirical([-3, -1, 2, 2, 7])
    for g in (IDENTITY, TVaRCap(0.6), dual(VaRIndicator(0.4)), VaRIndicator(0.4)):
        assert xside_rho(g, d) == pytest.approx(rho(g, d).value, abs=1e-13)
