import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from riskdist.dependence import (EQUAL, INCOMPARABLE, X_LE_Y, Y_LE_X, AggregatePosition, Direction, DispersiveVerdict,
                                 Leg, aggregate_quantile, certify_counter_pair, check_dispersive, comonotonic_rho,
                                 counter_sum_quantile, frechet_lower, frechet_upper)
from riskdist.distortion import IDENTITY, TVaRCap, VaRIndicator, WangTransform
from riskdist.distributions import Empirical, Laplace, Logistic, LogNormal, Normal, StudentT, Uniform
from riskdist.errors import ApplicabilityError, NumericalError

Z95 = 1.6448536269514722


def test_aggregate_quantile_examples():
    pos = AggregatePosition.counter_pair(Normal(0, 1), Normal(0, 1))
    np.testing.assert_allclose(aggregate_quantile(pos, np.array([0.01, 0.3, 0.5, 0.99])), 0.0, atol=1e-15)
    pos = AggregatePosition.counter_pair(Normal(0, 2), Normal(0, 1))
    assert aggregate_quantile(pos, 0.95) == pytest.approx(Z95, abs=1e-14)
    assert aggregate_quantile(AggregatePosition.comonotone([LogNormal(0, 1)]), 0.5) == 1.0


def test_aggregate_quantile_domain():
    pos = AggregatePosition.comonotone([Normal(0, 1)])
    with pytest.raises(ValueError):
        aggregate_quantile(pos, 0.0)
    with pytest.raises(ValueError):
        AggregatePosition(())


def test_position_describe():
    pos = AggregatePosition((Leg(Normal(0, 1)), Leg(StudentT(3), Direction.COUNTER)))
    assert pos.describe() == "Q[normal(0,1)](U) + Q[student(3)](1-U)"


# -- dispersive order -----------------------------------------------------------

@pytest.mark.parametrize("dx,dy,expected", [
    (Normal(0, 1), Normal(0, 2), X_LE_Y),
    (Normal(0, 1), Laplace(0, 2 ** 0.5), X_LE_Y),
    (StudentT(5), StudentT(2), X_LE_Y),
    (Normal(0, 1), Logistic(0, 1), X_LE_Y),
    (Normal(0, 1), StudentT(3), X_LE_Y),
    (Normal(0, 2), Normal(0, 1), Y_LE_X),
    (Normal(0, 1), Normal(3, 1), EQUAL),
])
def test_dispersive_examples(dx, dy, expected):
    v = check_dispersive(dx, dy, 10_001)
    assert v.ordering == expected
    assert v.grid_size == 10_001
    assert v.max_violation <= 1e-9


def test_dispersive_incomparable():
    # d/dz of Q_Y - Q_X is s2 e^(m2 + s2 z) - s1 e^(m1 + s1 z), negative as z -> -inf here
    v = check_dispersive(LogNormal(0, 1), LogNormal(0.5, 2))
    assert v.ordering == INCOMPARABLE
    v = check_dispersive(Uniform(0, 1), Normal(0, 0.2))
    assert v.ordering == INCOMPARABLE
    assert not v.conclusive
    assert v.max_violation > 1e-9


def test_dispersive_analytic_matches_grid():
    for dx, dy in ((Normal(0, 1), Normal(1, 3)), (StudentT(7), StudentT(2)), (Normal(0, 2), Normal(5, 2))):
        a = check_dispersive(dx, dy, analytic=True)
        g = check_dispersive(dx, dy)
        assert a.analytic and not g.analytic
        assert a.ordering == g.ordering


class _OverflowsBelow(Normal):
    # stand-in whose quantile is infinite below 1e-4, just under the first default grid node
    def _ppf(self, p):
        return np.where(p < 1e-4, -np.inf, super()._ppf(p))


def test_dispersive_shrinks_range_on_overflow():
    v = check_dispersive(_OverflowsBelow(0, 1), Normal(0, 2))
    assert v.range_shrunk
    assert v.grid_range == (1e-6, 1 - 1e-6)
    assert v.ordering == X_LE_Y


def test_dispersive_overflow_everywhere_is_numerical_error():
    with pytest.raises(NumericalError):
        check_dispersive(StudentT(0.01), Normal(0, 1))


def test_verdict_validation():
    with pytest.raises(ValueError):
        DispersiveVerdict("bogus", 0.0, 10)
    with pytest.raises(ValueError):
        DispersiveVerdict(X_LE_Y, -1.0, 10)


def test_certify_counter_pair_orientation():
    # phi(u) = Q1(u) + Q2(1-u) increases iff -X2 <=disp X1
    assert certify_counter_pair(Normal(0, 2), Normal(0, 1)).ordering == X_LE_Y
    assert certify_counter_pair(Normal(0, 1), Normal(0, 2)).ordering == Y_LE_X
    assert certify_counter_pair(Normal(1, 1), Normal(-4, 1)).ordering == EQUAL


# -- Frechet bounds ----------------------------------------------------------------

def test_frechet_examples():
    assert frechet_upper([0.3, 0.7]) == 0.3
    assert frechet_upper([1, 1, 1]) == 1.0
    assert frechet_upper([0.5, 0.5]) == 0.5
    assert frechet_lower([0.3, 0.7]) == 0.0
    # exact value of 0.8 + 0.9 - 1 on these doubles is 0.70000000000000006661, the double above 0.7
    assert frechet_lower([0.8, 0.9]) == pytest.approx(0.7, abs=2e-16)
    assert frechet_lower([0.5, 0.5, 0.5]) == 0.0
    with pytest.raises(ValueError):
        frechet_upper([1.2])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=6))
def test_frechet_sandwich(values):
    assert 0.0 <= frechet_lower(values) <= frechet_upper(values) <= 1.0


def test_frechet_bounds_hold_for_independent_copula():
    # the product copula lies between the bounds everywhere
    rng = np.random.default_rng(3)
    for _ in range(200):
        v = rng.uniform(size=3)
        assert frechet_lower(v) <= float(np.prod(v)) <= frechet_upper(v)


# -- comonotonic sums ------------------------------------------------------------

def test_comonotonic_rho_examples():
    assert comonotonic_rho(IDENTITY, [Normal(1, 1), Normal(2, 3)]) == pytest.approx(3.0, abs=1e-10)
    p = 0.9
    val = comonotonic_rho(VaRIndicator(p), [Normal(1, 2), Normal(-0.5, 0.5)])
    assert val == pytest.approx(0.5 + 2.5 * stats.norm.ppf(p), rel=1e-14)
    assert comonotonic_rho(TVaRCap(0.9), [Uniform(0, 1), Uniform(0, 1)]) == pytest.approx(1.9, abs=1e-12)
    with pytest.raises(ValueError):
        comonotonic_rho(IDENTITY, [])


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(0.2, 3), st.floats(-3, 3), st.floats(0.2, 3), st.floats(0.05, 0.95))
def test_comonotonic_normal_sum_is_normal(mu1, s1, mu2, s2, p):
    g = WangTransform(p)
    assert comonotonic_rho(g, [Normal(mu1, s1), Normal(mu2, s2)]) == pytest.approx(
        mu1 + mu2 + (s1 + s2) * stats.norm.ppf(p), rel=1e-9, abs=1e-9)


# -- counter-monotonic sum quantile --------------------------------------------

def test_counter_sum_quantile_examples():
    pos = AggregatePosition.counter_pair(Normal(0, 2), Normal(0, 1))
    assert counter_sum_quantile(pos, 0.95) == pytest.approx(Z95, abs=1e-14)
    for c in (-1.0, 0.0, 3.0):
        pos = AggregatePosition.counter_pair(Normal(c, 1.5), Normal(c, 1.5))
        for p in (0.1, 0.5, 0.9):
            assert counter_sum_quantile(pos, p) == pytest.approx(2 * c, abs=1e-12)
    pos = AggregatePosition.counter_pair(StudentT(2), Normal(0, 1))
    expected = stats.t.ppf(0.99, 2) + stats.norm.ppf(0.01)
    assert counter_sum_quantile(pos, 0.99) == pytest.approx(expected, rel=1e-12)


def test_counter_sum_quantile_refuses_uncertified():
    with pytest.raises(ApplicabilityError, match="monotonicity"):
        counter_sum_quantile(AggregatePosition.counter_pair(Normal(0, 1), Normal(0, 2)), 0.9)
    with pytest.raises(ApplicabilityError):
        counter_sum_quantile(AggregatePosition.counter_pair(LogNormal(0, 1), LogNormal(0, 1)), 0.9)
    with pytest.raises(ApplicabilityError):
        counter_sum_quantile(AggregatePosition.counter_pair(Empirical([1, 2, 3]), Empirical([1, 2, 3])), 0.5)
    with pytest.raises(ValueError):
        counter_sum_quantile(AggregatePosition.comonotone([Normal(0, 1), Normal(0, 1)]), 0.5)


def test_counter_sum_quantile_matches_sampled_law():
    # a driver sample of the counter-monotonic pair gives the same quantile up to sampling error
    rng = np.random.default_rng(11)
    u = rng.uniform(size=400_000)
    s = stats.t.ppf(u, 2) + stats.norm.ppf(1 - u)
    pos = AggregatePosition.counter_pair(StudentT(2), Normal(0, 1))
    assert counter_sum_quantile(pos, 0.9) == pytest.approx(np.quantile(s, 0.9), abs=2e-2)
    assert math.isfinite(counter_sum_quantile(pos, 1 - 1e-12))
