import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskdist.distortion import (CONTINUOUS, IDENTITY, LEFT, MIXED, RIGHT, Dual, Mixture, PiecewiseLinear, TVaRCap,
                                 VaRIndicator, WangTransform, check_distortion, continuity_class, decompose, dual,
                                 evaluate, jump_set)

mp.mp.dps = 30

levels = st.floats(min_value=0.01, max_value=0.99)


@st.composite
def distortions(draw, depth=2):
    kind = draw(st.sampled_from(["id", "var", "tvar", "wang", "pwl", "dual", "mix"] if depth else
                                ["id", "var", "tvar", "wang", "pwl"]))
    if kind == "id":
        return IDENTITY
    if kind in ("var", "tvar", "wang"):
        p = draw(levels)
        return {"var": VaRIndicator, "tvar": TVaRCap, "wang": WangTransform}[kind](p)
    if kind == "pwl":
        q = draw(st.floats(min_value=0.05, max_value=0.95))
        a = draw(st.floats(min_value=0.0, max_value=0.9))
        b = draw(st.floats(min_value=a, max_value=1.0))
        return PiecewiseLinear(((0, 0), (q, a), (q, b), (1, 1)))
    if kind == "dual":
        return dual(draw(distortions(depth=depth - 1)))
    c = draw(st.floats(min_value=0.0, max_value=1.0))
    return Mixture(c, draw(distortions(depth=depth - 1)), 1.0 - c, draw(distortions(depth=depth - 1)))


# -- worked examples -------------------------------------------------------

def test_evaluate_examples():
    assert evaluate(VaRIndicator(0.95), 0.05) == 0.0
    assert evaluate(VaRIndicator(0.95), 0.051) == 1.0
    assert evaluate(TVaRCap(0.95), 0.025) == pytest.approx(0.5, abs=1e-15)
    assert evaluate(WangTransform(0.5), 0.3) == pytest.approx(0.3, abs=1e-15)


def test_wang_vs_mpmath():
    g = WangTransform(0.9)
    for q in (1e-12, 0.01, 0.3, 0.77, 1 - 1e-9):
        ref = mp.ncdf(mp.sqrt(2) * mp.erfinv(2 * mp.mpf(q) - 1) + mp.sqrt(2) * mp.erfinv(mp.mpf("0.8")))
        assert g(q) == pytest.approx(float(ref), rel=1e-12)


def test_continuity_examples():
    assert continuity_class(VaRIndicator(0.9)) == LEFT
    assert continuity_class(TVaRCap(0.9)) == CONTINUOUS
    assert continuity_class(dual(VaRIndicator(0.9))) == RIGHT
    assert continuity_class(Mixture(0.4, VaRIndicator(0.9), 0.6, dual(VaRIndicator(0.8)))) == MIXED


def test_decompose_examples():
    assert decompose(TVaRCap(0.9)) == (1.0, TVaRCap(0.9), 0.0, IDENTITY)
    assert decompose(VaRIndicator(0.9)) == (1.0, VaRIndicator(0.9), 0.0, IDENTITY)
    m = Mixture(0.4, VaRIndicator(0.9), 0.6, dual(VaRIndicator(0.8)))
    assert decompose(m) == (0.4, VaRIndicator(0.9), 0.6, dual(VaRIndicator(0.8)))


def test_jump_set_examples():
    js = jump_set(VaRIndicator(0.95))
    assert len(js.jumps) == 1
    assert js.jumps[0].location == pytest.approx(0.05, abs=1e-15)
    assert js.total_jump == pytest.approx(1.0)
    assert jump_set(TVaRCap(0.9)).jumps == ()
    assert jump_set(WangTransform(0.7)).jumps == ()


def test_pwl_jump_is_left_continuous():
    g = PiecewiseLinear(((0, 0), (0.3, 0.2), (0.3, 0.6), (1, 1)))
    assert g(0.3) == 0.2
    assert g(0.3 + 1e-12) == pytest.approx(0.6)
    assert continuity_class(g) == LEFT
    assert continuity_class(dual(g)) == RIGHT
    with pytest.raises(ValueError):
        PiecewiseLinear(((0, 0), (0.5, 0.7), (1, 0.9)))


def test_dual_of_identity_and_double_dual():
    assert dual(IDENTITY) is IDENTITY
    g = WangTransform(0.8)
    assert dual(dual(g)) is g
    assert isinstance(dual(g), Dual)


def test_mixture_validation():
    with pytest.raises(ValueError):
        Mixture(0.5, IDENTITY, 0.6, IDENTITY)
    with pytest.raises(ValueError):
        Mixture(-0.1, IDENTITY, 1.1, IDENTITY)


# -- properties --------------------------------------------------------------

grid = np.linspace(0.0, 1.0, 10_001)


@settings(max_examples=60, deadline=None)
@given(distortions())
def test_endpoint_laws_and_monotonicity(g):
    check_distortion(g)


@settings(max_examples=60, deadline=None)
@given(distortions())
def test_dual_involution(g):
    np.testing.assert_allclose(dual(dual(g))(grid), g(grid), atol=1e-12)
    # written out explicitly; a dyadic grid keeps 1 - (1 - q) == q exact at jump locations
    dyadic = np.arange(8193) / 8192.0
    np.testing.assert_allclose(1.0 - dual(g)(1.0 - dyadic), g(dyadic), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(distortions())
def test_split_reconstructs(g):
    c_l, g_l, c_r, g_r = decompose(g)
    assert c_l + c_r == pytest.approx(1.0, abs=1e-12)
    assert continuity_class(g_l) in (CONTINUOUS, LEFT)
    assert continuity_class(g_r) in (CONTINUOUS, RIGHT)
    np.testing.assert_allclose(c_l * g_l(grid) + c_r * g_r(grid), g(grid), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(distortions())
def test_jump_heights_match_evaluation(g):
    for j in jump_set(g).jumps:
        assert j.right - j.left > 0
        below = g(max(j.location - 1e-9, 0.0))
        above = g(min(j.location + 1e-9, 1.0))
        assert below == pytest.approx(j.left, abs=1e-6)
        assert above == pytest.approx(j.right, abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(levels, levels)
def test_wang_is_monotone_in_level(p1, p2):
    lo, hi = sorted((p1, p2))
    inner = np.linspace(0.01, 0.99, 99)
    assert np.all(WangTransform(lo)(inner) <= WangTransform(hi)(inner) + 1e-15)
