import math

import pytest

from riskdist.distortion import IDENTITY, Dual, Mixture, PiecewiseLinear, TVaRCap, VaRIndicator, WangTransform
from riskdist.distributions import Empirical, Laplace, Logistic, LogNormal, Normal, StudentT, Uniform
from riskdist.errors import SpecParseError
from riskdist.specs import parse_distortion, parse_distribution


@pytest.mark.parametrize("text,expected", [
    ("normal(0,1)", Normal(0, 1)),
    ("Normal( 1.5 , 2 )", Normal(1.5, 2)),
    ("lognormal(0,1)", LogNormal(0, 1)),
    ("student(2)", StudentT(2)),
    ("laplace(0,2^0.5)", Laplace(0, math.sqrt(2))),
    ("logistic(-1/2,1)", Logistic(-0.5, 1)),
    ("uniform(-1,2)", Uniform(-1, 2)),
    ("lognormal(ln(2),1e-1)", LogNormal(math.log(2), 0.1)),
    ("normal(-(1+2)*2,sqrt(4))", Normal(-6, 2)),
])
def test_distribution_specs(text, expected):
    d = parse_distribution(text)
    assert type(d) is type(expected)
    assert str(d) == str(expected)


@pytest.mark.parametrize("text,expected", [
    ("identity", IDENTITY),
    ("var(0.95)", VaRIndicator(0.95)),
    ("tvar(.9)", TVaRCap(0.9)),
    ("wang(0.8)", WangTransform(0.8)),
    ("dual(tvar(0.7))", Dual(TVaRCap(0.7))),
    ("mix(0.4,var(0.9),0.6,dual(var(0.8)))", Mixture(0.4, VaRIndicator(0.9), 0.6, Dual(VaRIndicator(0.8)))),
])
def test_distortion_specs(text, expected):
    assert parse_distortion(text) == expected


def test_pwl_spec_adds_endpoints():
    g = parse_distortion("pwl(0.3:0.2,0.3:0.6)")
    assert isinstance(g, PiecewiseLinear)
    assert g.knots == ((0.0, 0.0), (0.3, 0.2), (0.3, 0.6), (1.0, 1.0))


def test_empirical_spec(tmp_path):
    f = tmp_path / "losses.csv"
    f.write_text("# sample\n5\n1\n2\n2\n")
    d = parse_distribution(f"empirical(@{f})")
    assert isinstance(d, Empirical)
    assert d.quantile_left(0.5) == 2.0


@pytest.mark.parametrize("text,token", [
    ("gamma(1,2)", "gamma"),
    ("normal(0,1", "<end>"),
    ("normal(0,1) x", "x"),
    ("normal(0,-1)", "normal"),
    ("normal(0,1/0)", "/"),
    ("normal(0,$)", "$"),
    ("student(ln(-1))", "ln"),
    ("empirical(@/no/such/file.csv)", "/no/such/file.csv"),
])
def test_bad_distribution_names_the_token(text, token):
    with pytest.raises(SpecParseError) as info:
        parse_distribution(text)
    assert info.value.token == token


@pytest.mark.parametrize("text,token", [
    ("var(1.5)", "var"),
    ("tvar(0.9", "<end>"),
    ("mix(0.5,var(0.9),0.6,identity)", "mix"),
    ("spectral(0.9)", "spectral"),
    ("pwl(0.5:0.8,0.6:0.7)", "pwl"),
])
def test_bad_distortion_names_the_token(text, token):
    with pytest.raises(SpecParseError) as info:
        parse_distortion(text)
    assert info.value.token == token


def test_spec_parse_error_is_value_error():
    with pytest.raises(ValueError):
        parse_distribution("normal()")
