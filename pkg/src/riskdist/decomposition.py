"""Decompositions of distortion risk measures of counter-monotonic sums.

For S = X1(U) + X2(1 - U) with symmetric, continuous, strictly increasing
marginals and X2 <=disp X1,

    rho_g[S] = rho_g[X1] + rho_gbar[X2],   gbar(q) = 1 - g(1 - q).

Log-normal pairs violate the symmetry hypothesis; their aggregate quantile
phi(u) = Q1(u) + Q2(1 - u) is U-shaped, so the law of S is recovered from
the two roots of phi(u) = x on either side of the minimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .dependence import (EQUAL, X_LE_Y, Y_LE_X, AggregatePosition, DispersiveVerdict, check_dispersive,
                         DEFAULT_GRID)
from .distortion import (CONTINUOUS, LEFT, Distortion, TVaRCap, VaRIndicator, WangTransform,
                         continuity_class, dual)
from .distributions import Distribution, LogNormal, Normal, StudentT
from .errors import ApplicabilityError, LevelOutOfRangeError
from .oracle import default_n, empirical_quantile, empirical_rho, grid_sample
from .risk_measures import CLOSED_FORM, ORACLE, QUADRATURE, THEOREM, MeasureResult, ltvar, rho, tvar, var

LOGNORMAL = "lognormal_roots"
Z_BRACKET = 40.0       # Phi(-40) underflows, so roots never lie outside [-40, 40]


@dataclass(frozen=True)
class ApplicabilityReport:
    symmetric_ok: tuple[bool, bool]
    strict_increase_ok: tuple[bool, bool]
    dispersive_ok: DispersiveVerdict | None
    chosen_orientation: int | None      # which input plays X1 (1 or 2)
    branch: str = ""

    @property
    def applicable(self) -> bool:
        return (all(self.symmetric_ok) and all(self.strict_increase_ok) and self.chosen_orientation is not None)

    def failures(self) -> list[str]:
        out = []
        for i, ok in enumerate(self.symmetric_ok, 1):
            if not ok:
                out.append(f"marginal {i} is not symmetric")
        for i, ok in enumerate(self.strict_increase_ok, 1):
            if not ok:
                out.append(f"marginal {i} is not continuous and strictly increasing")
        if self.dispersive_ok is not None and self.chosen_orientation is None:
            out.append(f"marginals are not dispersively ordered (max violation "
                       f"{self.dispersive_ok.max_violation:.3g})")
        return out

    def as_dict(self) -> dict:
        v = self.dispersive_ok
        return {
            "symmetric_ok": list(self.symmetric_ok),
            "strict_increase_ok": list(self.strict_increase_ok),
            "dispersive": None if v is None else {"ordering": v.ordering, "max_violation": v.max_violation,
                                                  "grid_size": v.grid_size, "analytic": v.analytic},
            "chosen_orientation": self.chosen_orientation,
            "branch": self.branch,
        }


@dataclass(frozen=True)
class RootPair:
    u_lo: float
    u_hi: float
    level: float
    z_lo: float = math.nan
    z_hi: float = math.nan

    def __post_init__(self):
        if not self.u_lo < self.u_hi:
            raise ValueError("root pair must satisfy u_lo < u_hi")


@dataclass
class Decomposition:
    value: float
    method: str
    branch: str
    addends: list[tuple[str, float]] = field(default_factory=list)
    report: ApplicabilityReport | None = None
    diagnostics: dict = field(default_factory=dict)


# -- symmetric pairs ----------------------------------------------------------------

def _branch_label(x1: Distribution, x2: Distribution, swapped: bool) -> str:
    tail = " (inputs swapped)" if swapped else ""
    if isinstance(x1, Normal) and isinstance(x2, Normal):
        return f"normal pair, sigma1 >= sigma2{tail}"
    if isinstance(x1, StudentT) and isinstance(x2, StudentT):
        return f"student pair, nu1 <= nu2{tail}"
    return f"symmetric pair, X2 <=disp X1{tail}"


def applicability(d1: Distribution, d2: Distribution, grid_n: int = DEFAULT_GRID) -> ApplicabilityReport:
    sym = (d1.symmetry_info().is_symmetric, d2.symmetry_info().is_symmetric)
    inc = (d1.is_continuous and d1.strictly_increasing, d2.is_continuous and d2.strictly_increasing)
    verdict = check_dispersive(d2, d1, grid_n, analytic=True)
    orientation = {X_LE_Y: 1, EQUAL: 1, Y_LE_X: 2}.get(verdict.ordering)
    branch = ""
    if orientation is not None and all(sym) and all(inc):
        x1, x2 = (d1, d2) if orientation == 1 else (d2, d1)
        branch = _branch_label(x1, x2, orientation == 2)
    return ApplicabilityReport(sym, inc, verdict, orientation, branch)


def _orient(d1: Distribution, d2: Distribution, grid_n: int = DEFAULT_GRID):
    report = applicability(d1, d2, grid_n)
    if not report.applicable:
        raise ApplicabilityError("decomposition hypotheses fail: " + "; ".join(report.failures()), report)
    x1, x2 = (d1, d2) if report.chosen_orientation == 1 else (d2, d1)
    return x1, x2, report


def rho_counter_sum(g: Distortion, d1: Distribution, d2: Distribution, cfg=None,
                    grid_n: int = DEFAULT_GRID) -> tuple[MeasureResult, ApplicabilityReport]:
    """rho_g of the counter-monotonic sum via rho_g[X1] + rho_gbar[X2]."""
    x1, x2, report = _orient(d1, d2, grid_n)
    a = rho(g, x1, cfg)
    b = rho(dual(g), x2, cfg)
    diagnostics = {
        "error_estimate": a.diagnostics["error_estimate"] + b.diagnostics["error_estimate"],
        "addend_x1": a.value,
        "addend_x2": b.value,
    }
    return MeasureResult(a.value + b.value, THEOREM, diagnostics), report


def var_counter_sum(d1: Distribution, d2: Distribution, p: float) -> float:
    x1, x2, _ = _orient(d1, d2)
    return var(x1, p) + var(x2, 1.0 - p)


def tvar_counter_sum(d1: Distribution, d2: Distribution, p: float, cfg=None) -> float:
    x1, x2, _ = _orient(d1, d2)
    return tvar(x1, p, cfg) + ltvar(x2, 1.0 - p, cfg)


def wt_counter_sum(d1: Distribution, d2: Distribution, p: float, cfg=None) -> float:
    x1, x2, _ = _orient(d1, d2)
    return rho(WangTransform(p), x1, cfg).value + rho(WangTransform(1.0 - p), x2, cfg).value


def mixed_normal_portfolio_rho(g: Distortion, com_legs: Sequence[Normal], counter_legs: Sequence[Normal],
                               cfg=None) -> float:
    """rho_g of sum_i X_i(U) + sum_j Y_j(1 - U) for normal legs."""
    legs = list(com_legs) + list(counter_legs)
    if not legs:
        raise ValueError("need at least one leg")
    for leg in legs:
        if not isinstance(leg, Normal):
            raise TypeError(f"all legs must be normal, got {leg}")
    s_com = math.fsum(d.sigma for d in com_legs)
    s_counter = math.fsum(d.sigma for d in counter_legs)
    g_com, g_counter = (g, dual(g)) if s_com >= s_counter else (dual(g), g)
    parts = [rho(g_com, d, cfg).value for d in com_legs]
    parts += [rho(g_counter, d, cfg).value for d in counter_legs]
    return math.fsum(parts)


# -- log-normal pairs -----------------------------------------------------------------

def _params(d: LogNormal) -> tuple[float, float]:
    if not isinstance(d, LogNormal):
        raise TypeError(f"expected a log-normal marginal, got {d}")
    return float(d.mu), float(d.sigma)


def _minimizer_z(mu1, s1, mu2, s2) -> float:
    return (mu2 - mu1 + math.log(s2 / s1)) / (s1 + s2)


def lognormal_phi_minimizer(mu1: float, s1: float, mu2: float, s2: float) -> float:
    """Driver level at which Q1(u) + Q2(1 - u) is smallest for log-normal marginals."""
    if not (s1 > 0 and s2 > 0):
        raise ValueError("sigmas must be positive")
    return float(_kernels.ndtr(np.array([_minimizer_z(mu1, s1, mu2, s2)]))[0])


def _phi_z(z, mu1, s1, mu2, s2):
    return math.exp(mu1 + s1 * z) + math.exp(mu2 - s2 * z)


def _std_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def lognormal_root_set(d1: LogNormal, d2: LogNormal, x: float) -> RootPair:
    """The two driver levels u_lo < u_hi with Q1(u) + Q2(1 - u) = x."""
    mu1, s1 = _params(d1)
    mu2, s2 = _params(d2)
    zmin = _minimizer_z(mu1, s1, mu2, s2)
    x_min = _phi_z(zmin, mu1, s1, mu2, s2)
    if not (x > x_min and math.isfinite(x)):
        raise LevelOutOfRangeError(f"level outside aggregate range: {x!r} is not in ({x_min!r}, inf)")
    if _phi_z(-Z_BRACKET, mu1, s1, mu2, s2) <= x or _phi_z(Z_BRACKET, mu1, s1, mu2, s2) <= x:
        raise LevelOutOfRangeError(f"level outside aggregate range: {x!r} beyond representable driver levels")
    z_lo = _kernels.branch_root(mu1, s1, mu2, s2, x, -Z_BRACKET, zmin, True)
    z_hi = _kernels.branch_root(mu1, s1, mu2, s2, x, zmin, Z_BRACKET, False)
    return RootPair(_std_cdf(z_lo), _std_cdf(z_hi), float(x), z_lo, z_hi)


class CounterLogNormalSum(Distribution):
    """Exact law of X1(U) + X2(1 - U) for log-normal marginals.

    With z = Phi^{-1}(u) the aggregate is e^{mu1 + s1 z} + e^{mu2 - s2 z}, convex
    in z.  P(S <= x) = Phi(z_hi) - Phi(z_lo) for the two roots, so the
    p-quantile is the level whose roots are p apart in probability.
    """

    name = "counter_lognormal"

    def __init__(self, d1: LogNormal, d2: LogNormal):
        self.d1, self.d2 = d1, d2
        self._p = (*_params(d1), *_params(d2))
        self.identical = self._p[:2] == self._p[2:]
        self.zmin = _minimizer_z(*self._p)
        self.x_min = _phi_z(self.zmin, *self._p)

    def support(self):
        return (self.x_min, math.inf)

    def _roots_for(self, p: float, q: float) -> tuple[float, float]:
        if self.identical:
            # phi is symmetric about u = 1/2, so the roots are (1-p)/2 and (1+p)/2
            z = float(_kernels.ndtri(np.array([0.5 * q]))[0])
            return z, -z
        return _kernels.level_for_prob(*self._p, p, self.zmin, -Z_BRACKET, Z_BRACKET, q=q)

    def level_roots(self, p: float, q: float | None = None) -> RootPair:
        q = 1.0 - p if q is None else q
        z1, z2 = self._roots_for(p, q)
        return RootPair(_std_cdf(z1), _std_cdf(z2), _phi_z(z1, *self._p), z1, z2)

    def _level(self, p: float, q: float) -> float:
        z1, _ = self._roots_for(p, q)
        return _phi_z(z1, *self._p)

    def _ppf(self, p):
        return np.array([self._level(float(v), 1.0 - float(v)) for v in np.atleast_1d(p)])

    def _upper(self, t):
        return np.array([self._level(1.0 - float(v), float(v)) for v in np.atleast_1d(t)])

    def _cdf_scalar(self, x: float) -> float:
        if x <= self.x_min:
            return 0.0
        if math.isinf(x):
            return 1.0
        mu1, s1, mu2, s2 = self._p
        z1 = _kernels.branch_root(mu1, s1, mu2, s2, x, -Z_BRACKET, self.zmin, True)
        z2 = _kernels.branch_root(mu1, s1, mu2, s2, x, self.zmin, Z_BRACKET, False)
        return _std_cdf(z2) - _std_cdf(z1)

    def _cdf(self, x):
        return np.array([self._cdf_scalar(float(v)) for v in np.atleast_1d(x)]).reshape(np.shape(x))

    def __str__(self):
        return f"counter({self.d1},{self.d2})"


def lognormal_identical_rho(g: Distortion, mu: float, sigma: float, cfg=None) -> float:
    """rho_g[S] for identical log-normal marginals: integral of Q(q/2) + Q(1 - q/2) dg(q)."""
    if continuity_class(g) not in (CONTINUOUS, LEFT):
        raise ValueError("distortion must be left-continuous")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    d = LogNormal(mu, sigma)
    return rho(g, CounterLogNormalSum(d, d), cfg).value


def lognormal_identical_var(mu: float, sigma: float, p: float) -> float:
    """VaR_p[S] = Q((1-p)/2) + Q((1+p)/2), Q the log-normal quantile."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    z = float(_kernels.ndtri(np.array([0.5 * (1.0 - p)]))[0])
    return math.exp(mu + sigma * z) + math.exp(mu - sigma * z)


def lognormal_identical_tvar(mu: float, sigma: float, p: float) -> float:
    """TVaR_p[S] = 2 e^{mu + sigma^2/2} / (1-p) * [Phi(z - sigma) + Phi(z + sigma)], z = Phi^{-1}((1-p)/2)."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    z = float(_kernels.ndtri(np.array([0.5 * (1.0 - p)]))[0])
    mean = math.exp(mu + 0.5 * sigma * sigma)
    return 2.0 * mean / (1.0 - p) * (_std_cdf(z - sigma) + _std_cdf(z + sigma))


def _level_of(d1: LogNormal, d2: LogNormal, p: float, level_source: str, n: int | None):
    law = CounterLogNormalSum(d1, d2)
    if level_source == "exact":
        return law.level_roots(p)
    if level_source == "oracle":
        sample = grid_sample(AggregatePosition.counter_pair(d1, d2), n or default_n(heavy=True))
        x = empirical_quantile(sample, p)
        return lognormal_root_set(d1, d2, x)
    raise ValueError(f"unknown level source {level_source!r}")


def lognormal_var_counter(d1: LogNormal, d2: LogNormal, p: float, root: int = 1,
                          level_source: str = "exact", n: int | None = None) -> float:
    """VaR_p[S] as VaR_u[X1] + VaR_{1-u}[X2] at either root u of the level F_S^{-1}(p)."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if root not in (1, 2):
        raise ValueError("root must be 1 or 2")
    roots = _level_of(d1, d2, p, level_source, n)
    z = roots.z_lo if root == 1 else roots.z_hi
    (mu1, s1), (mu2, s2) = _params(d1), _params(d2)
    # VaR_u[X1] = e^{mu1 + s1 z}, VaR_{1-u}[X2] = e^{mu2 - s2 z}
    return math.exp(mu1 + s1 * z) + math.exp(mu2 - s2 * z)


def lognormal_partial_lower(d: LogNormal, z: float) -> float:
    """int_0^{Phi(z)} Q(u) du = u * LTVaR_u for u = Phi(z)."""
    mu, s = _params(d)
    return math.exp(mu + 0.5 * s * s) * _std_cdf(z - s)


def lognormal_partial_upper(d: LogNormal, z: float) -> float:
    """int_{Phi(z)}^1 Q(u) du = (1 - u) * TVaR_u for u = Phi(z)."""
    mu, s = _params(d)
    return math.exp(mu + 0.5 * s * s) * _std_cdf(s - z)


PRODUCT = "product"
QUANTILE_AT = "quantile_at"


def lognormal_tvar_terms(d1: LogNormal, d2: LogNormal, p: float, alpha: float = 0.0,
                         reading: str = PRODUCT, level_source: str = "exact",
                         n: int | None = None) -> tuple[float, float, float]:
    """The three addends of TVaR_p[S] built from the roots u1 < u2 of the level F_S^{-1(alpha)}(p).

    The outer terms are u1 (LTVaR_{u1}[X1] + TVaR_{1-u1}[X2]) / (1-p) and
    (1 - u2) (TVaR_{u2}[X1] + LTVaR_{1-u2}[X2]) / (1-p).  The last term uses
    the level x and the gap h = u2 - u1 - p: ``reading="product"`` takes
    x * h / (1-p), ``reading="quantile_at"`` takes F_S^{-1}(h) / (1-p), the
    quantile evaluated at h (clipped to the essential infimum for h <= 0).
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    # S is continuous, so the alpha-inverse coincides with the left inverse
    roots = _level_of(d1, d2, p, level_source, n)
    z1, z2 = roots.z_lo, roots.z_hi
    # X2 is evaluated at 1 - u: its levels above 1 - u1 correspond to z > -z1
    lower_block = lognormal_partial_lower(d1, z1) + lognormal_partial_upper(d2, -z1)
    upper_block = lognormal_partial_upper(d1, z2) + lognormal_partial_lower(d2, -z2)
    gap = (_std_cdf(z2) - _std_cdf(z1)) - p
    if reading == PRODUCT:
        last = roots.level * gap
    elif reading == QUANTILE_AT:
        law = CounterLogNormalSum(d1, d2)
        last = law.x_min if gap <= 0.0 else float(law.quantile_left(min(gap, 1.0)))
    else:
        raise ValueError(f"unknown reading {reading!r}")
    w = 1.0 - p
    return lower_block / w, upper_block / w, last / w


def lognormal_tvar_counter(d1: LogNormal, d2: LogNormal, p: float, alpha: float = 0.0,
                           reading: str = PRODUCT, level_source: str = "exact",
                           n: int | None = None) -> float:
    """TVaR_p of the counter-monotonic log-normal sum; see :func:`lognormal_tvar_terms`."""
    return math.fsum(lognormal_tvar_terms(d1, d2, p, alpha, reading, level_source, n))


# -- dispatcher -------------------------------------------------------------------------

METHODS = ("auto", "theorem", "lognormal", "oracle")


def _theorem(g, d1, d2, cfg) -> Decomposition:
    res, report = rho_counter_sum(g, d1, d2, cfg)
    x1, x2 = (d1, d2) if report.chosen_orientation == 1 else (d2, d1)
    addends = [(f"rho_g[{x1}]", res.diagnostics["addend_x1"]), (f"rho_dual(g)[{x2}]", res.diagnostics["addend_x2"])]
    return Decomposition(res.value, THEOREM, report.branch, addends, report,
                         {"error_estimate": res.diagnostics["error_estimate"]})


def _lognormal(g, d1, d2, cfg, report, alpha: float = 0.0) -> Decomposition:
    if not (isinstance(d1, LogNormal) and isinstance(d2, LogNormal)):
        raise ApplicabilityError("log-normal path needs two log-normal marginals", report)
    law = CounterLogNormalSum(d1, d2)
    kind = "identical" if law.identical else "non-identical"
    if isinstance(g, VaRIndicator):
        roots = law.level_roots(g.p)
        value = (lognormal_identical_var(d1.mu, d1.sigma, g.p) if law.identical
                 else lognormal_var_counter(d1, d2, g.p))
        addends = [(f"VaR_u1[{d1}]", math.exp(d1.mu + d1.sigma * roots.z_lo)),
                   (f"VaR_1-u1[{d2}]", math.exp(d2.mu - d2.sigma * roots.z_lo))]
        return Decomposition(value, CLOSED_FORM, f"log-normal pair ({kind}), VaR via root pair", addends, report,
                             {"u_lo": roots.u_lo, "u_hi": roots.u_hi})
    if isinstance(g, TVaRCap):
        terms = lognormal_tvar_terms(d1, d2, g.p, alpha)
        value = lognormal_identical_tvar(d1.mu, d1.sigma, g.p) if law.identical else math.fsum(terms)
        addends = [("lower-driver block", terms[0]), ("upper-driver block", terms[1]), ("level term", terms[2])]
        return Decomposition(value, CLOSED_FORM, f"log-normal pair ({kind}), TVaR via root pair", addends, report)
    res = rho(g, law, cfg)
    return Decomposition(res.value, QUADRATURE, f"log-normal pair ({kind}), quadrature of the exact quantile",
                         [], report, dict(res.diagnostics))


def _oracle(g, d1, d2, n) -> Decomposition:
    n = n or default_n()
    value = empirical_rho(g, grid_sample(AggregatePosition.counter_pair(d1, d2), n))
    return Decomposition(value, ORACLE, f"grid oracle, N={n}", [], None, {"oracle_n": float(n)})


def evaluate_counter_sum(g: Distortion, d1: Distribution, d2: Distribution, method: str = "auto",
                         cfg=None, oracle_n: int | None = None, alpha: float = 0.0) -> Decomposition:
    """rho_g[X1(U) + X2(1 - U)]: theorem path, then log-normal path, then grid oracle."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if method == "oracle":
        return _oracle(g, d1, d2, oracle_n)
    if method == "theorem":
        return _theorem(g, d1, d2, cfg)
    report = applicability(d1, d2)
    if method == "lognormal":
        return _lognormal(g, d1, d2, cfg, report, alpha)
    if report.applicable:
        return _theorem(g, d1, d2, cfg)
    if isinstance(d1, LogNormal) and isinstance(d2, LogNormal):
        return _lognormal(g, d1, d2, cfg, report, alpha)
    out = _oracle(g, d1, d2, oracle_n)
    out.report = report
    return out
