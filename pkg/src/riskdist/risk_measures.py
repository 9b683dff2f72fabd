"""Distortion risk measures via the quantile representation.

    rho_g[X] = c_l * int Q(1 - q) dg_l(q) + c_r * int Q+(1 - q) dg_r(q)

where g = c_l g_l + c_r g_r splits g into left- and right-continuous parts,
Q is the left and Q+ the right quantile function.  Atoms of each part
contribute ``height * Q(level)`` exactly; the continuous part is integrated
with adaptive Gauss-Kronrod, upper half (q in (0, 1/2]) with the accurate
upper quantile and lower half in the variable t = 1 - q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distortion import Distortion, Identity, TVaRCap, WangTransform, decompose, jump_set
from .distributions import Distribution, Empirical
from .errors import NotFiniteError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, QuadResult, integrate_from_zero, integrate_interval

CLOSED_FORM = "closed_form"
QUADRATURE = "quadrature"
THEOREM = "theorem_decomposition"
ORACLE = "oracle"


@dataclass
class MeasureResult:
    value: float
    method: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise NotFiniteError(f"risk measure is not finite ({self.value})")
        self.diagnostics.setdefault("error_estimate", 0.0)

    def __float__(self):
        return float(self.value)


def _safe_product(values, weights):
    values = np.asarray(values, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        out = values * weights
    return np.where(weights == 0.0, 0.0, out)


def _quantile_at(d: Distribution, level: float, side: str) -> float:
    # level = 1 - q of an atom; exact when the atom stores it
    if level >= 1.0:
        x = d.support()[1]
    elif level <= 0.0:
        x = d.support()[0]
    else:
        x = d.quantile_left(level) if side == "left" else d.quantile_right(level)
    if not math.isfinite(x):
        raise NotFiniteError("measure not finite: distortion has an atom at an infinite quantile")
    return float(x)


def _continuous_empirical(g: Distortion, d: Empirical, cont) -> float:
    n = d.n
    k = np.arange(1, n + 1)
    hi = np.asarray(cont(1.0 - (k - 1) / n))
    lo = np.asarray(cont(1.0 - k / n))
    return math.fsum(d.values * (hi - lo))


def _one_sided(g: Distortion, d: Distribution, side: str, cfg: QuadratureConfig):
    js = jump_set(g)
    atom_terms = [j.height * _quantile_at(d, j.level, side) for j in js.jumps]
    atom_value = math.fsum(atom_terms)

    if js.total_jump >= 1.0 - 1e-15:
        return atom_value, QuadResult(), True
    if not d.is_continuous:
        cont = _continuous_empirical(g, d, js.continuous_part)
        return atom_value + cont, QuadResult(cont), True

    def top(t):
        return _safe_product(d.upper_quantile(t, side), g.density(t))

    def bottom(t):
        return _safe_product(d.quantile_left(t) if side == "left" else d.quantile_right(t), g.density_lower(t))

    kinks = g.kinks()
    top_breaks = [loc for loc, _ in kinks if 0 < loc < 0.5]
    bottom_breaks = [lev for _, lev in kinks if 0 < lev < 0.5]
    res = integrate_from_zero(top, 0.5, top_breaks, cfg) + integrate_from_zero(bottom, 0.5, bottom_breaks, cfg)
    return atom_value + res.value, res, False


def _truncation_bound(g: Distortion, d: Distribution, eps: float) -> float:
    lo = abs(d.quantile_left(eps))
    hi = abs(d.upper_quantile(eps))
    return lo * float(g.complement(eps)) + hi * float(g.evaluate(eps))


def rho(g: Distortion, d: Distribution, cfg: QuadratureConfig | None = None) -> MeasureResult:
    """Distortion risk measure rho_g[d]."""
    cfg = cfg or DEFAULT_CONFIG
    c_l, g_l, c_r, g_r = decompose(g)
    total = []
    quad = QuadResult()
    exact = True
    for c, part, side in ((c_l, g_l, "left"), (c_r, g_r, "right")):
        if c == 0.0:
            continue
        value, res, part_exact = _one_sided(part, d, side, cfg)
        total.append(c * value)
        quad = quad + res.scaled(c)
        exact = exact and part_exact
    value = math.fsum(total)
    diagnostics = {
        "error_estimate": quad.error + quad.tail_residual,
        "quadrature_error": quad.error,
        "subdivisions": float(quad.panels),
        "tail_epsilon": cfg.tail_epsilon,
        "tail_correction": quad.tail_value,
        "tail_residual": quad.tail_residual,
    }
    if d.is_continuous:
        diagnostics["truncation_bound"] = _truncation_bound(g, d, cfg.tail_epsilon)
    method = CLOSED_FORM if exact else QUADRATURE
    return MeasureResult(value, method, diagnostics)


def _half_integral(f, a: float, b: float, cfg: QuadratureConfig) -> float:
    if not b > a:
        return 0.0
    if a == 0.0:
        return integrate_from_zero(f, b, (), cfg).value
    if a < cfg.tail_epsilon:
        return integrate_from_zero(f, b, (), cfg).value - integrate_from_zero(f, a, (), cfg).value
    return integrate_interval(f, a, b, (), cfg).value


def quantile_integral(d: Distribution, lo: float, hi: float, cfg: QuadratureConfig | None = None) -> float:
    """Integral of the left quantile function of ``d`` over levels [lo, hi]."""
    cfg = cfg or DEFAULT_CONFIG
    if not 0.0 <= lo <= hi <= 1.0:
        raise ValueError("need 0 <= lo <= hi <= 1")
    if isinstance(d, Empirical):
        n = d.n
        k = np.arange(1, n + 1)
        overlap = np.clip(np.minimum(k / n, hi) - np.maximum((k - 1) / n, lo), 0.0, None)
        return math.fsum(d.values * overlap)
    # lower half in u, upper half in t = 1 - u
    parts = [_half_integral(d.quantile_left, lo, min(hi, 0.5), cfg),
             _half_integral(d.upper_quantile, 1.0 - hi, min(1.0 - lo, 0.5), cfg)]
    return math.fsum(parts)


def var(d: Distribution, p: float) -> float:
    """Value-at-Risk: the left p-quantile."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    return float(d.quantile_left(p))


def tvar(d: Distribution, p: float, cfg: QuadratureConfig | None = None) -> float:
    """Tail-Value-at-Risk: mean of VaR_q over q in [p, 1]."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    return quantile_integral(d, p, 1.0, cfg) / (1.0 - p)


def ltvar(d: Distribution, beta: float, cfg: QuadratureConfig | None = None) -> float:
    """Left-tail VaR: mean of VaR_q over q in [0, beta]."""
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    return quantile_integral(d, 0.0, beta, cfg) / beta


def wang_measure(d: Distribution, p: float, cfg: QuadratureConfig | None = None) -> float:
    return rho(WangTransform(p), d, cfg).value


def expectation(d: Distribution, cfg: QuadratureConfig | None = None) -> float:
    return rho(Identity(), d, cfg).value

