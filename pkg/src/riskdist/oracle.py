"""Brute-force reference values.

The grid oracle replaces the driver U by the midpoints u_k = (k - 1/2)/N, so
a position becomes an equally weighted sample of N values whose risk measure
is a finite spectral sum.  ``xside_rho`` integrates the defining cdf-side
formula with QUADPACK and shares no code with the quantile-side engine.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import _kernels
from .dependence import AggregatePosition, Direction, _quantile_at
from .distortion import Distortion
from .distributions import Distribution, Empirical, step_quantile_left, step_quantile_right
from .errors import NotFiniteError

DEFAULT_N = 2 ** 20
HEAVY_N = 2 ** 22
ENV_N = "RISKDIST_ORACLE_N"


def default_n(heavy: bool = False) -> int:
    """Oracle size; ``RISKDIST_ORACLE_N`` overrides both defaults."""
    env = os.environ.get(ENV_N)
    if env:
        n = int(float(env))
        if n < 1:
            raise ValueError(f"{ENV_N} must be positive")
        return n
    return HEAVY_N if heavy else DEFAULT_N


@dataclass(frozen=True, eq=False)
class OracleSample:
    values: np.ndarray = field(repr=False)
    construction: str
    n: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size != self.n:
            raise ValueError("values must be a flat array of length n")
        if v.size > 1 and np.any(v[1:] < v[:-1]):
            raise ValueError("oracle values must be sorted")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def as_distribution(self) -> Empirical:
        return Empirical(self.values, source=self.construction)


def grid_sample(pos: AggregatePosition, n: int) -> OracleSample:
    """Midpoint discretization of the law of the position's sum."""
    n = int(n)
    if n < 1:
        raise ValueError("N must be positive")
    k = np.arange(1, n + 1, dtype=np.float64)
    u = (2.0 * k - 1.0) / (2.0 * n)
    t = (2.0 * (n - k) + 1.0) / (2.0 * n)
    total = np.zeros(n)
    for leg in pos.legs:
        if leg.direction is Direction.COMONOTONE:
            total += _quantile_at(leg.distribution, u, t)
        else:
            total += _quantile_at(leg.distribution, t, u)
    if not np.all(np.isfinite(total)):
        raise NotFiniteError("grid sample has non-finite values")
    return OracleSample(np.sort(total), pos.describe(), n)


def spectral_weights(g: Distortion, n: int) -> np.ndarray:
    """w_k = g((n-k+1)/n) - g((n-k)/n) for k = 1..n (ascending sample order)."""
    nodes = np.asarray(g.evaluate(np.arange(n + 1, dtype=np.float64) / n), dtype=np.float64)
    return np.ascontiguousarray(np.diff(nodes)[::-1])


def empirical_rho(g: Distortion, s: OracleSample) -> float:
    """Distortion measure of the equally weighted sample ``s``."""
    return float(_kernels.spectral_sum(np.ascontiguousarray(s.values), spectral_weights(g, s.n)))


def empirical_quantile(s: OracleSample, p: float, side: str = "left", alpha: float | None = None) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    left = float(step_quantile_left(s.values, p))
    right = float(step_quantile_right(s.values, p))
    if alpha is not None:
        if not 0.0 <= alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        return (1.0 - alpha) * left + alpha * right
    if side == "left":
        return left
    if side == "right":
        return right
    raise ValueError(f"unknown side {side!r}")


# -- x-side representation --------------------------------------------------------

_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-12, limit=1000)


def _xside_empirical(g: Distortion, d: Empirical) -> float:
    # survival function is constant on [a, b) between consecutive breakpoints
    edges = np.unique(np.concatenate([d.values, [0.0]]))
    total = []
    for a, b in zip(edges[:-1], edges[1:]):
        gs = float(g.evaluate(1.0 - np.searchsorted(d.values, a, side="right") / d.n))
        total.append(-(1.0 - gs) * (b - a) if b <= 0.0 else gs * (b - a))
    return math.fsum(total)


def _quad(f, a: float, b: float) -> tuple[float, float]:
    if a == b:
        return 0.0, 0.0
    value, err = integrate.quad(f, a, b, **_QUAD_OPTS)[:2]
    if not math.isfinite(value):
        raise NotFiniteError("x-side integral is not finite")
    return value, err


def _piecewise(f, a: float, b: float, points) -> tuple[float, float]:
    """Integral over [a, b] (possibly infinite ends) split at interior points."""
    inner = sorted({p for p in points if a < p < b and math.isfinite(p)})
    if not inner:
        if math.isinf(a) or math.isinf(b):
            mid = 0.0 if math.isinf(a) and math.isinf(b) else (b - 1.0 if math.isinf(a) else a + 1.0)
            inner = [mid]
        else:
            return _quad(f, a, b)
    edges = [a, *inner, b]
    values, errors = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = _quad(f, lo, hi)
        values.append(v)
        errors.append(e)
    return math.fsum(values), math.fsum(errors)


def xside_rho(g: Distortion, d: Distribution, cfg=None) -> float:
    """rho_g[d] = -int_{x<0} [1 - g(S(x))] dx + int_{x>0} g(S(x)) dx, S = 1 - F."""
    if isinstance(d, Empirical):
        return _xside_empirical(g, d)
    lo, hi = d.support()
    levels = {0.5, 1e-3, 1.0 - 1e-3}
    for atom in g.atoms():
        levels.add(atom.level)
    for _, level in g.kinks():
        levels.add(level)
    points = [float(d.quantile_left(q)) for q in sorted(levels) if 0.0 < q < 1.0]

    def lower(x):
        return float(g.complement(d.cdf(x)))

    def upper(x):
        return float(g.evaluate(d.sf(x)))

    parts = []
    if lo < 0.0:
        v, _ = _piecewise(lower, lo, min(hi, 0.0), points)
        parts.append(-v)
    if hi < 0.0:
        parts.append(hi)          # F = 1 on (hi, 0)
    if hi > 0.0:
        v, _ = _piecewise(upper, max(lo, 0.0), hi, points)
        parts.append(v)
    if lo > 0.0:
        parts.append(lo)          # S = 1 on (0, lo)
    return math.fsum(parts)


def oracle_rho(g: Distortion, pos: AggregatePosition, n: int | None = None) -> float:
    """Grid-oracle value of rho_g for a position."""
    return empirical_rho(g, grid_sample(pos, n or default_n()))
