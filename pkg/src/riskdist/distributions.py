"""Univariate distributions with accurate cdf and left/right quantile functions.

Every distribution exposes ``quantile_left`` (inf{x : F(x) >= p}) and
``quantile_right`` (sup{x : F(x) <= p}), plus ``upper_quantile(t)`` which
returns the quantile at level ``1 - t`` without forming ``1 - t`` in floating
point, so that upper tails stay accurate for ``t`` far below machine epsilon.

At p = 0 and p = 1 the inverses return the lower/upper end of the support
(infinite for unbounded laws).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import special

from . import _kernels
from .errors import NumericalError, SpecParseError

SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class SymmetryInfo:
    is_symmetric: bool
    center: float | None = None


def _out(values, scalar):
    return float(values) if scalar else values


def _fmt(x: float) -> str:
    return f"{x:.12g}"


class Distribution:
    """Base class.  Subclasses implement ``_ppf``, ``_upper``, ``_cdf``, ``_sf``."""

    name = "distribution"

    # -- hooks ---------------------------------------------------------
    def support(self) -> tuple[float, float]:
        return (-math.inf, math.inf)

    def _ppf(self, p):
        raise NotImplementedError

    def _upper(self, t):
        return self._ppf(1.0 - t)

    def _cdf(self, x):
        raise NotImplementedError

    def _sf(self, x):
        return 1.0 - self._cdf(x)

    # -- public API ----------------------------------------------------
    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return _out(self._cdf(x), x.ndim == 0)

    def sf(self, x):
        """Survival function 1 - F(x), accurate in the upper tail."""
        x = np.asarray(x, dtype=np.float64)
        return _out(self._sf(x), x.ndim == 0)

    def quantile_left(self, p):
        return self._quantile(p, self._ppf)

    def quantile_right(self, p):
        return self._quantile(p, self._ppf)

    def upper_quantile(self, t, side: str = "left"):
        """Quantile at level ``1 - t`` (left or right inverse)."""
        t = np.asarray(t, dtype=np.float64)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        lo, hi = self.support()
        out = np.empty_like(t)
        out[t <= 0.0] = hi
        out[t >= 1.0] = lo
        inner = (t > 0.0) & (t < 1.0)
        if inner.any():
            out[inner] = self._upper(t[inner])
        return _out(out[0], True) if scalar else out

    def _quantile(self, p, fn):
        p = np.asarray(p, dtype=np.float64)
        scalar = p.ndim == 0
        p = np.atleast_1d(p)
        if np.any((p < 0.0) | (p > 1.0)) or np.any(np.isnan(p)):
            raise ValueError("probability level outside [0, 1]")
        lo, hi = self.support()
        out = np.empty_like(p)
        out[p == 0.0] = lo
        out[p == 1.0] = hi
        inner = (p > 0.0) & (p < 1.0)
        if inner.any():
            out[inner] = fn(p[inner])
        return _out(out[0], True) if scalar else out

    def quantile_alpha(self, p, alpha: float):
        if not 0.0 <= alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        left = np.asarray(self.quantile_left(p))
        right = np.asarray(self.quantile_right(p))
        if not (np.all(np.isfinite(left)) and np.all(np.isfinite(right))):
            raise NumericalError("generalized inverse is infinite at this level")
        out = (1.0 - alpha) * left + alpha * right
        return _out(out, out.ndim == 0)

    def symmetry_info(self) -> SymmetryInfo:
        return SymmetryInfo(False)

    @property
    def strictly_increasing(self) -> bool:
        return True

    @property
    def is_continuous(self) -> bool:
        return True

    def shifted(self, c: float) -> "Distribution":
        raise NotImplementedError(f"{self.name} has no location parameter")

    def reflected(self) -> "Distribution":
        """Law of -X."""
        return Reflected(self)


@dataclass(frozen=True)
class Normal(Distribution):
    mu: float = 0.0
    sigma: float = 1.0
    name = "normal"

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("normal sigma must be positive")

    def _ppf(self, p):
        return self.mu + self.sigma * _kernels.ndtri(p)

    def _upper(self, t):
        return self.mu - self.sigma * _kernels.ndtri(t)

    def _cdf(self, x):
        return _kernels.ndtr((x - self.mu) / self.sigma)

    def _sf(self, x):
        return _kernels.ndtr((self.mu - x) / self.sigma)

    def symmetry_info(self):
        return SymmetryInfo(True, float(self.mu))

    def shifted(self, c):
        return Normal(self.mu + c, self.sigma)

    def reflected(self):
        return Normal(-self.mu, self.sigma)

    def __str__(self):
        return f"normal({_fmt(self.mu)},{_fmt(self.sigma)})"


@dataclass(frozen=True)
class LogNormal(Distribution):
    mu: float = 0.0
    sigma: float = 1.0
    name = "lognormal"

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("lognormal sigma must be positive")

    def support(self):
        return (0.0, math.inf)

    def _ppf(self, p):
        return np.exp(self.mu + self.sigma * _kernels.ndtri(p))

    def _upper(self, t):
        return np.exp(self.mu - self.sigma * _kernels.ndtri(t))

    def _cdf(self, x):
        with np.errstate(divide="ignore"):
            z = (np.log(np.maximum(x, 0.0)) - self.mu) / self.sigma
        return _kernels.ndtr(z)

    def _sf(self, x):
        with np.errstate(divide="ignore"):
            z = (np.log(np.maximum(x, 0.0)) - self.mu) / self.sigma
        return _kernels.ndtr(-z)

    def __str__(self):
        return f"lognormal({_fmt(self.mu)},{_fmt(self.sigma)})"


@dataclass(frozen=True)
class StudentT(Distribution):
    """Standard (unit-scale, zero-centre) Student t; any real ``nu > 0``."""

    nu: float = 1.0
    name = "student"

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError("student degrees of freedom must be positive")

    def _lower_tail_quantile(self, t):
        # t in (0, 0.5]; returns the (non-positive) quantile at level t
        nu = self.nu
        t = np.asarray(t, dtype=np.float64)
        out = np.empty_like(t)
        far = 2.0 * t < 0.5
        near = ~far
        if near.any():
            w = special.betaincinv(0.5, 0.5 * nu, 1.0 - 2.0 * t[near])
            # for small nu the central body is already far out and w rounds to 1; use the complement there
            bad = np.flatnonzero(near)[w > 0.5]
            far[bad] = True
            near[bad] = False
            w = w[w <= 0.5]
            with np.errstate(divide="ignore"):
                out[near] = -np.sqrt(nu * w / (1.0 - w))
        if far.any():
            tf = t[far]
            y = special.betaincinv(0.5 * nu, 0.5, 2.0 * tf)
            with np.errstate(divide="ignore", over="ignore"):
                q = -np.sqrt(nu / y * (1.0 - y))
            # when y underflows use I_y(nu/2, 1/2) ~ y^(nu/2) / ((nu/2) B(nu/2, 1/2)), exact to O(y)
            deep = y < 1e-250
            if deep.any():
                log_q = 0.5 * math.log(nu) - (math.log(nu) + np.log(tf[deep]) + special.betaln(0.5 * nu, 0.5)) / nu
                with np.errstate(over="ignore"):
                    q[deep] = -np.exp(log_q)
            out[far] = q
        return out

    def _ppf(self, p):
        upper = p > 0.5
        t = np.where(upper, 1.0 - p, p)
        x = self._lower_tail_quantile(t)
        return np.where(upper, -x, x)

    def _upper(self, t):
        return -self._ppf(t)

    def _tail(self, x):
        # P(T <= -|x|)
        nu = self.nu
        x2 = x * x
        out = np.empty_like(x2)
        small = x2 < nu
        out[small] = 0.5 - 0.5 * special.betainc(0.5, 0.5 * nu, x2[small] / (nu + x2[small]))
        big = ~small
        out[big] = 0.5 * special.betainc(0.5 * nu, 0.5, nu / (nu + x2[big]))
        return out

    def _cdf(self, x):
        x = np.atleast_1d(x)
        tail = self._tail(x)
        return np.where(x < 0, tail, 1.0 - tail)

    def _sf(self, x):
        x = np.atleast_1d(x)
        tail = self._tail(x)
        return np.where(x > 0, tail, 1.0 - tail)

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = self._cdf(x)
        return float(out[0]) if x.ndim == 0 else out

    def sf(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = self._sf(x)
        return float(out[0]) if x.ndim == 0 else out

    def symmetry_info(self):
        return SymmetryInfo(True, 0.0)

    def reflected(self):
        return self

    def __str__(self):
        return f"student({_fmt(self.nu)})"


@dataclass(frozen=True)
class Laplace(Distribution):
    loc: float = 0.0
    scale: float = 1.0
    name = "laplace"

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("laplace scale must be positive")

    def _ppf(self, p):
        with np.errstate(divide="ignore"):
            lower = self.loc + self.scale * np.log(2.0 * p)
            upper = self.loc - self.scale * np.log(2.0 - 2.0 * p)
        return np.where(p < 0.5, lower, upper)

    def _upper(self, t):
        with np.errstate(divide="ignore"):
            top = self.loc - self.scale * np.log(2.0 * t)
            bottom = self.loc + self.scale * np.log(2.0 - 2.0 * t)
        return np.where(t <= 0.5, top, bottom)

    def _cdf(self, x):
        z = (x - self.loc) / self.scale
        return np.where(z < 0, 0.5 * np.exp(np.minimum(z, 0.0)), 1.0 - 0.5 * np.exp(-np.maximum(z, 0.0)))

    def _sf(self, x):
        z = (x - self.loc) / self.scale
        return np.where(z > 0, 0.5 * np.exp(-np.maximum(z, 0.0)), 1.0 - 0.5 * np.exp(np.minimum(z, 0.0)))

    def symmetry_info(self):
        return SymmetryInfo(True, float(self.loc))

    def shifted(self, c):
        return Laplace(self.loc + c, self.scale)

    def reflected(self):
        return Laplace(-self.loc, self.scale)

    def __str__(self):
        return f"laplace({_fmt(self.loc)},{_fmt(self.scale)})"


@dataclass(frozen=True)
class Logistic(Distribution):
    loc: float = 0.0
    scale: float = 1.0
    name = "logistic"

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("logistic scale must be positive")

    def _ppf(self, p):
        return self.loc + self.scale * (np.log(p) - np.log1p(-p))

    def _upper(self, t):
        return self.loc + self.scale * (np.log1p(-t) - np.log(t))

    def _cdf(self, x):
        return special.expit((x - self.loc) / self.scale)

    def _sf(self, x):
        return special.expit((self.loc - x) / self.scale)

    def symmetry_info(self):
        return SymmetryInfo(True, float(self.loc))

    def shifted(self, c):
        return Logistic(self.loc + c, self.scale)

    def reflected(self):
        return Logistic(-self.loc, self.scale)

    def __str__(self):
        return f"logistic({_fmt(self.loc)},{_fmt(self.scale)})"


@dataclass(frozen=True)
class Uniform(Distribution):
    a: float = 0.0
    b: float = 1.0
    name = "uniform"

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("uniform requires b > a")

    def support(self):
        return (float(self.a), float(self.b))

    def _ppf(self, p):
        return self.a + (self.b - self.a) * p

    def _upper(self, t):
        return self.b - (self.b - self.a) * t

    def _cdf(self, x):
        return np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0)

    def _sf(self, x):
        return np.clip((self.b - x) / (self.b - self.a), 0.0, 1.0)

    def symmetry_info(self):
        return SymmetryInfo(True, 0.5 * (self.a + self.b))

    def shifted(self, c):
        return Uniform(self.a + c, self.b + c)

    def reflected(self):
        return Uniform(-self.b, -self.a)

    def __str__(self):
        return f"uniform({_fmt(self.a)},{_fmt(self.b)})"


@dataclass(frozen=True)
class Reflected(Distribution):
    """Law of -X for a continuous X without a closed-form reflection."""

    inner: Distribution
    name = "reflected"

    def support(self):
        lo, hi = self.inner.support()
        return (-hi, -lo)

    def _ppf(self, p):
        return -self.inner.upper_quantile(p)

    def _upper(self, t):
        return -self.inner.quantile_left(t)

    def _cdf(self, x):
        return self.inner.sf(-x)

    def _sf(self, x):
        return self.inner.cdf(-x)

    def symmetry_info(self):
        info = self.inner.symmetry_info()
        return SymmetryInfo(True, -info.center) if info.is_symmetric else info

    def reflected(self):
        return self.inner

    def __str__(self):
        return f"-{self.inner}"


def _rank_tol(n: int) -> float:
    return 8.0 * n * np.finfo(float).eps


def step_quantile_left(values: np.ndarray, p):
    """Left inverse of the empirical step cdf of sorted ``values``."""
    n = values.size
    k = np.ceil(np.asarray(p) * n - _rank_tol(n)).astype(np.int64)
    return values[np.clip(k, 1, n) - 1]


def step_quantile_right(values: np.ndarray, p):
    """Right inverse of the empirical step cdf of sorted ``values``."""
    n = values.size
    m = np.floor(np.asarray(p) * n + _rank_tol(n)).astype(np.int64)
    return values[np.clip(m, 0, n - 1)]


@dataclass(frozen=True, eq=False)
class Empirical(Distribution):
    """Equally weighted sample; cdf F(x) = #{samples <= x} / n (ties allowed)."""

    values: np.ndarray = field(repr=False)
    source: str | None = None
    name = "empirical"

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=np.float64).ravel())
        if v.size < 1:
            raise ValueError("empirical distribution needs at least one value")
        if not np.all(np.isfinite(v)):
            raise ValueError("empirical values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def support(self):
        return (float(self.values[0]), float(self.values[-1]))

    def _cdf(self, x):
        return np.searchsorted(self.values, x, side="right") / self.n

    def quantile_left(self, p):
        p = np.asarray(p, dtype=np.float64)
        if np.any((p < 0.0) | (p > 1.0)):
            raise ValueError("probability level outside [0, 1]")
        return _out(step_quantile_left(self.values, p), p.ndim == 0)

    def quantile_right(self, p):
        p = np.asarray(p, dtype=np.float64)
        if np.any((p < 0.0) | (p > 1.0)):
            raise ValueError("probability level outside [0, 1]")
        return _out(step_quantile_right(self.values, p), p.ndim == 0)

    def upper_quantile(self, t, side="left"):
        t = np.asarray(t, dtype=np.float64)
        fn = self.quantile_left if side == "left" else self.quantile_right
        return fn(np.clip(1.0 - t, 0.0, 1.0))

    def symmetry_info(self):
        v = self.values
        center = 0.5 * (v[(v.size - 1) // 2] + v[v.size // 2])
        if np.max(np.abs(v + v[::-1] - 2.0 * center)) <= SYMMETRY_TOL:
            return SymmetryInfo(True, float(center))
        return SymmetryInfo(False)

    @property
    def strictly_increasing(self):
        return False

    @property
    def is_continuous(self):
        return False

    def shifted(self, c):
        return Empirical(self.values + c, self.source)

    def reflected(self):
        return Empirical(-self.values)

    def __str__(self):
        if self.source:
            return f"empirical(@{self.source})"
        return f"empirical(n={self.n})"


def load_empirical_csv(path: str | Path) -> Empirical:
    """One real per line; blank lines and ``#`` comments are ignored."""
    values = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip().rstrip(",")
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise SpecParseError(f"bad number on line {lineno} of {path}", line) from None
    if not values:
        raise SpecParseError("empirical file has no values", str(path))
    return Empirical(np.array(values), source=str(path))


# Functional API --------------------------------------------------------------

def cdf(d: Distribution, x):
    return d.cdf(x)


def quantile_left(d: Distribution, p):
    return d.quantile_left(p)


def quantile_right(d: Distribution, p):
    return d.quantile_right(p)


def quantile_alpha(d: Distribution, p, alpha: float):
    return d.quantile_alpha(p, alpha)


def symmetry_info(d: Distribution) -> SymmetryInfo:
    return d.symmetry_info()


def strictly_increasing_on_support(d: Distribution) -> bool:
    return d.strictly_increasing
