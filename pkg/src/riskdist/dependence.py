"""Comonotonic and counter-monotonic couplings, dispersive order, Frechet bounds.

A position is a list of legs driven by a single uniform U: comonotone legs
are evaluated at U, counter legs at 1 - U.  Its aggregate quantile along the
driver is

    phi(u) = sum_com Q_i(u) + sum_counter Q_j(1 - u).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .distortion import Distortion
from .distributions import Distribution, Normal, StudentT
from .errors import ApplicabilityError, NumericalError
from .risk_measures import rho

DISPERSIVE_TOL = 1e-9
DEFAULT_GRID = 10_001
SHRUNK_RANGE = (1e-6, 1.0 - 1e-6)

X_LE_Y = "X_le_Y"
Y_LE_X = "Y_le_X"
EQUAL = "equal"
INCOMPARABLE = "incomparable"


class Direction(enum.Enum):
    COMONOTONE = "comonotone"
    COUNTER = "counter"


@dataclass(frozen=True)
class Leg:
    distribution: Distribution
    direction: Direction = Direction.COMONOTONE


@dataclass(frozen=True)
class AggregatePosition:
    legs: tuple[Leg, ...]

    def __post_init__(self):
        legs = tuple(self.legs)
        if not legs:
            raise ValueError("a position needs at least one leg")
        for leg in legs:
            if not isinstance(leg.distribution, Distribution):
                raise TypeError(f"not a distribution: {leg.distribution!r}")
        object.__setattr__(self, "legs", legs)

    @classmethod
    def counter_pair(cls, d1: Distribution, d2: Distribution) -> "AggregatePosition":
        """X1 driven by U, X2 by 1 - U."""
        return cls((Leg(d1, Direction.COMONOTONE), Leg(d2, Direction.COUNTER)))

    @classmethod
    def comonotone(cls, legs: Sequence[Distribution]) -> "AggregatePosition":
        return cls(tuple(Leg(d, Direction.COMONOTONE) for d in legs))

    def describe(self) -> str:
        parts = []
        for leg in self.legs:
            arg = "U" if leg.direction is Direction.COMONOTONE else "1-U"
            parts.append(f"Q[{leg.distribution}]({arg})")
        return " + ".join(parts)


def _quantile_at(d: Distribution, u: np.ndarray, t: np.ndarray) -> np.ndarray:
    # level u, with t = 1 - u used on the upper half to keep tail accuracy
    out = np.empty_like(u)
    upper = u > 0.5
    if upper.any():
        out[upper] = d.upper_quantile(t[upper])
    if (~upper).any():
        out[~upper] = d.quantile_left(u[~upper])
    return out


def aggregate_quantile(pos: AggregatePosition, u):
    """phi(u): comonotone legs at u, counter legs at 1 - u."""
    u = np.asarray(u, dtype=np.float64)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise ValueError("u must lie in (0, 1)")
    t = 1.0 - u
    total = np.zeros_like(u)
    for leg in pos.legs:
        if leg.direction is Direction.COMONOTONE:
            total += _quantile_at(leg.distribution, u, t)
        else:
            total += _quantile_at(leg.distribution, t, u)
    return float(total[0]) if scalar else total


# -- dispersive order -----------------------------------------------------------

@dataclass(frozen=True)
class DispersiveVerdict:
    ordering: str
    max_violation: float
    grid_size: int
    grid_range: tuple[float, float] = (0.0, 1.0)
    range_shrunk: bool = False
    analytic: bool = False

    def __post_init__(self):
        if self.ordering not in (X_LE_Y, Y_LE_X, EQUAL, INCOMPARABLE):
            raise ValueError(f"unknown ordering {self.ordering!r}")
        if not self.max_violation >= 0.0:
            raise ValueError("max_violation must be non-negative")

    @property
    def conclusive(self) -> bool:
        return self.ordering != INCOMPARABLE


def _analytic_verdict(dX: Distribution, dY: Distribution) -> DispersiveVerdict | None:
    # spread parameters: larger sigma, or fewer degrees of freedom, is more dispersed
    if isinstance(dX, Normal) and isinstance(dY, Normal):
        a, b = dX.sigma, dY.sigma
    elif isinstance(dX, StudentT) and isinstance(dY, StudentT):
        a, b = 1.0 / dX.nu, 1.0 / dY.nu
    else:
        return None
    ordering = EQUAL if a == b else (X_LE_Y if a < b else Y_LE_X)
    return DispersiveVerdict(ordering, 0.0, 0, analytic=True)


def _grid(n: int, lo: float, hi: float):
    k = np.arange(1, n + 1, dtype=np.float64)
    if lo == 0.0:
        u = k / (n + 1)
        t = (n + 1 - k) / (n + 1)
    else:
        u = lo + (hi - lo) * k / (n + 1)
        t = 1.0 - u
    return u, t


def check_dispersive(dX: Distribution, dY: Distribution, grid_n: int = DEFAULT_GRID,
                     analytic: bool = False, tol: float = DISPERSIVE_TOL) -> DispersiveVerdict:
    """Grid certificate for the dispersive order between ``dX`` and ``dY``.

    X <=disp Y when Q_Y(u) - Q_X(u) is non-decreasing.  The difference is
    evaluated on u_k = k / (grid_n + 1); ``max_violation`` is the largest
    decrease against the reported ordering.  With ``analytic=True`` normal
    and Student pairs are decided from their parameters.
    """
    if grid_n < 100:
        raise ValueError("grid_n must be at least 100")
    if analytic:
        verdict = _analytic_verdict(dX, dY)
        if verdict is not None:
            return verdict
    lo, hi = 0.0, 1.0
    u, t = _grid(grid_n, lo, hi)
    with np.errstate(over="ignore", invalid="ignore"):
        delta = _quantile_at(dY, u, t) - _quantile_at(dX, u, t)
    shrunk = False
    if not np.all(np.isfinite(delta)):
        lo, hi = SHRUNK_RANGE
        shrunk = True
        u, t = _grid(grid_n, lo, hi)
        delta = _quantile_at(dY, u, t) - _quantile_at(dX, u, t)
        if not np.all(np.isfinite(delta)):
            raise NumericalError("quantiles overflow even on the shrunk grid")
    up = _kernels.max_drop(delta)
    down = _kernels.max_drop(-delta)
    if up <= tol and down <= tol:
        ordering, violation = EQUAL, max(up, down)
    elif up <= tol:
        ordering, violation = X_LE_Y, up
    elif down <= tol:
        ordering, violation = Y_LE_X, down
    else:
        ordering, violation = INCOMPARABLE, min(up, down)
    return DispersiveVerdict(ordering, float(violation), grid_n, (lo, hi), shrunk)


# -- Frechet bounds -------------------------------------------------------------

def _probabilities(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise ValueError("need at least one cdf value")
    if np.any((v < 0.0) | (v > 1.0)) or np.any(np.isnan(v)):
        raise ValueError("cdf values must lie in [0, 1]")
    return v


def frechet_upper(values) -> float:
    """Upper Frechet bound min_i F_i(x_i)."""
    return float(np.min(_probabilities(values)))


def frechet_lower(values) -> float:
    """Lower Frechet bound max(sum_i F_i(x_i) - n + 1, 0)."""
    v = _probabilities(values)
    # one correctly rounded sum, so the bound never exceeds min_i F_i by rounding
    return max(math.fsum([*v.tolist(), 1.0 - v.size]), 0.0)


# -- comonotonic and counter-monotonic sums --------------------------------------

def comonotonic_rho(g: Distortion, legs: Sequence[Distribution], cfg=None) -> float:
    """rho_g of the comonotonic sum: the sum of the leg measures."""
    if not legs:
        raise ValueError("need at least one leg")
    return math.fsum(rho(g, d, cfg).value for d in legs)


def certify_counter_pair(d1: Distribution, d2: Distribution, grid_n: int = DEFAULT_GRID,
                         analytic: bool = True) -> DispersiveVerdict:
    """Verdict for the effective pair behind phi(u) = Q1(u) + Q2(1 - u).

    phi(u) = Q1(u) - Q_{-X2}(u), so phi is non-decreasing exactly when
    -X2 <=disp X1, i.e. when the reported ordering is X_le_Y or equal.
    """
    return check_dispersive(d2.reflected(), d1, grid_n, analytic=analytic)


def counter_sum_quantile(pos: AggregatePosition, p: float, grid_n: int = DEFAULT_GRID) -> float:
    """Left p-quantile of X1(U) + X2(1 - U) when phi is certified monotone."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if len(pos.legs) != 2 or {leg.direction for leg in pos.legs} != {Direction.COMONOTONE, Direction.COUNTER}:
        raise ValueError("need exactly one comonotone and one counter leg")
    com = next(leg.distribution for leg in pos.legs if leg.direction is Direction.COMONOTONE)
    counter = next(leg.distribution for leg in pos.legs if leg.direction is Direction.COUNTER)
    continuous = all(d.is_continuous and d.strictly_increasing for d in (com, counter))
    verdict = certify_counter_pair(com, counter, grid_n)
    if not continuous or verdict.ordering not in (X_LE_Y, EQUAL):
        raise ApplicabilityError("monotonicity of phi not established", verdict)
    return aggregate_quantile(pos, p)
