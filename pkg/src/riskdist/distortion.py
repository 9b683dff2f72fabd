"""Distortion functions: closed-form families, duals, mixtures and their jump structure.

A distortion is a non-decreasing map g: [0, 1] -> [0, 1] with g(0) = 0 and
g(1) = 1.  Besides ``evaluate`` every distortion provides

* ``complement(t)``   = 1 - g(1 - t), evaluated without cancellation, which is
  what makes the dual exact: dual(g).evaluate is g.complement;
* ``density(q)`` / ``density_lower(t)``: derivative of the continuous part at
  q and at 1 - t;
* atoms ``(location, level, below, above)`` describing jumps, where
  ``level = 1 - location`` is kept exactly and ``below``/``above`` are the
  parts of the jump taken at / after the location (left-continuous jumps have
  ``below == 0``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels

CONTINUOUS = "continuous"
LEFT = "left_continuous"
RIGHT = "right_continuous"
MIXED = "mixed"

DEFAULT_JUMP_TOL = 1e-12


class Atom(NamedTuple):
    location: float
    level: float
    below: float
    above: float


class Jump(NamedTuple):
    location: float
    level: float
    left: float
    right: float
    value: float

    @property
    def height(self) -> float:
        return self.right - self.left


@dataclass(frozen=True)
class JumpSet:
    jumps: tuple[Jump, ...]
    distortion: "Distortion"
    tol: float = DEFAULT_JUMP_TOL

    def continuous_part(self, q):
        """g minus its jumps (heights below ``tol`` were left in this part)."""
        q = np.asarray(q, dtype=np.float64)
        out = np.asarray(self.distortion.evaluate(q), dtype=np.float64).copy()
        for j in self.jumps:
            below = j.value - j.left
            above = j.right - j.value
            out = out - below * (q >= j.location) - above * (q > j.location)
        return float(out) if out.ndim == 0 else out

    @property
    def total_jump(self) -> float:
        return math.fsum(j.height for j in self.jumps)


def _arr(q):
    q = np.asarray(q, dtype=np.float64)
    return q, q.ndim == 0


def _ret(x, scalar):
    return float(x) if scalar else x


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _check_level(p: float, what: str) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"{what} level must lie in (0, 1), got {p}")
    return p


class Distortion:
    continuity = CONTINUOUS

    def evaluate(self, q):
        raise NotImplementedError

    def __call__(self, q):
        return self.evaluate(q)

    def complement(self, t):
        t, scalar = _arr(t)
        return _ret(1.0 - np.asarray(self.evaluate(1.0 - t)), scalar)

    def density(self, q):
        raise NotImplementedError

    def density_lower(self, t):
        t = np.asarray(t, dtype=np.float64)
        return self.density(1.0 - t)

    def atoms(self) -> tuple[Atom, ...]:
        return ()

    def kinks(self) -> tuple[tuple[float, float], ...]:
        """(location, level) pairs where the density is not smooth, atoms included."""
        return tuple((a.location, a.level) for a in self.atoms())

    def split(self):
        """(c_l, g_l, c_r, g_r) with g_l left- and g_r right-continuous."""
        if self.continuity in (CONTINUOUS, LEFT):
            return 1.0, self, 0.0, IDENTITY
        if self.continuity == RIGHT:
            return 0.0, IDENTITY, 1.0, self
        raise NotImplementedError


@dataclass(frozen=True)
class Identity(Distortion):
    def evaluate(self, q):
        q, scalar = _arr(q)
        return _ret(q, scalar)

    def complement(self, t):
        t, scalar = _arr(t)
        return _ret(t, scalar)

    def density(self, q):
        return np.ones_like(np.asarray(q, dtype=np.float64))

    def density_lower(self, t):
        return np.ones_like(np.asarray(t, dtype=np.float64))

    def __str__(self):
        return "identity"


IDENTITY = Identity()


@dataclass(frozen=True)
class VaRIndicator(Distortion):
    """g(q) = 1(q > 1 - p); its risk measure is the left p-quantile."""

    p: float
    continuity = LEFT

    def __post_init__(self):
        object.__setattr__(self, "p", _check_level(self.p, "VaR"))

    def evaluate(self, q):
        q, scalar = _arr(q)
        return _ret((q > 1.0 - self.p).astype(np.float64), scalar)

    def complement(self, t):
        t, scalar = _arr(t)
        return _ret((t >= self.p).astype(np.float64), scalar)

    def density(self, q):
        return np.zeros_like(np.asarray(q, dtype=np.float64))

    def density_lower(self, t):
        return np.zeros_like(np.asarray(t, dtype=np.float64))

    def atoms(self):
        return (Atom(1.0 - self.p, self.p, 0.0, 1.0),)

    def __str__(self):
        return f"var({_fmt(self.p)})"


@dataclass(frozen=True)
class TVaRCap(Distortion):
    """g(q) = min(q / (1 - p), 1)."""

    p: float

    def __post_init__(self):
        object.__setattr__(self, "p", _check_level(self.p, "TVaR"))

    def evaluate(self, q):
        q, scalar = _arr(q)
        return _ret(np.minimum(q / (1.0 - self.p), 1.0), scalar)

    def complement(self, t):
        t, scalar = _arr(t)
        return _ret(np.maximum((t - self.p) / (1.0 - self.p), 0.0), scalar)

    def density(self, q):
        q = np.asarray(q, dtype=np.float64)
        return np.where(q < 1.0 - self.p, 1.0 / (1.0 - self.p), 0.0)

    def density_lower(self, t):
        t = np.asarray(t, dtype=np.float64)
        return np.where(t > self.p, 1.0 / (1.0 - self.p), 0.0)

    def kinks(self):
        return ((1.0 - self.p, self.p),)

    def __str__(self):
        return f"tvar({_fmt(self.p)})"


@dataclass(frozen=True)
class WangTransform(Distortion):
    """g(q) = Phi(Phi^-1(q) + Phi^-1(p)), with g(0) = 0 and g(1) = 1."""

    p: float

    def __post_init__(self):
        object.__setattr__(self, "p", _check_level(self.p, "Wang"))

    @property
    def shift(self) -> float:
        return float(_kernels.ndtri(self.p))

    def evaluate(self, q):
        q, scalar = _arr(q)
        with np.errstate(invalid="ignore"):
            out = _kernels.ndtr(_kernels.ndtri(q) + self.shift)
        out = np.where(q <= 0.0, 0.0, np.where(q >= 1.0, 1.0, out))
        return _ret(out, scalar)

    def complement(self, t):
        t, scalar = _arr(t)
        with np.errstate(invalid="ignore"):
            out = _kernels.ndtr(_kernels.ndtri(t) - self.shift)
        out = np.where(t <= 0.0, 0.0, np.where(t >= 1.0, 1.0, out))
        return _ret(out, scalar)

    def density(self, q):
        a = self.shift
        return np.exp(-a * _kernels.ndtri(np.asarray(q, dtype=np.float64)) - 0.5 * a * a)

    def density_lower(self, t):
        a = self.shift
        return np.exp(a * _kernels.ndtri(np.asarray(t, dtype=np.float64)) - 0.5 * a * a)

    def __str__(self):
        return f"wang({_fmt(self.p)})"


@dataclass(frozen=True)
class PiecewiseLinear(Distortion):
    """Linear interpolation through knots (q, g(q)) from (0, 0) to (1, 1).

    A repeated abscissa ``(q, a), (q, b)`` encodes a jump from a to b at q;
    the value at q is ``a``, so such jumps are left-continuous.
    """

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self):
        knots = tuple((float(q), float(v)) for q, v in self.knots)
        if len(knots) < 2:
            raise ValueError("piecewise-linear distortion needs at least two knots")
        qs = np.array([k[0] for k in knots])
        vs = np.array([k[1] for k in knots])
        if qs[0] != 0.0 or vs[0] != 0.0 or qs[-1] != 1.0 or vs[-1] != 1.0:
            raise ValueError("piecewise-linear distortion must start at (0,0) and end at (1,1)")
        if np.any(np.diff(qs) < 0) or np.any(np.diff(vs) < 0):
            raise ValueError("knots must be sorted and values non-decreasing")
        for i in range(len(qs) - 2):
            if qs[i] == qs[i + 1] == qs[i + 2]:
                raise ValueError("at most two knots may share an abscissa")
        if qs[0] == qs[1] or qs[-1] == qs[-2]:
            raise ValueError("jumps at 0 or 1 would break g(0)=0, g(1)=1")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "_qs", qs)
        object.__setattr__(self, "_vs", vs)

    @property
    def continuity(self):
        return LEFT if self.atoms() else CONTINUOUS

    def evaluate(self, q):
        q, scalar = _arr(q)
        qs, vs = self._qs, self._vs
        idx = np.clip(np.searchsorted(qs, q, side="left"), 1, qs.size - 1)
        q0, q1 = qs[idx - 1], qs[idx]
        v0, v1 = vs[idx - 1], vs[idx]
        with np.errstate(invalid="ignore", divide="ignore"):
            lin = v0 + (v1 - v0) * (q - q0) / (q1 - q0)
        # searchsorted(left) lands on the first of a duplicated abscissa: the value at the jump
        out = np.where(q1 == q, v1, lin)
        out = np.where(q <= 0.0, 0.0, np.where(q >= 1.0, 1.0, out))
        return _ret(out, scalar)

    def density(self, q):
        q = np.asarray(q, dtype=np.float64)
        qs, vs = self._qs, self._vs
        idx = np.clip(np.searchsorted(qs, q, side="right"), 1, qs.size - 1)
        dq = qs[idx] - qs[idx - 1]
        with np.errstate(invalid="ignore", divide="ignore"):
            slope = np.where(dq > 0, (vs[idx] - vs[idx - 1]) / dq, 0.0)
        return slope

    def atoms(self):
        qs, vs = self._qs, self._vs
        return tuple(Atom(qs[i], 1.0 - qs[i], 0.0, vs[i + 1] - vs[i])
                     for i in range(qs.size - 1) if qs[i] == qs[i + 1] and vs[i + 1] > vs[i])

    def kinks(self):
        inner = sorted(set(float(q) for q in self._qs[1:-1]))
        return tuple((q, 1.0 - q) for q in inner)

    def __str__(self):
        return "pwl(" + ",".join(f"{_fmt(q)}:{_fmt(v)}" for q, v in self.knots) + ")"


@dataclass(frozen=True)
class Dual(Distortion):
    """The dual distortion q -> 1 - g(1 - q)."""

    inner: Distortion

    @property
    def continuity(self):
        c = self.inner.continuity
        return {LEFT: RIGHT, RIGHT: LEFT}.get(c, c)

    def evaluate(self, q):
        return self.inner.complement(q)

    def complement(self, t):
        return self.inner.evaluate(t)

    def density(self, q):
        return self.inner.density_lower(q)

    def density_lower(self, t):
        return self.inner.density(t)

    def atoms(self):
        return tuple(Atom(a.level, a.location, a.above, a.below) for a in reversed(self.inner.atoms()))

    def kinks(self):
        return tuple((lev, loc) for loc, lev in reversed(self.inner.kinks()))

    def split(self):
        if self.continuity == CONTINUOUS:
            return 1.0, self, 0.0, IDENTITY
        c_l, g_l, c_r, g_r = self.inner.split()
        return c_r, dual(g_r), c_l, dual(g_l)

    def __str__(self):
        return f"dual({self.inner})"


@dataclass(frozen=True)
class Mixture(Distortion):
    """c_l * g_l + c_r * g_r with non-negative weights summing to one."""

    c_l: float
    g_l: Distortion
    c_r: float
    g_r: Distortion

    def __post_init__(self):
        c_l, c_r = float(self.c_l), float(self.c_r)
        if c_l < 0 or c_r < 0:
            raise ValueError("mixture weights must be non-negative")
        if abs(c_l + c_r - 1.0) > 1e-12:
            raise ValueError(f"mixture weights must sum to 1, got {c_l} + {c_r}")
        object.__setattr__(self, "c_l", c_l)
        object.__setattr__(self, "c_r", c_r)

    def _parts(self):
        return [(c, g) for c, g in ((self.c_l, self.g_l), (self.c_r, self.g_r)) if c > 0]

    @property
    def continuity(self):
        classes = {g.continuity for _, g in self._parts()} - {CONTINUOUS}
        if not classes:
            return CONTINUOUS
        if len(classes) == 1:
            return classes.pop()
        return MIXED

    def evaluate(self, q):
        q, scalar = _arr(q)
        out = self.c_l * np.asarray(self.g_l.evaluate(q)) + self.c_r * np.asarray(self.g_r.evaluate(q))
        out = np.where(q <= 0.0, 0.0, np.where(q >= 1.0, 1.0, out))
        return _ret(out, scalar)

    def complement(self, t):
        t, scalar = _arr(t)
        out = self.c_l * np.asarray(self.g_l.complement(t)) + self.c_r * np.asarray(self.g_r.complement(t))
        out = np.where(t <= 0.0, 0.0, np.where(t >= 1.0, 1.0, out))
        return _ret(out, scalar)

    def density(self, q):
        return self.c_l * self.g_l.density(q) + self.c_r * self.g_r.density(q)

    def density_lower(self, t):
        return self.c_l * self.g_l.density_lower(t) + self.c_r * self.g_r.density_lower(t)

    def atoms(self):
        merged: dict[float, list[float]] = {}
        for c, g in self._parts():
            for a in g.atoms():
                slot = merged.setdefault(a.location, [a.level, 0.0, 0.0])
                slot[1] += c * a.below
                slot[2] += c * a.above
        return tuple(Atom(loc, lev, below, above) for loc, (lev, below, above) in sorted(merged.items()))

    def kinks(self):
        seen = {}
        for _, g in self._parts():
            for loc, lev in g.kinks():
                seen.setdefault(loc, lev)
        return tuple(sorted(seen.items()))

    def split(self):
        left, right = [], []
        for c, g in self._parts():
            a_l, g_l, a_r, g_r = g.split()
            if a_l > 0:
                left.append((c * a_l, g_l))
            if a_r > 0:
                right.append((c * a_r, g_r))
        c_l, g_l = _combine(left)
        c_r, g_r = _combine(right)
        return c_l, g_l, c_r, g_r

    def __str__(self):
        return f"mix({_fmt(self.c_l)},{self.g_l},{_fmt(self.c_r)},{self.g_r})"


def _combine(parts):
    total = math.fsum(c for c, _ in parts)
    if not parts:
        return 0.0, IDENTITY
    if len(parts) == 1:
        return total, parts[0][1]
    (c1, g1), (c2, g2) = parts
    return total, Mixture(c1 / total, g1, 1.0 - c1 / total, g2)


# Functional API --------------------------------------------------------------

def evaluate(g: Distortion, q):
    return g.evaluate(q)


def dual(g: Distortion) -> Distortion:
    if isinstance(g, Identity):
        return g
    if isinstance(g, Dual):
        return g.inner
    return Dual(g)


def continuity_class(g: Distortion) -> str:
    return g.continuity


def decompose(g: Distortion):
    """Split g = c_l * g_l + c_r * g_r into left- and right-continuous parts.

    Continuous distortions count as left-continuous; the unused side gets
    weight 0 paired with the identity.
    """
    return g.split()


def jump_set(g: Distortion, tol: float = DEFAULT_JUMP_TOL) -> JumpSet:
    if not tol > 0:
        raise ValueError("tol must be positive")
    jumps = []
    for a in g.atoms():
        if a.below + a.above < tol:
            continue
        value = float(g.evaluate(a.location))
        jumps.append(Jump(a.location, a.level, value - a.below, value + a.above, value))
    return JumpSet(tuple(jumps), g, tol)


def check_distortion(g: Distortion, n: int = 10_001) -> None:
    """Raise ValueError unless g(0) = 0, g(1) = 1 and g is non-decreasing on an n-grid."""
    if float(g.evaluate(0.0)) != 0.0 or float(g.evaluate(1.0)) != 1.0:
        raise ValueError(f"{g}: endpoint law violated")
    vals = np.asarray(g.evaluate(np.linspace(0.0, 1.0, n)))
    if np.any(np.diff(vals) < -1e-15) or np.any(vals < 0) or np.any(vals > 1):
        raise ValueError(f"{g}: not a non-decreasing map into [0, 1]")
