"""Acceptance sweeps: closed forms and decompositions against the grid oracle.

Each criterion returns a :class:`CriterionResult` with one row per case.
Passing a grid size ``n`` below a criterion's default oracle size switches
that criterion to quick mode, in which every tolerance is multiplied by 64.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .decomposition import (lognormal_identical_tvar, lognormal_identical_var, lognormal_phi_minimizer,
                            rho_counter_sum, tvar_counter_sum, var_counter_sum, wt_counter_sum)
from .dependence import X_LE_Y, Y_LE_X, AggregatePosition, check_dispersive, comonotonic_rho
from .distortion import (IDENTITY, Dual, Mixture, PiecewiseLinear, TVaRCap, VaRIndicator, WangTransform, decompose,
                         dual)
from .distributions import Empirical, Laplace, Logistic, LogNormal, Normal, StudentT, Uniform
from .oracle import DEFAULT_N, HEAVY_N, default_n, empirical_rho, grid_sample, xside_rho
from .risk_measures import rho

QUICK_FACTOR = 64.0
LEVELS = (0.5, 0.9, 0.95, 0.99)
THEOREM_PAIRS = (
    (Normal(0, 2), Normal(0, 1)),
    (StudentT(2), StudentT(5)),
    (Laplace(0, math.sqrt(2.0)), Normal(0, 1)),
    (Logistic(0, 1), Normal(0, 1)),
)
LOGNORMAL_GRID = [(mu, s, p) for mu in (0.0, 0.5) for s in (0.5, 1.0, 1.5) for p in (0.9, 0.95, 0.99)]
MINIMIZER_SEED = 20240607


@dataclass
class Row:
    label: str
    value: float
    reference: float
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance


@dataclass
class CriterionResult:
    number: int
    title: str
    rows: list[Row] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    elapsed: float = 0.0
    time_limit: float | None = None

    @property
    def passed(self) -> bool:
        ok = bool(self.rows) and all(r.passed for r in self.rows)
        if self.time_limit is not None:
            ok = ok and self.elapsed <= self.time_limit
        return ok

    @property
    def failures(self) -> list[Row]:
        return [r for r in self.rows if not r.passed]

    @property
    def worst(self) -> Row | None:
        # largest deviation relative to its tolerance
        return max(self.rows, key=lambda r: r.deviation / r.tolerance, default=None)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        w = self.worst
        tail = "" if w is None else f"; worst {w.label}: dev {w.deviation:.3g} vs tol {w.tolerance:.3g}"
        timing = f"{self.elapsed:.1f}s" + (f" (limit {self.time_limit:.0f}s)" if self.time_limit else "")
        return (f"criterion {self.number:2d} {status}  {self.title}: {len(self.rows) - len(self.failures)}/"
                f"{len(self.rows)} cases within tolerance, {timing}{tail}")


def _scale(n: int | None, default: int) -> tuple[int, float]:
    if n is None:
        return default, 1.0
    return n, (QUICK_FACTOR if n < default else 1.0)


def _rel_tol(rel: float, floor: float, value: float) -> float:
    return max(rel * abs(value), floor)


def distortion_family(p: float) -> list:
    """var, tvar, wang at level p and their duals."""
    base = [VaRIndicator(p), TVaRCap(p), WangTransform(p)]
    return base + [dual(g) for g in base]


def every_kind() -> list:
    """One or more instances of each distortion kind."""
    kinds = [IDENTITY, VaRIndicator(0.9), TVaRCap(0.95), WangTransform(0.95),
             PiecewiseLinear(((0.0, 0.0), (0.2, 0.5), (0.6, 0.9), (1.0, 1.0))),
             PiecewiseLinear(((0.0, 0.0), (0.3, 0.2), (0.3, 0.6), (1.0, 1.0))),
             Mixture(0.4, VaRIndicator(0.9), 0.6, dual(VaRIndicator(0.8))),
             Mixture(0.5, TVaRCap(0.9), 0.5, WangTransform(0.7))]
    return kinds + [Dual(g) for g in kinds]


# -- criteria --------------------------------------------------------------------------

def criterion_1(n: int | None = None) -> CriterionResult:
    n, factor = _scale(n, DEFAULT_N)
    res = CriterionResult(1, "counter-monotonic decomposition vs grid oracle", time_limit=60.0)
    t0 = time.perf_counter()
    for d1, d2 in THEOREM_PAIRS:
        sample = grid_sample(AggregatePosition.counter_pair(d1, d2), n)
        for p in LEVELS:
            for g in distortion_family(p):
                value = rho_counter_sum(g, d1, d2)[0].value
                ref = empirical_rho(g, sample)
                res.rows.append(Row(f"{d1}&{d2} {g}", value, ref, abs(value - ref),
                                    factor * _rel_tol(1e-4, 1e-5, value)))
    res.elapsed = time.perf_counter() - t0
    res.notes.append(f"oracle N={n}")
    return res


COMONOTONE_MIXES = (
    (Normal(0, 1), Uniform(0, 1)),
    (Normal(1, 2), LogNormal(0, 0.5)),
    (Uniform(-1, 2), LogNormal(0.2, 0.5), Normal(0, 1)),
)


def criterion_2(n: int | None = None) -> CriterionResult:
    res = CriterionResult(2, "comonotonic additivity vs grid oracle")
    t0 = time.perf_counter()
    for legs in COMONOTONE_MIXES:
        heavy = any(isinstance(d, LogNormal) for d in legs)
        size, factor = _scale(n, HEAVY_N if heavy else DEFAULT_N)
        sample = grid_sample(AggregatePosition.comonotone(legs), size)
        label = "+".join(str(d) for d in legs)
        for p in LEVELS:
            for g in distortion_family(p):
                value = comonotonic_rho(g, legs)
                ref = empirical_rho(g, sample)
                res.rows.append(Row(f"{label} {g}", value, ref, abs(value - ref),
                                    factor * _rel_tol(1e-5, 1e-12, value)))
    res.elapsed = time.perf_counter() - t0
    return res


def criterion_3(n: int | None = None) -> CriterionResult:
    res = CriterionResult(3, "VaR/TVaR/WT decompositions equal the generic path")
    t0 = time.perf_counter()
    for d1, d2 in THEOREM_PAIRS:
        for p in LEVELS:
            checks = ((f"VaR {p}", var_counter_sum(d1, d2, p), VaRIndicator(p)),
                      (f"TVaR {p}", tvar_counter_sum(d1, d2, p), TVaRCap(p)),
                      (f"WT {p}", wt_counter_sum(d1, d2, p), WangTransform(p)))
            for label, value, g in checks:
                ref = rho_counter_sum(g, d1, d2)[0].value
                res.rows.append(Row(f"{d1}&{d2} {label}", value, ref, abs(value - ref), 1e-8))
    res.elapsed = time.perf_counter() - t0
    return res


def _lognormal_samples(n):
    samples = {}
    for mu, s, _ in LOGNORMAL_GRID:
        if (mu, s) not in samples:
            d = LogNormal(mu, s)
            samples[(mu, s)] = grid_sample(AggregatePosition.counter_pair(d, d), n)
    return samples


def criterion_4(n: int | None = None) -> CriterionResult:
    n, factor = _scale(n, HEAVY_N)
    res = CriterionResult(4, "identical log-normal VaR closed form vs grid oracle")
    t0 = time.perf_counter()
    samples = _lognormal_samples(n)
    for mu, s, p in LOGNORMAL_GRID:
        value = lognormal_identical_var(mu, s, p)
        ref = empirical_rho(VaRIndicator(p), samples[(mu, s)])
        res.rows.append(Row(f"mu={mu} sigma={s} p={p}", value, ref, abs(value - ref), factor * 1e-4 * abs(ref)))
    anchor = lognormal_identical_var(0.0, 1.0, 0.9)
    res.rows.append(Row("anchor mu=0 sigma=1 p=0.9", anchor, 5.37329, abs(anchor - 5.37329), 1e-4))
    res.elapsed = time.perf_counter() - t0
    res.notes.append(f"oracle N={n}")
    return res


def criterion_5(n: int | None = None) -> CriterionResult:
    n, factor = _scale(n, HEAVY_N)
    res = CriterionResult(5, "identical log-normal TVaR closed form vs grid oracle")
    t0 = time.perf_counter()
    samples = _lognormal_samples(n)
    for mu, s, p in LOGNORMAL_GRID:
        value = lognormal_identical_tvar(mu, s, p)
        ref = empirical_rho(TVaRCap(p), samples[(mu, s)])
        res.rows.append(Row(f"mu={mu} sigma={s} p={p}", value, ref, abs(value - ref), factor * 5e-4 * abs(ref)))
    res.elapsed = time.perf_counter() - t0
    res.notes.append(f"oracle N={n}")
    return res


def minimizer_cases(count: int = 20) -> list[tuple[float, float, float, float]]:
    rng = np.random.default_rng(MINIMIZER_SEED)
    mus = rng.uniform(-1.0, 1.0, size=(count, 2))
    sigmas = rng.uniform(0.2, 2.0, size=(count, 2))
    return [(float(m[0]), float(s[0]), float(m[1]), float(s[1])) for m, s in zip(mus, sigmas)]


def criterion_6(n: int | None = None) -> CriterionResult:
    res = CriterionResult(6, "log-normal aggregate minimizer vs grid argmin")
    t0 = time.perf_counter()
    size = 100_000
    u = np.arange(1, size + 1, dtype=np.float64) / (size + 1)
    for mu1, s1, mu2, s2 in minimizer_cases():
        closed = lognormal_phi_minimizer(mu1, s1, mu2, s2)
        phi = _kernels.lognormal_phi(u, mu1, s1, mu2, s2)
        grid = float(u[int(np.argmin(phi))])
        res.rows.append(Row(f"({mu1:.3f},{s1:.3f},{mu2:.3f},{s2:.3f})", closed, grid, abs(closed - grid), 2e-5))
    res.elapsed = time.perf_counter() - t0
    return res


def dispersive_cases():
    """(label, X, Y, expected ordering of X relative to Y)."""
    return [
        ("normal sigma1 < sigma2", Normal(0, 1), Normal(0, 2), X_LE_Y),
        ("normal sigma1 >= sigma2", Normal(0, 2), Normal(0, 1), Y_LE_X),
        ("student nu1 < nu2", StudentT(5), StudentT(2), X_LE_Y),
        ("normal vs student(3)", Normal(0, 1), StudentT(3), X_LE_Y),
        ("normal vs laplace(0, 2^0.5)", Normal(0, 1), Laplace(0, math.sqrt(2.0)), X_LE_Y),
        ("normal vs logistic(0, 1)", Normal(0, 1), Logistic(0, 1), X_LE_Y),
    ]


def criterion_7(n: int | None = None) -> CriterionResult:
    res = CriterionResult(7, "dispersive-order certificates")
    t0 = time.perf_counter()
    for label, x, y, expected in dispersive_cases():
        v = check_dispersive(x, y, 10_001)
        ok = v.ordering == expected
        # a wrong ordering is reported as an infinite deviation
        res.rows.append(Row(f"{label}: {v.ordering}", v.max_violation, 0.0,
                            v.max_violation if ok else math.inf, 1e-9))
    res.elapsed = time.perf_counter() - t0
    return res


def representation_matrix():
    dists = [Normal(1, 2), StudentT(2), StudentT(5), LogNormal(0, 1), Uniform(0, 1), Laplace(0, math.sqrt(2.0)),
             Logistic(0, 1), Empirical(np.array([1.0, 2.0, 2.0, 5.0, -3.0, 0.5]))]
    gs = [IDENTITY, VaRIndicator(0.9), TVaRCap(0.95), WangTransform(0.95),
          dual(VaRIndicator(0.9)), dual(TVaRCap(0.95)), dual(WangTransform(0.95)),
          PiecewiseLinear(((0.0, 0.0), (0.2, 0.5), (0.6, 0.9), (1.0, 1.0))),
          Mixture(0.4, VaRIndicator(0.9), 0.6, dual(VaRIndicator(0.8)))]
    return dists, gs


def criterion_8(n: int | None = None) -> CriterionResult:
    res = CriterionResult(8, "quantile-side vs cdf-side representation")
    t0 = time.perf_counter()
    dists, gs = representation_matrix()
    for d in dists:
        for g in gs:
            a = rho(g, d).value
            b = xside_rho(g, d)
            res.rows.append(Row(f"{d} {g}", a, b, abs(a - b), 1e-6 * max(abs(a), abs(b)) + 1e-10))
    res.elapsed = time.perf_counter() - t0
    return res


def criterion_9(n: int | None = None) -> CriterionResult:
    res = CriterionResult(9, "dual involution, split exactness, endpoint laws")
    t0 = time.perf_counter()
    q = np.linspace(0.0, 1.0, 10_000)
    for g in every_kind():
        base = np.asarray(g.evaluate(q))
        twice = np.asarray(Dual(Dual(g)).evaluate(q))
        res.rows.append(Row(f"{g} dual involution", 0.0, 0.0, float(np.max(np.abs(twice - base))), 1e-12))
        c_l, g_l, c_r, g_r = decompose(g)
        parts = c_l * np.asarray(g_l.evaluate(q)) + c_r * np.asarray(g_r.evaluate(q))
        res.rows.append(Row(f"{g} split", 0.0, 0.0, float(np.max(np.abs(parts - base))), 1e-12))
        ends = max(abs(float(g.evaluate(0.0))), abs(float(g.evaluate(1.0)) - 1.0))
        res.rows.append(Row(f"{g} endpoints", 0.0, 0.0, ends, 1e-12))
    res.elapsed = time.perf_counter() - t0
    return res


def criterion_10(n: int | None = None) -> CriterionResult:
    res = CriterionResult(10, "identical symmetric marginals hedge to twice the centre")
    t0 = time.perf_counter()
    family = [g for g in every_kind()] + [g for p in LEVELS for g in distortion_family(p)]
    for c in (-1.0, 0.0, 3.0):
        for s in (0.5, 2.0):
            d = Normal(c, s)
            for g in family:
                value = rho_counter_sum(g, d, d)[0].value
                res.rows.append(Row(f"{d} {g}", value, 2 * c, abs(value - 2 * c), 1e-8))
    res.elapsed = time.perf_counter() - t0
    return res


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10}

TAGS = {
    "theorem": (1, 3, 10),
    "oracle": (1, 2, 4, 5),
    "comonotonic": (2,),
    "lognormal": (4, 5, 6),
    "dispersive": (7,),
    "representation": (8,),
    "distortion": (9,),
    "hedge": (10,),
}


def select(only: str | None) -> list[int]:
    """Criterion numbers matching a comma list of numbers and tags."""
    if not only:
        return sorted(CRITERIA)
    chosen = set()
    for item in only.split(","):
        item = item.strip().lower()
        if item.isdigit() and int(item) in CRITERIA:
            chosen.add(int(item))
        elif item in TAGS:
            chosen.update(TAGS[item])
        else:
            raise ValueError(f"unknown criterion or tag {item!r}")
    return sorted(chosen)


def run(numbers=None, n: int | None = None) -> list[CriterionResult]:
    return [CRITERIA[k](n) for k in (numbers or sorted(CRITERIA))]


__all__ = ["CRITERIA", "CriterionResult", "Row", "TAGS", "run", "select", "default_n"]
