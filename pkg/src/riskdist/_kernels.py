"""Hot numeric kernels with a numba path and a pure-numpy fallback.

Set ``RISKDIST_DISABLE_NUMBA=1`` (or run without numba installed) to use the
numpy implementations.  Both paths implement the same algorithms and agree to
rounding error; ``benchmarks/bench_kernels.py`` compares them.
"""

from __future__ import annotations

import math
import os

import numpy as np
from scipy import special

_DISABLED = os.environ.get("RISKDIST_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED

# Wichura (1988) AS241 PPND16 coefficients, highest order last.
_A = np.array([3.387132872796366608, 133.14166789178437745, 1971.5909503065514427,
               13731.693765509461125, 45921.953931549871457, 67265.770927008700853,
               33430.575583588128105, 2509.0809287301226727])
_B = np.array([1.0, 42.313330701600911252, 687.1870074920579083, 5394.1960214247511077,
               21213.794301586595867, 39307.89580009271061, 28729.085735721942674,
               5226.495278852545925])
_C = np.array([1.42343711074968357734, 4.6303378461565452959, 5.7694972214606914055,
               3.64784832476320460504, 1.27045825245236838258, 0.24178072517745061177,
               0.0227238449892691845833, 7.7454501427834140764e-4])
_D = np.array([1.0, 2.05319162663775882187, 1.6763848301838038494, 0.68976733498510000455,
               0.14810397642748007459, 0.0151986665636164571966, 5.475938084995344946e-4,
               1.05075007164441684324e-9])
_E = np.array([6.6579046435011037772, 5.4637849111641143699, 1.7848265399172913358,
               0.29656057182850489123, 0.026532189526576123093, 0.0012426609473880784386,
               2.71155556874348757815e-5, 2.01033439929228813265e-7])
_F = np.array([1.0, 0.59983220655588793769, 0.13692988092273580531, 0.0148753612908506148525,
               7.868691311456132591e-4, 1.8463183175100546818e-5, 1.4215117583164458887e-7,
               2.04426310338993978564e-15])

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------

def _horner(coef, r):
    out = np.full_like(r, coef[-1])
    for c in coef[-2::-1]:
        out = out * r + c
    return out


def _ndtri_lower_np(p):
    """AS241 for p in (0, 0.5], followed by one Newton step on the cdf."""
    q = p - 0.5
    x = np.empty_like(p)
    central = np.abs(q) <= 0.425
    if central.any():
        qc = q[central]
        r = 0.180625 - qc * qc
        x[central] = qc * _horner(_A, r) / _horner(_B, r)
    tail = ~central
    if tail.any():
        r = np.sqrt(-np.log(p[tail]))
        near = r <= 5.0
        val = np.empty_like(r)
        rn = r[near] - 1.6
        val[near] = _horner(_C, rn) / _horner(_D, rn)
        rf = r[~near] - 5.0
        val[~near] = _horner(_E, rf) / _horner(_F, rf)
        x[tail] = -val
    dens = np.exp(-0.5 * x * x) * _INV_SQRT_2PI
    err = 0.5 * special.erfc(-x / _SQRT2) - p
    ok = dens > 0.0
    x[ok] -= err[ok] / dens[ok]
    return x


def ndtri_numpy(p):
    p = np.asarray(p, dtype=np.float64)
    scalar = p.ndim == 0
    p = np.atleast_1d(p)
    out = np.full(p.shape, np.nan)
    out[p == 0.0] = -np.inf
    out[p == 1.0] = np.inf
    out[p == 0.5] = 0.0
    lo = (p > 0.0) & (p < 0.5)
    hi = (p > 0.5) & (p < 1.0)
    if lo.any():
        out[lo] = _ndtri_lower_np(p[lo])
    if hi.any():
        out[hi] = -_ndtri_lower_np(1.0 - p[hi])
    return out[0] if scalar else out


def ndtr_numpy(x):
    x = np.asarray(x, dtype=np.float64)
    return 0.5 * special.erfc(-x / _SQRT2)


def spectral_sum_numpy(values, weights):
    return float(np.sum(np.asarray(values) * np.asarray(weights)))


def max_drop_numpy(delta):
    delta = np.asarray(delta, dtype=np.float64)
    if delta.size < 2:
        return 0.0
    return float(np.max(np.maximum.accumulate(delta) - delta))


def lognormal_phi_numpy(u, mu1, s1, mu2, s2):
    z = ndtri_numpy(u)
    return np.exp(mu1 + s1 * z) + np.exp(mu2 - s2 * z)


def _phi_z(z, mu1, s1, mu2, s2):
    return math.exp(mu1 + s1 * z) + math.exp(mu2 - s2 * z)


def _branch_root_py(mu1, s1, mu2, s2, x, lo, hi, decreasing, maxiter):
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        above = _phi_z(mid, mu1, s1, mu2, s2) > x
        if above == decreasing:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _std_cdf(z):
    return 0.5 * math.erfc(-z / _SQRT2)


def _level_for_prob_py(mu1, s1, mu2, s2, p, q, zmin, zlo, zhi, maxiter):
    # bisection on the left-branch root z1; the right root follows from phi(z1)
    lo, hi = zlo, zmin
    z2 = zmin
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        x = _phi_z(mid, mu1, s1, mu2, s2)
        z2 = _branch_root_py(mu1, s1, mu2, s2, x, zmin, zhi, False, maxiter)
        if p < 0.5:
            h = p - (_std_cdf(z2) - _std_cdf(mid))
        else:
            h = _std_cdf(mid) + _std_cdf(-z2) - q
        if h > 0.0:
            hi = mid
        else:
            lo = mid
    z1 = 0.5 * (lo + hi)
    return z1, _branch_root_py(mu1, s1, mu2, s2, _phi_z(z1, mu1, s1, mu2, s2), zmin, zhi, False, maxiter)


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAVE_NUMBA:
    _njit = numba.njit(cache=True, fastmath=False)

    @_njit
    def _poly(coef, r):
        out = coef[coef.size - 1]
        for i in range(coef.size - 2, -1, -1):
            out = out * r + coef[i]
        return out

    @_njit
    def _ndtri_lower_scalar(p):
        # coefficient arrays are read as frozen globals; passing them as arguments costs ~4x in call overhead
        q = p - 0.5
        if abs(q) <= 0.425:
            r = 0.180625 - q * q
            x = q * _poly(_A, r) / _poly(_B, r)
        else:
            r = math.sqrt(-math.log(p))
            if r <= 5.0:
                r -= 1.6
                x = -_poly(_C, r) / _poly(_D, r)
            else:
                r -= 5.0
                x = -_poly(_E, r) / _poly(_F, r)
        dens = math.exp(-0.5 * x * x) * 0.3989422804014327
        if dens > 0.0:
            x -= (0.5 * math.erfc(-x / 1.4142135623730951) - p) / dens
        return x

    @_njit
    def _ndtri_scalar(p):
        if p == 0.5:
            return 0.0
        if p == 0.0:
            return -np.inf
        if p == 1.0:
            return np.inf
        if not (0.0 < p < 1.0):
            return np.nan
        if p < 0.5:
            return _ndtri_lower_scalar(p)
        return -_ndtri_lower_scalar(1.0 - p)

    @_njit
    def _ndtri_array(p):
        out = np.empty(p.size)
        for i in range(p.size):
            out[i] = _ndtri_scalar(p[i])
        return out

    @_njit
    def _ndtr_array(x):
        out = np.empty(x.size)
        for i in range(x.size):
            out[i] = 0.5 * math.erfc(-x[i] / 1.4142135623730951)
        return out

    @_njit
    def _spectral_sum_nb(values, weights):
        # Neumaier compensated summation, fixed order
        s = 0.0
        c = 0.0
        for i in range(values.size):
            t = values[i] * weights[i]
            if t == 0.0:
                continue
            u = s + t
            if abs(s) >= abs(t):
                c += (s - u) + t
            else:
                c += (t - u) + s
            s = u
        return s + c

    @_njit
    def _max_drop_nb(delta):
        best = 0.0
        run = -np.inf
        for i in range(delta.size):
            if delta[i] > run:
                run = delta[i]
            d = run - delta[i]
            if d > best:
                best = d
        return best

    @_njit
    def _lognormal_phi_nb(u, mu1, s1, mu2, s2):
        out = np.empty(u.size)
        for i in range(u.size):
            z = _ndtri_scalar(u[i])
            out[i] = math.exp(mu1 + s1 * z) + math.exp(mu2 - s2 * z)
        return out

    @_njit
    def _phi_z_nb(z, mu1, s1, mu2, s2):
        return math.exp(mu1 + s1 * z) + math.exp(mu2 - s2 * z)

    @_njit
    def _branch_root_nb(mu1, s1, mu2, s2, x, lo, hi, decreasing, maxiter):
        for _ in range(maxiter):
            mid = 0.5 * (lo + hi)
            if not (lo < mid < hi):
                break
            above = _phi_z_nb(mid, mu1, s1, mu2, s2) > x
            if above == decreasing:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    @_njit
    def _level_for_prob_nb(mu1, s1, mu2, s2, p, q, zmin, zlo, zhi, maxiter):
        lo = zlo
        hi = zmin
        for _ in range(maxiter):
            mid = 0.5 * (lo + hi)
            if not (lo < mid < hi):
                break
            x = _phi_z_nb(mid, mu1, s1, mu2, s2)
            z2 = _branch_root_nb(mu1, s1, mu2, s2, x, zmin, zhi, False, maxiter)
            if p < 0.5:
                h = p - (0.5 * math.erfc(-z2 / 1.4142135623730951) - 0.5 * math.erfc(-mid / 1.4142135623730951))
            else:
                h = (0.5 * math.erfc(-mid / 1.4142135623730951) + 0.5 * math.erfc(z2 / 1.4142135623730951)
                     - q)
            if h > 0.0:
                hi = mid
            else:
                lo = mid
        z1 = 0.5 * (lo + hi)
        x1 = _phi_z_nb(z1, mu1, s1, mu2, s2)
        return z1, _branch_root_nb(mu1, s1, mu2, s2, x1, zmin, zhi, False, maxiter)

    def ndtri_numba(p):
        p = np.asarray(p, dtype=np.float64)
        out = _ndtri_array(np.ascontiguousarray(p.ravel())).reshape(p.shape)
        return out[()] if p.ndim == 0 else out

    def ndtr_numba(x):
        x = np.asarray(x, dtype=np.float64)
        out = _ndtr_array(np.ascontiguousarray(x.ravel())).reshape(x.shape)
        return out[()] if x.ndim == 0 else out

    def spectral_sum_numba(values, weights):
        return float(_spectral_sum_nb(np.ascontiguousarray(values, dtype=np.float64),
                                      np.ascontiguousarray(weights, dtype=np.float64)))

    def max_drop_numba(delta):
        return float(_max_drop_nb(np.ascontiguousarray(delta, dtype=np.float64)))

    def lognormal_phi_numba(u, mu1, s1, mu2, s2):
        u = np.asarray(u, dtype=np.float64)
        out = _lognormal_phi_nb(np.ascontiguousarray(u.ravel()), float(mu1), float(s1), float(mu2),
                                float(s2)).reshape(u.shape)
        return out[()] if u.ndim == 0 else out


# --------------------------------------------------------------------------
# public dispatch
# --------------------------------------------------------------------------

def branch_root(mu1, s1, mu2, s2, x, lo, hi, decreasing, maxiter=200):
    """Bisection in normal-score space for phi(z) = x on one monotone branch."""
    args = (float(mu1), float(s1), float(mu2), float(s2), float(x), float(lo), float(hi), bool(decreasing),
            int(maxiter))
    if USE_NUMBA:
        return float(_branch_root_nb(*args))
    return _branch_root_py(*args)


def level_for_prob(mu1, s1, mu2, s2, p, zmin, zlo, zhi, maxiter=200, q=None):
    """Normal scores (z1, z2) of the two roots whose probability gap is ``p``.

    ``q`` = 1 - p may be passed separately to keep precision when p is near 1.
    """
    q = 1.0 - p if q is None else q
    args = (float(mu1), float(s1), float(mu2), float(s2), float(p), float(q), float(zmin), float(zlo),
            float(zhi), int(maxiter))
    if USE_NUMBA:
        z1, z2 = _level_for_prob_nb(*args)
        return float(z1), float(z2)
    return _level_for_prob_py(*args)


if USE_NUMBA:
    ndtri = ndtri_numba
    ndtr = ndtr_numba
    spectral_sum = spectral_sum_numba
    max_drop = max_drop_numba
    lognormal_phi = lognormal_phi_numba
else:
    ndtri = ndtri_numpy
    ndtr = ndtr_numpy
    spectral_sum = spectral_sum_numpy
    max_drop = max_drop_numpy
    lognormal_phi = lognormal_phi_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"
