#!/usr/bin/env python3
"""Benchmark the numba kernels against their numpy fallbacks.

Both implementations are imported side by side, so one run reports both
timings plus the largest disagreement between them.  The fallback is what the
package uses when RISKDIST_DISABLE_NUMBA=1.

Usage:
    python benchmarks/bench_kernels.py [--n N] [--repeat R]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from riskdist import _kernels as K


def best_of(fn, repeat):
    fn()  # warm up (and trigger compilation)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(n):
    u = (np.arange(1, n + 1) - 0.5) / n
    rng = np.random.default_rng(7)
    values = np.sort(rng.standard_t(3.0, n))
    weights = np.full(n, 1.0 / n)
    delta = np.cumsum(rng.normal(0.0, 1e-3, n))
    z = K.ndtri_numpy(u)
    levels = np.linspace(0.01, 0.99, 200)

    def levels_py():
        return [K._level_for_prob_py(0.0, 1.0, 0.5, 1.5, p, 1.0 - p, 0.0, -40.0, 40.0, 200) for p in levels]

    def levels_nb():
        return [K._level_for_prob_nb(0.0, 1.0, 0.5, 1.5, p, 1.0 - p, 0.0, -40.0, 40.0, 200) for p in levels]

    return [
        ("ndtri", lambda: K.ndtri_numpy(u), lambda: K.ndtri_numba(u)),
        ("ndtr", lambda: K.ndtr_numpy(z), lambda: K.ndtr_numba(z)),
        ("spectral_sum", lambda: K.spectral_sum_numpy(values, weights),
         lambda: K.spectral_sum_numba(values, weights)),
        ("max_drop", lambda: K.max_drop_numpy(delta), lambda: K.max_drop_numba(delta)),
        ("lognormal_phi", lambda: K.lognormal_phi_numpy(u, 0.0, 1.0, 0.5, 1.5),
         lambda: K.lognormal_phi_numba(u, 0.0, 1.0, 0.5, 1.5)),
        ("level_for_prob x200", levels_py, levels_nb),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2 ** 20, help="grid size for the array kernels")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max |diff|':>14}")
    for name, f_np, f_nb in cases(args.n):
        t_np = best_of(f_np, args.repeat)
        t_nb = best_of(f_nb, args.repeat)
        diff = float(np.max(np.abs(np.subtract(f_np(), f_nb(), dtype=np.float64))))
        print(f"{name:<22}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>10.1f}{diff:>14.2e}")


if __name__ == "__main__":
    main()
