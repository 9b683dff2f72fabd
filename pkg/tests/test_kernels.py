import os
import subprocess
import sys

import mpmath as mp
import numpy as np
import pytest

from riskdist import _kernels as k

mp.mp.dps = 30
needs_numba = pytest.mark.skipif(not k.HAVE_NUMBA, reason="numba not installed")


def test_ndtri_numpy_vs_mpmath():
    p = np.array([1e-300, 1e-50, 1e-10, 0.02425, 0.3, 0.5, 0.8, 0.97575, 1 - 1e-12])
    out = k.ndtri_numpy(p)
    for pi, x in zip(p, out):
        lo = min(pi, 1 - pi)
        start = -mp.sqrt(-2 * mp.log(lo)) if lo < 0.1 else mp.mpf(0)
        ref = mp.findroot(lambda t: mp.log(mp.ncdf(t)) - mp.log(mp.mpf(lo)), start)
        ref = ref if pi <= 0.5 else -ref
        assert x == pytest.approx(float(ref), rel=1e-14, abs=1e-16)


def test_ndtri_endpoints():
    np.testing.assert_array_equal(k.ndtri_numpy(np.array([0.0, 1.0])), [-np.inf, np.inf])


@needs_numba
@pytest.mark.parametrize("name", ["ndtri", "ndtr"])
def test_backends_agree_on_normal_functions(name):
    rng = np.random.default_rng(1)
    x = rng.uniform(1e-12, 1 - 1e-12, 20_000) if name == "ndtri" else rng.normal(0, 6, 20_000)
    a = getattr(k, f"{name}_numpy")(x)
    b = getattr(k, f"{name}_numba")(x)
    # erfc in the deep tail differs between libm and cephes by a few ulps
    np.testing.assert_allclose(a, b, rtol=5e-14, atol=1e-300)


@needs_numba
def test_backends_agree_on_reductions():
    rng = np.random.default_rng(2)
    v = np.sort(rng.standard_t(3, 100_000))
    w = rng.dirichlet(np.ones(v.size))
    assert k.spectral_sum_numba(v, w) == pytest.approx(k.spectral_sum_numpy(v, w), rel=1e-12)
    d = rng.normal(size=50_000)
    assert k.max_drop_numba(d) == k.max_drop_numpy(d)
    u = np.linspace(1e-6, 1 - 1e-6, 10_001)
    np.testing.assert_allclose(k.lognormal_phi_numba(u, 0, 1, 0.3, 1.5), k.lognormal_phi_numpy(u, 0, 1, 0.3, 1.5),
                               rtol=1e-11)


@needs_numba
def test_backends_agree_on_root_search():
    args = (0.0, 1.0, 0.3, 1.5)
    zmin = (0.3 - 0.0 + np.log(1.5)) / 2.5
    for p in (0.05, 0.5, 0.95, 0.999):
        a = k._level_for_prob_py(*args, p, 1 - p, zmin, -40.0, 40.0, 200)
        b = k._level_for_prob_nb(*args, p, 1 - p, zmin, -40.0, 40.0, 200)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-13)


def _backend_in_subprocess(flag):
    env = dict(os.environ)
    env.pop("RISKDIST_DISABLE_NUMBA", None)
    if flag is not None:
        env["RISKDIST_DISABLE_NUMBA"] = flag
    out = subprocess.run([sys.executable, "-c", "import riskdist; print(riskdist.BACKEND)"], env=env,
                         capture_output=True, text=True, check=True)
    return out.stdout.strip()


@pytest.mark.parametrize("flag", ["1", "true", "yes"])
def test_env_flag_selects_numpy(flag):
    assert _backend_in_subprocess(flag) == "numpy"


def test_default_backend():
    expected = "numba" if k.HAVE_NUMBA else "numpy"
    assert _backend_in_subprocess(None) == expected
    assert _backend_in_subprocess("0") == expected
