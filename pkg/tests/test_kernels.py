import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dense_lag, gamma_loop
from serialcorr import _kernels_py, kernels

compiled = pytest.importorskip("serialcorr._kernels")
BACKENDS = [_kernels_py, compiled]


def _sym(rng, n):
    a = rng.normal(size=(n, n))
    return a + a.T


@pytest.mark.parametrize("mod", BACKENDS, ids=["python", "cython"])
def test_against_dense(mod):
    rng = np.random.default_rng(5)
    n = 17
    g = _sym(rng, n)
    m = rng.normal(size=(n, n))
    lags = [0, 1, 4, 16]
    np.testing.assert_allclose(
        mod.superdiag_sums(g, lags), [np.trace(dense_lag(n, t) @ g) for t in lags], atol=1e-12
    )
    d = mod.shifted_column_products(m, lags)
    for a, t in enumerate(lags):
        np.testing.assert_allclose(d[a], np.diag(m.T @ dense_lag(n, t) @ m), atol=1e-12)
    s, s2 = mod.shifted_pair_traces(g, lags)
    for a, t1 in enumerate(lags):
        for b, t2 in enumerate(lags):
            p1, p2 = dense_lag(n, t1), dense_lag(n, t2)
            assert s[a, b] == pytest.approx(np.trace(p1 @ g @ p2 @ g), abs=1e-10)
            assert s2[a, b] == pytest.approx(np.trace(p1 @ g @ p2.T @ g), abs=1e-10)
    e = rng.normal(size=n)
    np.testing.assert_allclose(mod.autocovariances(e, 5), [gamma_loop(e, t) for t in range(6)], atol=1e-12)
    assert mod.quartic_sum(m) == pytest.approx(np.sum(m**4), rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 60), seed=st.integers(0, 2**32 - 1), data=st.data())
def test_backends_agree(n, seed, data):
    lags = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=5))
    rng = np.random.default_rng(seed)
    g = _sym(rng, n)
    np.testing.assert_allclose(compiled.superdiag_sums(g, lags), _kernels_py.superdiag_sums(g, lags),
                               rtol=1e-12, atol=1e-10)
    np.testing.assert_allclose(compiled.shifted_column_products(g, lags),
                               _kernels_py.shifted_column_products(g, lags), rtol=1e-12, atol=1e-10)
    for a, b in zip(compiled.shifted_pair_traces(g, lags), _kernels_py.shifted_pair_traces(g, lags)):
        np.testing.assert_allclose(a, b, rtol=1e-11, atol=1e-9)
    q = data.draw(st.integers(0, n - 1))
    e = rng.normal(size=n)
    np.testing.assert_allclose(compiled.autocovariances(e, q), _kernels_py.autocovariances(e, q),
                               rtol=1e-12, atol=1e-10)


def test_dispatch_accepts_noncontiguous():
    g = np.asfortranarray(_sym(np.random.default_rng(0), 9))
    np.testing.assert_allclose(kernels.superdiag_sums(g, [0, 2]), _kernels_py.superdiag_sums(g, [0, 2]))


def test_env_forces_fallback():
    env = dict(os.environ, SERIALCORR_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import serialcorr; print(serialcorr.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert kernels.BACKEND == "cython"
