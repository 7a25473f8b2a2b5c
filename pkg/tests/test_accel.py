"""Numba kernels against their numpy twins, and backend selection."""

import os
import subprocess
import sys

import numpy as np
import pytest

from fnorm import _accel

needs_numba = pytest.mark.skipif(not _accel.NUMBA_AVAILABLE, reason="numba not installed")


@needs_numba
def test_mean_max_twins_agree():
    rng = np.random.default_rng(0)
    X = rng.exponential(size=(5000, 3))
    P = rng.uniform(0, 2, size=(17, 4))
    m1, v1 = _accel.mean_max_numba(X, P)
    m2, v2 = _accel.mean_max_numpy(X, P)
    assert np.allclose(m1, m2, rtol=1e-13, atol=0)
    assert np.allclose(v1, v2, rtol=1e-10, atol=1e-15)


def test_mean_max_constant_rows_are_exact():
    X = np.full((100_000, 1), 0.5)
    m, v = _accel.mean_max(X, np.array([[0.7, 1.0]]))
    assert m[0] == 0.7 and v[0] == 0.0


@needs_numba
@pytest.mark.parametrize("metric", [0, 1, 2])
def test_hausdorff_twins_agree(metric):
    rng = np.random.default_rng(metric)
    A, B = rng.uniform(size=(300, 3)), rng.uniform(size=(200, 3))
    assert _accel.directed_hausdorff_numba(A, B, metric) == pytest.approx(_accel.directed_hausdorff_numpy(A, B, metric), abs=1e-15)


@needs_numba
def test_bridge_twins_agree():
    rng = np.random.default_rng(1)
    m = 512
    Z = rng.standard_normal((8, m))
    u = np.linspace(0, 1, 101)
    pos = u * m
    bidx = np.minimum(np.floor(pos).astype(np.int64), m - 1)
    bfrac = pos - bidx
    qidx = np.array([10, 50, 0], dtype=np.int64)
    qfrac = np.array([0.25, 0.0, 0.0])
    qscale = np.array([1.0, 2.0, 0.0])
    a = _accel.bridge_integrals_numba(Z, u, bidx, bfrac, qidx, qfrac, qscale)
    b = _accel.bridge_integrals_numpy(Z, u, bidx, bfrac, qidx, qfrac, qscale)
    assert np.allclose(a, b, atol=1e-12)
    assert np.all(a[:, 2] == 0.0)


def _backend_in_subprocess(value):
    env = dict(os.environ, FNORM_BACKEND=value)
    out = subprocess.run(
        [sys.executable, "-c", "from fnorm import _accel; print(_accel.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
    )
    return out


def test_backend_env_var():
    assert _backend_in_subprocess("numpy").stdout.strip() == "numpy"
    if _accel.NUMBA_AVAILABLE:
        assert _backend_in_subprocess("numba").stdout.strip() == "numba"
    assert _backend_in_subprocess("cuda").returncode != 0
