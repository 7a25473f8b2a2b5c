"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is picked once at import time from the ``FNORM_BACKEND``
environment variable (``numba`` or ``numpy``).  When unset, numba is used if
it can be imported.  Both paths compute the same quantities; only summation
order (and therefore the last few ulps) may differ.

Every public kernel has a ``*_numba`` and ``*_numpy`` twin so the benchmark
and the test-suite can exercise both regardless of the selected backend.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.spatial.distance import cdist

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return decorator


_requested = os.environ.get("FNORM_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ValueError(f"FNORM_BACKEND must be 'numba' or 'numpy', got {_requested!r}")
BACKEND = "numpy" if (_requested == "numpy" or not NUMBA_AVAILABLE) else "numba"

METRIC_CODES = {"sup": 0, "l1": 1, "l2": 2}
_SCIPY_METRIC = {0: "chebyshev", 1: "cityblock", 2: "euclidean"}


# ----------------------------------------------------------------------------
# Sample mean of row-wise maxima: (1/n) sum_i max(p0, p1*X_i1, ..., pd*X_id)
# ----------------------------------------------------------------------------


@njit(cache=True)
def mean_max_numba(X, P):
    n, d = X.shape
    k = P.shape[0]
    mean = np.empty(k)
    var = np.empty(k)
    for j in range(k):
        x0 = P[j, 0]
        # Kahan sum of the excess over x0: exact when no draw beats it
        s = 0.0
        comp = 0.0
        for i in range(n):
            m = x0
            for l in range(d):
                v = P[j, l + 1] * X[i, l]
                if v > m:
                    m = v
            y = (m - x0) - comp
            t = s + y
            comp = (t - s) - y
            s = t
        mu = x0 + s / n
        s2 = 0.0
        for i in range(n):
            m = x0
            for l in range(d):
                v = P[j, l + 1] * X[i, l]
                if v > m:
                    m = v
            s2 += (m - mu) * (m - mu)
        mean[j] = mu
        var[j] = s2 / n
    return mean, var


def mean_max_numpy(X, P, chunk=1 << 22):
    n = X.shape[0]
    k = P.shape[0]
    mean = np.empty(k)
    var = np.empty(k)
    rows = max(1, chunk // max(n, 1))
    for start in range(0, k, rows):
        block = P[start : start + rows]
        # (rows, n) matrix of maxima
        m = np.maximum((X[None, :, :] * block[:, None, 1:]).max(axis=2), block[:, 0:1])
        mu = block[:, 0] + (m - block[:, 0:1]).mean(axis=1)
        mean[start : start + rows] = mu
        var[start : start + rows] = ((m - mu[:, None]) ** 2).mean(axis=1)
    return mean, var


def mean_max(X, P):
    """Mean and (population) variance of ``max(p0, p1*X1, ..., pd*Xd)`` over the rows of X.

    ``X`` is an ``(n, d)`` sample, ``P`` a ``(k, d+1)`` array of nonnegative
    evaluation points.  Returns two arrays of length ``k``.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    P = np.ascontiguousarray(np.atleast_2d(P), dtype=np.float64)
    if BACKEND == "numba":
        return mean_max_numba(X, P)
    return mean_max_numpy(X, P)


# ----------------------------------------------------------------------------
# Directed Hausdorff distance max_a min_b ||a - b||
# ----------------------------------------------------------------------------


@njit(cache=True)
def directed_hausdorff_numba(A, B, metric):
    na, dim = A.shape
    nb = B.shape[0]
    cmax = 0.0
    for i in range(na):
        cmin = np.inf
        for j in range(nb):
            dist = 0.0
            for l in range(dim):
                diff = abs(A[i, l] - B[j, l])
                if metric == 0:
                    if diff > dist:
                        dist = diff
                elif metric == 1:
                    dist += diff
                else:
                    dist += diff * diff
            if metric == 2:
                dist = np.sqrt(dist)
            if dist < cmin:
                cmin = dist
            if cmin <= cmax:
                # this row cannot raise the running max
                break
        if cmin > cmax:
            cmax = cmin
    return cmax


def directed_hausdorff_numpy(A, B, metric, chunk=2048):
    name = _SCIPY_METRIC[metric]
    best = 0.0
    for start in range(0, A.shape[0], chunk):
        dmat = cdist(A[start : start + chunk], B, metric=name)
        best = max(best, float(dmat.min(axis=1).max()))
    return best


def directed_hausdorff(A, B, metric):
    """``sup_{a in A} inf_{b in B} ||a - b||`` for metric code 0 (sup), 1 (L1), 2 (L2)."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.ascontiguousarray(B, dtype=np.float64)
    if BACKEND == "numba":
        return float(directed_hausdorff_numba(A, B, metric))
    return directed_hausdorff_numpy(A, B, metric)


# ----------------------------------------------------------------------------
# Brownian-bridge functionals y * int_{x/y}^T W(F(u)) du
# ----------------------------------------------------------------------------


@njit(cache=True)
def bridge_integrals_numba(Z, u, bidx, bfrac, qidx, qfrac, qscale):
    npaths, m = Z.shape
    nu = u.shape[0]
    nq = qidx.shape[0]
    out = np.zeros((npaths, nq))
    walk = np.empty(m + 1)
    wu = np.empty(nu)
    cum = np.empty(nu)
    step = 1.0 / np.sqrt(m)
    for p in range(npaths):
        walk[0] = 0.0
        for k in range(m):
            walk[k + 1] = walk[k] + Z[p, k] * step
        end = walk[m]
        for k in range(m + 1):
            walk[k] -= (k / m) * end
        for j in range(nu):
            k = bidx[j]
            f = bfrac[j]
            wu[j] = walk[k] * (1.0 - f) + walk[k + 1] * f
        cum[0] = 0.0
        for j in range(1, nu):
            cum[j] = cum[j - 1] + 0.5 * (u[j] - u[j - 1]) * (wu[j] + wu[j - 1])
        total = cum[nu - 1]
        for q in range(nq):
            if qscale[q] == 0.0:
                continue
            j = qidx[q]
            f = qfrac[q]
            lower = cum[j] * (1.0 - f) + cum[j + 1] * f
            out[p, q] = qscale[q] * (total - lower)
    return out


def bridge_integrals_numpy(Z, u, bidx, bfrac, qidx, qfrac, qscale):
    npaths, m = Z.shape
    walk = np.zeros((npaths, m + 1))
    np.cumsum(Z / np.sqrt(m), axis=1, out=walk[:, 1:])
    walk -= (np.arange(m + 1) / m)[None, :] * walk[:, -1:]
    wu = walk[:, bidx] * (1.0 - bfrac) + walk[:, bidx + 1] * bfrac
    cum = np.zeros_like(wu)
    np.cumsum(0.5 * np.diff(u) * (wu[:, 1:] + wu[:, :-1]), axis=1, out=cum[:, 1:])
    lower = cum[:, qidx] * (1.0 - qfrac) + cum[:, qidx + 1] * qfrac
    out = qscale[None, :] * (cum[:, -1:] - lower)
    out[:, qscale == 0.0] = 0.0
    return out


def bridge_integrals(Z, u, bidx, bfrac, qidx, qfrac, qscale):
    """Integrate Brownian-bridge paths composed with a df over query intervals.

    ``Z`` holds ``(paths, m)`` standard normal increments.  ``bidx``/``bfrac``
    locate ``F(u_j)`` on the ``k/m`` bridge lattice, ``qidx``/``qfrac`` locate
    each query's lower limit on the ``u`` grid, and ``qscale`` is the factor
    ``y`` (zero rows yield zero).
    """
    args = (
        np.ascontiguousarray(Z, dtype=np.float64),
        np.ascontiguousarray(u, dtype=np.float64),
        np.ascontiguousarray(bidx, dtype=np.int64),
        np.ascontiguousarray(bfrac, dtype=np.float64),
        np.ascontiguousarray(qidx, dtype=np.int64),
        np.ascontiguousarray(qfrac, dtype=np.float64),
        np.ascontiguousarray(qscale, dtype=np.float64),
    )
    if BACKEND == "numba":
        return bridge_integrals_numba(*args)
    return bridge_integrals_numpy(*args)
