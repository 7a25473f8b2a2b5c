"""Empirical F-norms, their consistency, and the d=1 central limit theorem.

The empirical F-norm ``(1/n) sum_i max(|x0|, |x1| X1(i), ..., |xd| Xd(i))``
converges uniformly on compacts; for d=1 its fluctuations are a Gaussian
process ``S`` with a Brownian-bridge representation

    S(x, y) = y int_{x/y}^inf W(F(u)) du.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from .distributions import Distribution, Empirical, Frechet, IndependentProduct, Pareto, SampleMatrix, as_generator
from .errors import BridgeRepresentationUnavailable, DomainError, TailNotIntegrable
from .norms import EmpiricalFNorm, FNorm, as_point, make_handle
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate, integrate_tail

__all__ = [
    "empirical_eval",
    "SupDeviation",
    "sup_deviation",
    "clt_covariance",
    "clt_covariance_product",
    "clt_variance_experiment",
    "LimitProcessPath",
    "simulate_limit_path",
    "pickands",
    "empirical_pickands",
]


def _as_sample(sample) -> SampleMatrix:
    if isinstance(sample, SampleMatrix):
        return sample
    if isinstance(sample, Empirical):
        return sample.sample
    return SampleMatrix(sample)


def empirical_eval(sample, x) -> float:
    """Exact sample mean of the row-wise maxima."""
    return EmpiricalFNorm(_as_sample(sample)).eval(x)


# ----------------------------------------------------------------------------
# Uniform consistency
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class SupDeviation:
    grid_max: float
    off_grid_bound: float
    grid_count: int

    def to_dict(self):
        return {"grid_max": self.grid_max, "off_grid_bound": self.off_grid_bound, "grid_count": self.grid_count}


def sup_deviation(sample, spec_or_handle, x_max, grid_count: int = 21) -> SupDeviation:
    """Max of ``|empirical - true|`` over a regular grid in the box ``[0, x_max]``.

    A scalar ``x_max`` is used for every coordinate.

    Both norms are monotone on the positive orthant, so on every grid cell
    ``[lo, hi]`` the deviation is at most ``max(emp(hi) - true(lo), true(hi) - emp(lo))``;
    the largest such value is reported as a bound for the whole box.
    """
    sample = _as_sample(sample)
    handle = spec_or_handle if isinstance(spec_or_handle, FNorm) else make_handle(spec_or_handle)
    corner = np.abs(np.atleast_1d(np.asarray(x_max, dtype=float)))
    if corner.size == 1:
        corner = np.full(sample.d + 1, corner[0])
    k = corner.size
    if k != sample.d + 1 or handle.dim != sample.d:
        raise DomainError("box corner, sample and norm dimensions disagree")
    if grid_count < 1:
        raise DomainError("grid_count must be positive")
    axes = [np.linspace(0.0, c, grid_count) if grid_count > 1 else np.array([c]) for c in corner]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, k)
    emp = EmpiricalFNorm(sample).eval_many(mesh).reshape((grid_count,) * k)
    true = handle.eval_many(mesh).reshape((grid_count,) * k)
    grid_max = float(np.abs(emp - true).max())
    if grid_count == 1:
        return SupDeviation(grid_max, grid_max, 1)
    lo = tuple(slice(0, -1) for _ in range(k))
    hi = tuple(slice(1, None) for _ in range(k))
    bound = float(max((emp[hi] - true[lo]).max(), (true[hi] - emp[lo]).max(), grid_max))
    return SupDeviation(grid_max, bound, grid_count)


# ----------------------------------------------------------------------------
# CLT covariance
# ----------------------------------------------------------------------------


def _finite_variance(spec: Distribution) -> bool:
    if isinstance(spec, Pareto):
        return spec.gamma < 0.5
    if isinstance(spec, Frechet):
        return spec.p > 2
    if isinstance(spec, IndependentProduct):
        return all(_finite_variance(c) for c in spec.components)
    return True


def _check_pair(p):
    p = np.asarray(p, dtype=float)
    if p.shape != (2,) or not np.all(np.isfinite(p)):
        raise DomainError("points must be pairs (x, y)")
    if p[0] <= 0 or p[1] < 0:
        raise DomainError("points need x > 0 and y >= 0")
    return float(p[0]), float(p[1])


def clt_covariance(spec: Distribution, p1, p2, config: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``Cov(S(x1, y1), S(x2, y2)) = Cov(max(x1, y1 X), max(x2, y2 X))`` for univariate X.

    By Hoeffding's identity the covariance is a double integral of
    ``F(min(a, b)) (1 - F(max(a, b)))`` over ``a >= x1/y1, b >= x2/y2``.  The
    inner integral of F is ``(u - c) - tau(c) + tau(u)`` with
    ``tau(u) = E(X - u)^+``, which leaves a single integral.
    """
    if spec.dim != 1:
        raise DomainError("clt_covariance needs a univariate spec; see clt_covariance_product")
    if not _finite_variance(spec):
        raise DomainError("the limit process needs a finite variance")
    x1, y1 = _check_pair(p1)
    x2, y2 = _check_pair(p2)
    if y1 == 0 or y2 == 0:
        return 0.0
    alpha, beta = x1 / y1, x2 / y2
    lo = max(alpha, beta)

    def sf(u):
        return spec._sf(u[:, None])

    def cum_cdf(c, u):
        """int_c^u F(a) da, vectorized in u."""
        ta = spec.tail_expectation(0, c)
        if ta is not None:
            tu = np.array([spec.tail_expectation(0, float(v)) for v in u])
            return (u - c) - ta + tu
        out = np.empty(u.size)
        for i, v in enumerate(u):
            out[i] = integrate(lambda s: 1.0 - sf(s), c, float(v), config, spec.breakpoints()).value
        return out

    def integrand(u):
        s = sf(u)
        return s * (cum_cdf(alpha, u) + cum_cdf(beta, u))

    bps = np.concatenate([[alpha, beta], spec.breakpoints()])
    upper = spec.support_upper()
    if math.isfinite(upper):
        res = integrate(integrand, lo, max(upper, lo), config, bps) if upper > lo else None
        value = 0.0 if res is None else res.value
    else:
        value = integrate_tail(integrand, lo, config, bps, start=max(lo, 1.0)).value
    return y1 * y2 * value


def clt_covariance_product(
    spec: IndependentProduct, p1, p2, config: QuadratureConfig = QuadratureConfig(abs_tol=1e-8)
) -> float:
    """Experimental d>1 covariance ``Cov(max(x, y.X), max(x', y'.X))`` for independent margins.

    Points are ``(x, y1..yd)``.  Uses the two-dimensional Hoeffding identity
    with the integrand ``S_A + S_B - S_joint - S_A S_B`` written through
    survival functions, integrated by nested adaptive quadrature.
    """
    if not isinstance(spec, IndependentProduct):
        raise DomainError("experimental covariance is only defined for independent products")
    if not _finite_variance(spec):
        raise DomainError("the limit process needs finite variances")
    a = np.asarray(p1, dtype=float)
    b = np.asarray(p2, dtype=float)
    d = spec.dim
    if a.shape != (d + 1,) or b.shape != (d + 1,) or a[0] <= 0 or b[0] <= 0 or np.any(a[1:] < 0) or np.any(b[1:] < 0):
        raise DomainError(f"points must be (x > 0, y >= 0) of length {d + 1}")
    if not a[1:].any() or not b[1:].any():
        return 0.0
    comps = spec.components

    def cdf_max(levels, w):
        # P(max_i w_i X_i <= level) for a batch of levels
        out = np.ones(levels.size)
        for c, wi in zip(comps, w):
            if wi > 0:
                out = out * c._cdf1(levels / wi)
        return out

    def joint_cdf(s, t):
        out = np.ones(t.size)
        for c, wa, wb in zip(comps, a[1:], b[1:]):
            lim = np.full(t.size, np.inf)
            if wa > 0:
                lim = np.minimum(lim, s / wa)
            if wb > 0:
                lim = np.minimum(lim, t / wb)
            fin = np.isfinite(lim)
            out = out * np.where(fin, c._cdf1(np.where(fin, lim, 0.0)), 1.0)
        return out

    def bps(w):
        pts = []
        for c, wi in zip(comps, w):
            if wi > 0:
                pts.extend((wi * c.breakpoints()).tolist())
        return pts

    def upper(w):
        return max(wi * c.support_upper() for c, wi in zip(comps, w) if wi > 0)

    def inner(s):
        sa = 1.0 - cdf_max(np.array([s]), a[1:])[0]

        def f(t):
            sb = 1.0 - cdf_max(t, b[1:])
            sj = 1.0 - joint_cdf(np.full(t.size, s), t)
            return sa + sb - sj - sa * sb

        ub = upper(b[1:])
        points = bps(b[1:]) + [s * wb / max(wa, 1e-300) for wa, wb in zip(a[1:], b[1:]) if wa > 0 and wb > 0]
        if math.isfinite(ub):
            return integrate(f, b[0], max(ub, b[0]), config, points).value
        return integrate_tail(f, b[0], config, points, start=max(b[0], 1.0)).value

    def outer(s):
        return np.array([inner(float(v)) for v in s])

    ua = upper(a[1:])
    if math.isfinite(ua):
        return integrate(outer, a[0], max(ua, a[0]), config, bps(a[1:])).value
    return integrate_tail(outer, a[0], config, bps(a[1:]), start=max(a[0], 1.0)).value


def clt_variance_experiment(spec: Distribution, x, n: int, reps: int, rng) -> dict:
    """Empirical variance of ``sqrt(n) (emp_n(x) - ||x||_F)`` over seeded replications."""
    rng = as_generator(rng)
    a = as_point(x, spec.dim)
    true = make_handle(spec).eval(a)
    stats = np.empty(reps)
    chunk = max(1, 2_000_000 // max(n * spec.dim, 1))
    for start in range(0, reps, chunk):
        r = min(chunk, reps - start)
        X = spec.sample_array(n * r, rng).reshape(r, n, spec.dim)
        m = np.maximum(a[0], (X * a[1:]).max(axis=2)).mean(axis=1)
        stats[start : start + r] = math.sqrt(n) * (m - true)
    return {"true_value": true, "mean": float(stats.mean()), "variance": float(stats.var(ddof=1)), "reps": reps, "n": n}


# ----------------------------------------------------------------------------
# Brownian-bridge representation
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitProcessPath:
    """Simulated values of ``S`` at grid points ``(x, y)``; one row per path."""

    grid: np.ndarray
    values: np.ndarray
    truncation: float
    bridge_steps: int

    def mean(self):
        return self.values.mean(axis=0)

    def covariance(self) -> np.ndarray:
        return np.cov(self.values, rowvar=False, ddof=1)

    def table(self):
        """One row per grid point: x, y, sample mean, sample variance."""
        cov = np.atleast_2d(self.covariance())
        return [
            (float(x), float(y), float(m), float(v))
            for (x, y), m, v in zip(self.grid, self.mean(), np.diag(cov))
        ]


def _bridge_truncation(spec: Distribution, lo: float, config: QuadratureConfig, tol: float) -> float:
    upper = spec.support_upper()
    if math.isfinite(upper):
        return max(upper, lo)
    if isinstance(spec, Pareto) and spec.gamma >= 0.5:
        raise BridgeRepresentationUnavailable("int sqrt(F(1-F)) diverges for Pareto with gamma >= 1/2")
    if isinstance(spec, Frechet) and spec.p <= 2:
        raise BridgeRepresentationUnavailable("int sqrt(F(1-F)) diverges for Frechet with p <= 2")

    def w(u):
        F = spec._cdf(u[:, None])
        return np.sqrt(np.clip(F * (1.0 - F), 0.0, None))

    try:
        integrate_tail(w, 0.0, QuadratureConfig(abs_tol=1e-6, tail_tol=tol), spec.breakpoints(), start=1.0)
    except TailNotIntegrable as exc:
        raise BridgeRepresentationUnavailable(str(exc)) from exc
    T = max(lo, 1.0)
    growth = config.truncation_growth
    # stop once the remaining sqrt(F(1-F)) mass is negligible
    while True:
        seg = integrate(w, T, T * growth, QuadratureConfig(abs_tol=tol / 10)).value
        if seg < tol:
            return T
        T *= growth


def simulate_limit_path(
    spec: Distribution,
    grid,
    rng,
    n_paths: int = 1,
    bridge_steps: int = 2**14,
    u_count: int = 4096,
    config: QuadratureConfig = DEFAULT_CONFIG,
    tail_tol: float = 1e-6,
    batch: int = 256,
) -> LimitProcessPath:
    """Simulate ``S(x, y) = y int_{x/y}^T W(F(u)) du`` for each grid point.

    The bridge is a pinned Gaussian walk on ``k / bridge_steps``; the
    integral uses the trapezoid rule on ``u_count`` nodes.  Paths are
    generated in batches from one stream, so output depends only on the seed.
    """
    if spec.dim != 1:
        raise DomainError("the bridge representation is univariate")
    rng = as_generator(rng)
    G = np.atleast_2d(np.asarray(grid, dtype=float))
    if G.shape[1] != 2 or np.any(G < 0) or not np.all(np.isfinite(G)):
        raise DomainError("grid must be an array of nonnegative (x, y) pairs")
    active = G[:, 1] > 0
    lows = np.where(active, G[:, 0] / np.where(active, G[:, 1], 1.0), 0.0)
    lo = float(lows[active].min()) if active.any() else 0.0
    T = _bridge_truncation(spec, float(lows[active].max()) if active.any() else 1.0, config, tail_tol)

    if math.isfinite(spec.support_upper()):
        u = np.linspace(lo, T, u_count)
    else:
        u = lo + (np.geomspace(1.0, 1.0 + T - lo, u_count) - 1.0)
    u = np.unique(np.concatenate([u, lows[active & (lows < T)]]))
    F = spec._cdf(u[:, None])
    pos = F * bridge_steps
    bidx = np.minimum(np.floor(pos).astype(np.int64), bridge_steps - 1)
    bfrac = pos - bidx
    qpos = np.interp(np.minimum(lows, T), u, np.arange(u.size, dtype=float))
    qidx = np.minimum(np.floor(qpos).astype(np.int64), u.size - 2)
    qfrac = qpos - qidx
    qscale = np.where(active, G[:, 1], 0.0)

    out = np.empty((n_paths, G.shape[0]))
    for start in range(0, n_paths, batch):
        r = min(batch, n_paths - start)
        Z = rng.standard_normal((r, bridge_steps))
        out[start : start + r] = _accel.bridge_integrals(Z, u, bidx, bfrac, qidx, qfrac, qscale)
    return LimitProcessPath(G, out, T, bridge_steps)


# ----------------------------------------------------------------------------
# Pickands dependence function
# ----------------------------------------------------------------------------


def _simplex_point(t, d):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.size != d:
        raise DomainError(f"simplex point needs {d} coordinates")
    if np.any(t < 0) or t.sum() > 1.0 + 1e-12:
        raise DomainError("t must satisfy t_i >= 0 and sum(t) <= 1")
    return np.concatenate([[max(1.0 - t.sum(), 0.0)], t])


def pickands(handle: FNorm, t) -> float:
    """``A(t) = ||(1 - sum t, t1, ..., td)||``; determines the norm by homogeneity."""
    return handle.eval(_simplex_point(t, handle.dim))


def empirical_pickands(sample, t) -> float:
    sample = _as_sample(sample)
    return empirical_eval(sample, _simplex_point(t, sample.d))
