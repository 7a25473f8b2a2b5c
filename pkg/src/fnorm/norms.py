"""F-norm evaluators.

``||x||_F = E max(|x0|, |x1| X1, ..., |xd| Xd)`` for a nonnegative random
vector ``X`` with df ``F``.  Handles evaluate it in closed form, by adaptive
quadrature of

    ||x||_F = |x0| + int_{|x0|}^inf [1 - F(t/|x1|, ..., t/|xd|)] dt,

by seeded Monte Carlo, or exactly for an empirical df.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import gammainc, ndtr

from . import _accel
from .distributions import (
    Bernoulli,
    Copula,
    Degenerate,
    Distribution,
    Empirical,
    Exponential,
    Frechet,
    IndependentProduct,
    LogNormal,
    MultiNormalExp,
    Pareto,
    SampleMatrix,
    Uniform01,
    as_generator,
)
from .errors import CdfUnavailable, DomainError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate, integrate_tail

__all__ = [
    "EvalResult",
    "FNorm",
    "ClosedFormFNorm",
    "QuadratureFNorm",
    "MonteCarloFNorm",
    "EmpiricalFNorm",
    "make_handle",
    "supnorm",
    "has_closed_form",
    "closed_form_values",
    "lognormal_fnorm",
    "eval",
    "max_cf",
    "bounds",
    "is_weighted_supnorm",
    "frechet_reduction_check",
]


@dataclass(frozen=True)
class EvalResult:
    value: float
    method: str
    error_bound: float = 0.0

    def to_dict(self):
        return {"value": self.value, "method": self.method, "error_bound": self.error_bound}


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Absolute values of an evaluation point, validated."""
    arr = np.abs(np.atleast_1d(np.asarray(x, dtype=np.float64)))
    if arr.ndim != 1:
        raise DomainError("evaluation point must be a vector")
    if not np.all(np.isfinite(arr)):
        raise DomainError("evaluation point must be finite")
    if dim is not None and arr.size != dim + 1:
        raise DomainError(f"expected a point of length {dim + 1}, got {arr.size}")
    return arr


def as_points(X, dim: int) -> np.ndarray:
    arr = np.abs(np.atleast_2d(np.asarray(X, dtype=np.float64)))
    if arr.shape[1] != dim + 1:
        raise DomainError(f"expected points of length {dim + 1}, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("evaluation points must be finite")
    return arr


# ----------------------------------------------------------------------------
# Closed forms (vectorized over rows of nonnegative points)
# ----------------------------------------------------------------------------


def _safe_div(num, den):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)


def lognormal_fnorm(a, b, mu: float, sigma: float):
    """``E max(a, b Y)`` for ``Y = exp(N(mu, sigma^2))``; explicit branches at zeros."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    mean = math.exp(mu + 0.5 * sigma * sigma)
    both = (a > 0) & (b > 0)
    sa = np.where(both, a, 1.0)
    sb = np.where(both, b, 1.0)
    if sigma == 0.0:
        inner = np.maximum(sa, sb * math.exp(mu))
    else:
        lr = np.log(sa) - np.log(sb)
        inner = sa * ndtr((lr - mu) / sigma) + sb * mean * ndtr(sigma + (mu - lr) / sigma)
    return np.where(both, inner, np.where(b > 0, b * mean, a))


def _independence_copula(A):
    x0 = A[:, 0]
    Y = np.sort(A[:, 1:], axis=1)
    out = x0.copy()
    for r in range(A.shape[0]):
        y = Y[r][Y[r] > 0]
        if y.size == 0 or x0[r] >= y[-1]:
            continue
        acc = x0[r]
        lo_prev = 0.0
        for j in range(y.size):
            # on [y_{j-1}, y_j] the integrand is 1 - t^m / prod(y_j..y_k);
            # t^m / prod is a product of ratios <= 1, so nothing overflows
            m = y.size - j
            lo = max(x0[r], lo_prev)
            hi = y[j]
            if hi > lo:
                acc += (hi - lo) - (hi * np.prod(hi / y[j:]) - lo * np.prod(lo / y[j:])) / (m + 1)
            lo_prev = hi
        out[r] = acc
    return out


def closed_form_values(spec: Distribution, A: np.ndarray):
    """Closed-form F-norm at the rows of ``A`` (nonnegative), or None."""
    x0 = A[:, 0]
    if isinstance(spec, IndependentProduct) and spec.dim == 1:
        return closed_form_values(spec.components[0], A)
    if isinstance(spec, MultiNormalExp) and spec.dim == 1:
        return closed_form_values(spec.component(0), A)
    if isinstance(spec, Degenerate):
        return np.maximum(x0, (A[:, 1:] * np.array(spec.c)[None, :]).max(axis=1))
    if isinstance(spec, Copula):
        if spec.variant == "comonotone":
            return _uniform(x0, A[:, 1:].max(axis=1))
        return _independence_copula(A)
    if spec.dim != 1:
        return None
    x1 = A[:, 1]
    if isinstance(spec, Bernoulli):
        return (1.0 - spec.p) * x0 + spec.p * np.maximum(x0, x1)
    if isinstance(spec, Uniform01):
        return _uniform(x0, x1)
    if isinstance(spec, Exponential):
        with np.errstate(over="ignore"):
            return x0 + _safe_div(x1, spec.lam) * np.exp(-spec.lam * _safe_div(x0, x1)) * (x1 > 0)
    if isinstance(spec, Pareto):
        g = spec.gamma
        low = (x1 > 0) & (x1 <= x0)
        with np.errstate(over="ignore"):
            ratio = np.where(low, x0 / np.where(low, x1, 1.0), 1.0)
            first = x0 * (1.0 + g / (1.0 - g) * ratio ** (-1.0 / g))
        return np.where(x1 == 0, x0, np.where(low, first, x1 / (1.0 - g)))
    if isinstance(spec, Frechet):
        p = spec.p
        pos = x1 > 0
        with np.errstate(divide="ignore", over="ignore"):
            a = np.where(pos, x0 / np.where(pos, x1, 1.0), 0.0)
            s = np.where(a > 0, a, 1.0) ** (-p)
            # x1 * a = x0, written out so tiny x1 cannot produce 0 * inf
            tail = np.where(a > 0, gammainc(1.0 - 1.0 / p, s), 1.0)
            val = np.where(a > 0, x0 * np.exp(-s), 0.0) + x1 * gamma_fn(1.0 - 1.0 / p) * tail
        return np.where(pos, val, x0)
    if isinstance(spec, LogNormal):
        return lognormal_fnorm(x0, x1, spec.mu, spec.sigma)
    return None


def _uniform(x0, x1):
    return np.where(x1 <= x0, x0, _safe_div(x0 * x0 + x1 * x1, 2.0 * x1))


def has_closed_form(spec: Distribution) -> bool:
    if isinstance(spec, Empirical):
        return False
    probe = np.array([[1.0] + [1.0] * spec.dim])
    return closed_form_values(spec, probe) is not None


# ----------------------------------------------------------------------------
# Handles
# ----------------------------------------------------------------------------


class FNorm:
    """An evaluable F-norm on ``R^(d+1)``; subclasses are immutable."""

    method = "abstract"
    dim: int

    def evaluate(self, x) -> EvalResult:
        raise NotImplementedError

    def eval(self, x) -> float:
        return self.evaluate(x).value

    __call__ = eval

    def eval_many(self, X) -> np.ndarray:
        X = as_points(X, self.dim)
        return np.array([self.evaluate(row).value for row in X])

    def draw(self, n: int, rng) -> np.ndarray:
        """Draws of the generating vector, used by Monte Carlo products."""
        raise NotImplementedError

    def mean(self, i: int = 0) -> float:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"method": self.method, "dim": self.dim}


class _SpecHandle(FNorm):
    spec: Distribution

    @property
    def dim(self):
        return self.spec.dim

    def draw(self, n, rng):
        return self.spec.sample_array(n, as_generator(rng))

    def mean(self, i=0):
        return self.spec.mean(i)

    def describe(self):
        return {"method": self.method, "dim": self.dim, "spec": self.spec.to_dict()}


@dataclass(frozen=True, eq=False)
class ClosedFormFNorm(_SpecHandle):
    spec: Distribution
    method = "closed"

    def __post_init__(self):
        if not has_closed_form(self.spec):
            raise DomainError(f"no closed form for {type(self.spec).__name__} in d={self.spec.dim}")

    def eval_many(self, X):
        return closed_form_values(self.spec, as_points(X, self.dim))

    def evaluate(self, x):
        A = as_point(x, self.dim)[None, :]
        return EvalResult(float(closed_form_values(self.spec, A)[0]), self.method, 0.0)


@dataclass(frozen=True, eq=False)
class QuadratureFNorm(_SpecHandle):
    """Fundamental-formula quadrature; the point is rescaled to unit sup-norm first."""

    spec: Distribution
    config: QuadratureConfig = DEFAULT_CONFIG
    method = "quad"

    def evaluate(self, x):
        a = as_point(x, self.dim)
        scale = float(a.max())
        if scale == 0.0:
            return EvalResult(0.0, self.method, 0.0)
        a = a / scale
        x0 = float(a[0])
        nz = np.flatnonzero(a[1:] > 0)
        if nz.size == 0:
            return EvalResult(x0 * scale, self.method, 0.0)
        sub = self.spec if nz.size == self.dim else self.spec.marginal(tuple(nz.tolist()))
        w = a[1:][nz]

        def survival(t):
            return sub._sf(t[:, None] / w[None, :])

        bps = [x0]
        upper = 0.0
        for j, wj in enumerate(w):
            bps.extend((wj * sub.breakpoints(j)).tolist())
            upper = max(upper, wj * sub.support_upper(j))
        if math.isfinite(upper):
            if upper <= x0:
                return EvalResult(x0 * scale, self.method, 0.0)
            res = integrate(survival, x0, upper, self.config, bps)
        else:
            tails = [sub.tail_expectation(j, 1.0) for j in range(len(w))]
            remainder = None
            if all(t is not None for t in tails):

                def remainder(T):
                    return float(sum(wj * sub.tail_expectation(j, T / wj) for j, wj in enumerate(w)))

            res = integrate_tail(survival, x0, self.config, bps, remainder, start=max(1.0, x0))
        return EvalResult(scale * (x0 + res.value), self.method, scale * res.error_bound)


@dataclass(frozen=True, eq=False)
class MonteCarloFNorm(_SpecHandle):
    """Sample mean of ``max(|x0|, |xi| Xi)`` over ``n`` seeded draws (drawn once)."""

    spec: Distribution
    n: int = 10**6
    seed: int = 0
    method = "mc"

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("Monte Carlo needs n >= 2")

    @cached_property
    def sample(self) -> np.ndarray:
        return np.ascontiguousarray(self.spec.sample_array(self.n, np.random.default_rng(self.seed)))

    def eval_with_stderr(self, X):
        X = as_points(X, self.dim)
        mean, var = _accel.mean_max(self.sample, X)
        return mean, np.sqrt(var / self.n)

    def eval_many(self, X):
        return self.eval_with_stderr(X)[0]

    def evaluate(self, x):
        mean, se = self.eval_with_stderr(as_point(x, self.dim)[None, :])
        return EvalResult(float(mean[0]), self.method, float(se[0]))

    def describe(self):
        out = super().describe()
        out.update(n=self.n, seed=self.seed)
        return out


@dataclass(frozen=True, eq=False)
class EmpiricalFNorm(FNorm):
    """F-norm of the empirical df: an exact sample mean of row-wise maxima."""

    sample: SampleMatrix
    method = "empirical"

    def __post_init__(self):
        if not isinstance(self.sample, SampleMatrix):
            object.__setattr__(self, "sample", SampleMatrix(self.sample))

    @property
    def dim(self):
        return self.sample.d

    def eval_many(self, X):
        return _accel.mean_max(self.sample.data, as_points(X, self.dim))[0]

    def evaluate(self, x):
        return EvalResult(float(self.eval_many(as_point(x, self.dim)[None, :])[0]), self.method, 0.0)

    def draw(self, n, rng):
        return Empirical(self.sample).sample_array(n, as_generator(rng))

    def mean(self, i=0):
        return float(self.sample.data[:, i].mean())

    def describe(self):
        return {"method": self.method, "dim": self.dim, "n": self.sample.n}


def supnorm(d: int = 1) -> ClosedFormFNorm:
    """The sup-norm on ``R^(d+1)``, generated by the constant vector of ones."""
    return ClosedFormFNorm(Degenerate((1.0,) * d))


def make_handle(
    spec: Distribution,
    method: str = "auto",
    config: QuadratureConfig = DEFAULT_CONFIG,
    n: int = 10**6,
    seed: int | None = None,
) -> FNorm:
    """Pick an evaluator for ``spec``.

    ``auto`` prefers an exact empirical mean, then a closed form, then
    quadrature; specs without a joint cdf fall back to Monte Carlo, which
    needs an explicit seed.
    """
    if method == "auto":
        if isinstance(spec, Empirical):
            return EmpiricalFNorm(spec.sample)
        if has_closed_form(spec):
            return ClosedFormFNorm(spec)
        if isinstance(spec, MultiNormalExp) and not spec.is_diagonal:
            if seed is None:
                raise CdfUnavailable("joint cdf unavailable; pass a seed to use Monte Carlo")
            return MonteCarloFNorm(spec, n, seed)
        return QuadratureFNorm(spec, config)
    if method == "closed":
        return ClosedFormFNorm(spec)
    if method == "quad":
        if isinstance(spec, MultiNormalExp) and not spec.is_diagonal:
            raise CdfUnavailable("joint cdf unavailable for non-diagonal covariance; use Monte Carlo")
        return QuadratureFNorm(spec, config)
    if method == "mc":
        if seed is None:
            raise DomainError("Monte Carlo evaluation requires a seed")
        return MonteCarloFNorm(spec, n, seed)
    if method == "empirical":
        if not isinstance(spec, Empirical):
            raise DomainError("empirical method needs an empirical spec")
        return EmpiricalFNorm(spec.sample)
    raise DomainError(f"unknown method {method!r}")


# ----------------------------------------------------------------------------
# Module-level operations
# ----------------------------------------------------------------------------


def eval(handle: FNorm, x) -> float:  # noqa: A001 - mirrors the mathematical name
    return handle.eval(x)


def max_cf(handle: FNorm, x) -> float:
    """Max-characteristic function ``E max(1, x1 X1, ..., xd Xd)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0):
        raise DomainError("max-characteristic function takes nonnegative arguments")
    return handle.eval(np.concatenate([[1.0], x]))


def bounds(spec: Distribution, x) -> tuple[float, float]:
    """``max(|x0|, |xi| E Xi) <= ||x||_F <= |x0| + sum |xi| E Xi``."""
    a = as_point(x, spec.dim)
    m = np.array([spec.mean(i) for i in range(spec.dim)])
    weighted = a[1:] * m
    return float(max(a[0], weighted.max())), float(a[0] + weighted.sum())


def is_weighted_supnorm(handle: FNorm, means, tol: float = 1e-9) -> bool:
    """True iff ``||(1, 1/c1, ..., 1/cd)|| = 1``, i.e. the norm is ``max(|x0|, ci |xi|)``."""
    c = np.atleast_1d(np.asarray(means, dtype=float))
    if np.any(c <= 0):
        raise DomainError("means must be positive")
    return abs(handle.eval(np.concatenate([[1.0], 1.0 / c])) - 1.0) <= tol


@dataclass(frozen=True)
class FrechetCheck:
    lhs: float
    rhs: float

    @property
    def deviation(self):
        return abs(self.lhs - self.rhs)


def frechet_reduction_check(p: float, x, config: QuadratureConfig = DEFAULT_CONFIG) -> FrechetCheck:
    """Compare the norm of independent Frechet(p) margins with its bivariate reduction.

    ``||(x0, x1..xd)||_G = ||(x0, ||(x1..xd)||_p)||_{Frechet(p)}``, both sides by quadrature.
    """
    a = as_point(x)
    d = a.size - 1
    if d < 1:
        raise DomainError("point needs at least two coordinates")
    lhs = QuadratureFNorm(IndependentProduct((Frechet(p),) * d), config).eval(a)
    rhs = QuadratureFNorm(Frechet(p), config).eval([a[0], float(np.sum(a[1:] ** p) ** (1.0 / p))])
    return FrechetCheck(lhs, rhs)
