"""Products of F-norms and log F-norms.

The product of the F-norms of independent ``X ~ F`` and ``Y ~ G`` is the
F-norm of ``X * Y`` (componentwise).  By Tonelli,

    (F * G)(x) = int ||(x0, x1 t1, ..., xd td)||_F dG(t),

so a factor with atoms or a univariate density can be integrated exactly or
by quadrature, while anything else falls back to Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product as cartesian

import numpy as np
from scipy.stats import binom

from . import _accel
from .distributions import (
    Bernoulli,
    Degenerate,
    Distribution,
    Empirical,
    Exponential,
    IndependentProduct,
    LogNormal,
    MultiNormalExp,
    as_generator,
)
from .errors import DomainError, InvalidSpecError, ProductUnavailable
from .norms import (
    EmpiricalFNorm,
    EvalResult,
    FNorm,
    as_point,
    as_points,
    lognormal_fnorm,
    make_handle,
)
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate, integrate_tail

__all__ = [
    "ProductFNorm",
    "product_eval",
    "idempotent_check",
    "Normal",
    "NegativeGumbel",
    "Rademacher",
    "MultiNormal",
    "signed_from_dict",
    "LogFNorm",
    "log_fnorm_eval",
    "husler_reiss_eval",
    "convolution_identity_check",
    "clt_fnorm_demo",
]


# ----------------------------------------------------------------------------
# Products
# ----------------------------------------------------------------------------


def _generator_of(handle: FNorm):
    """The distribution behind a handle, or None for composite handles."""
    if isinstance(handle, EmpiricalFNorm):
        return Empirical(handle.sample)
    return getattr(handle, "spec", None)


def _atoms(spec: Distribution):
    """``(points (k, d), weights (k,))`` if ``spec`` is purely atomic, else None."""
    if isinstance(spec, Degenerate):
        return np.array([spec.c]), np.array([1.0])
    if isinstance(spec, Bernoulli):
        v, w = spec.atoms()
        return v[:, None], w
    if isinstance(spec, Empirical):
        return spec.data, np.full(spec.sample.n, 1.0 / spec.sample.n)
    if isinstance(spec, IndependentProduct) and all(_atoms(c) is not None for c in spec.components):
        parts = [_atoms(c) for c in spec.components]
        pts = np.array([np.concatenate([p[0][i] for p, i in zip(parts, idx)]) for idx in cartesian(*[range(len(p[1])) for p in parts])])
        wts = np.array([np.prod([p[1][i] for p, i in zip(parts, idx)]) for idx in cartesian(*[range(len(p[1])) for p in parts])])
        return pts, wts
    return None


def _density_1d(spec: Distribution):
    """Univariate spec with a usable density, or None."""
    if spec is None or spec.dim != 1 or getattr(spec, "discrete", False):
        return None
    if isinstance(spec, MultiNormalExp):
        return spec.component(0)
    if isinstance(spec, IndependentProduct):
        return _density_1d(spec.components[0])
    try:
        spec.pdf(np.array([1.0]))
    except (NotImplementedError, DomainError):
        return None
    return spec


def _tonelli_plan(inner: FNorm, outer: FNorm):
    g = _generator_of(outer)
    if g is None:
        return None
    if _atoms(g) is not None:
        return "atoms", g
    dens = _density_1d(g)
    if dens is not None:
        return "density", dens
    return None


def _tonelli(inner: FNorm, kind: str, g: Distribution, a: np.ndarray, config: QuadratureConfig) -> EvalResult:
    x0 = a[0]
    if kind == "atoms":
        pts, wts = _atoms(g)
        P = np.column_stack([np.full(len(wts), x0), pts * a[1:][None, :]])
        vals = inner.eval_many(P)
        return EvalResult(float(np.dot(wts, vals)), "tonelli", 0.0)
    x1 = a[1]
    if x1 == 0.0:
        return EvalResult(float(x0), "tonelli", 0.0)

    def f(t):
        vals = inner.eval_many(np.column_stack([np.full(t.size, x0), x1 * t]))
        return g.pdf(t) * vals

    bps = list(g.breakpoints())
    spec_f = _generator_of(inner)
    if spec_f is not None and x0 > 0:
        for b in spec_f.breakpoints(0) if spec_f.dim == 1 else ():
            if b > 0:
                bps.append(x0 / (x1 * b))
    bps.append(x0 / x1)
    upper = g.support_upper()
    if math.isfinite(upper):
        res = integrate(f, 0.0, upper, config, bps)
    else:
        m_f = inner.mean(0)

        def remainder(T):
            sf = float(g._sf1(np.array([T]))[0])
            return x0 * sf + x1 * m_f * (g.tail_expectation(0, T) + T * sf)

        res = integrate_tail(f, 0.0, config, bps, remainder, start=1.0)
    return EvalResult(res.value, "tonelli", res.error_bound)


@dataclass(frozen=True, eq=False)
class ProductFNorm(FNorm):
    """F-norm of ``X * Y`` for independent generators of ``left`` and ``right``.

    ``method`` is ``auto``, ``tonelli`` (integrate against whichever factor
    allows it), ``tonelli-left``/``tonelli-right`` (integrate against that
    factor's df) or ``mc``.
    """

    left: FNorm
    right: FNorm
    method_request: str = "auto"
    config: QuadratureConfig = DEFAULT_CONFIG
    n: int = 10**6
    seed: int | None = None

    def __post_init__(self):
        if self.left.dim != self.right.dim:
            raise DomainError("product factors must have the same dimension")
        if self.method_request not in ("auto", "tonelli", "tonelli-left", "tonelli-right", "mc"):
            raise DomainError(f"unknown product method {self.method_request!r}")
        self.plan  # resolve eagerly so failures surface at construction

    @property
    def dim(self):
        return self.left.dim

    @cached_property
    def plan(self):
        req = self.method_request
        # "right" means: integrate the left norm against the right factor's df
        options = []
        if req in ("auto", "tonelli", "tonelli-right"):
            options.append(("right", self.left, self.right))
        if req in ("auto", "tonelli", "tonelli-left"):
            options.append(("left", self.right, self.left))
        # prefer exact atom sums over quadrature
        found = [(side, inner, _tonelli_plan(inner, outer)) for side, inner, outer in options]
        found = [f for f in found if f[2] is not None]
        found.sort(key=lambda f: 0 if f[2][0] == "atoms" else 1)
        if found:
            side, inner, (kind, g) = found[0]
            return ("tonelli", side, inner, kind, g)
        if req in ("auto", "mc"):
            if self.seed is None:
                raise ProductUnavailable("no Tonelli decomposition available and no seed given for Monte Carlo")
            return ("mc",)
        raise ProductUnavailable(f"factor structure does not support {req}")

    @property
    def method(self):
        return "tonelli" if self.plan[0] == "tonelli" else "mc"

    def draw(self, n, rng):
        rng = as_generator(rng)
        return self.left.draw(n, rng) * self.right.draw(n, rng)

    def mean(self, i=0):
        return self.left.mean(i) * self.right.mean(i)

    @cached_property
    def sample(self):
        ss = np.random.SeedSequence(self.seed)
        ra, rb = (np.random.default_rng(s) for s in ss.spawn(2))
        return np.ascontiguousarray(self.left.draw(self.n, ra) * self.right.draw(self.n, rb))

    def evaluate(self, x):
        a = as_point(x, self.dim)
        if self.plan[0] == "mc":
            mean, var = _accel.mean_max(self.sample, a[None, :])
            return EvalResult(float(mean[0]), "mc", float(math.sqrt(var[0] / self.n)))
        _, _, inner, kind, g = self.plan
        return _tonelli(inner, kind, g, a, self.config)

    def eval_many(self, X):
        X = as_points(X, self.dim)
        if self.plan[0] == "mc":
            return _accel.mean_max(self.sample, X)[0]
        return np.array([self.evaluate(row).value for row in X])

    def describe(self):
        out = {"method": self.method, "dim": self.dim, "left": self.left.describe(), "right": self.right.describe()}
        if self.plan[0] == "mc":
            out.update(n=self.n, seed=self.seed)
        else:
            out["integrated_against"] = self.plan[1]
        return out


def product_eval(left: FNorm, right: FNorm, x, method: str = "auto", config: QuadratureConfig = DEFAULT_CONFIG, seed=None, n: int = 10**6) -> float:
    return ProductFNorm(left, right, method, config, n, seed).eval(x)


@dataclass(frozen=True)
class IdempotentReport:
    idempotent: bool
    max_deviation: float

    def to_dict(self):
        return {"idempotent": self.idempotent, "max_deviation": self.max_deviation}


def idempotent_check(handle: FNorm, probes, tol: float = 1e-8, **kwargs) -> IdempotentReport:
    """Whether ``handle * handle == handle`` on the probe points."""
    P = as_points(probes, handle.dim)
    prod = ProductFNorm(handle, handle, **kwargs)
    dev = float(np.abs(prod.eval_many(P) - handle.eval_many(P)).max())
    return IdempotentReport(dev <= tol, dev)


# ----------------------------------------------------------------------------
# Signed generators and log F-norms
# ----------------------------------------------------------------------------


class SignedSpec:
    """A real random vector with ``E exp(X_i) < inf``; ``exp_spec`` is the law of ``exp(X)``."""

    dim = 1
    mean_zero = False

    def exp_spec(self) -> Distribution:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Normal(SignedSpec):
    mu: float = 0.0
    sigma2: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma2) and self.sigma2 >= 0):
            raise InvalidSpecError("normal needs finite mu and sigma2 >= 0")

    @property
    def variance(self):
        return self.sigma2

    @property
    def mean_zero(self):
        return self.mu == 0.0

    def exp_spec(self):
        if self.sigma2 == 0:
            return Degenerate((math.exp(self.mu),))
        return LogNormal(self.mu, self.sigma2)

    def __add__(self, other):
        if not isinstance(other, Normal):
            return NotImplemented
        return Normal(self.mu + other.mu, self.sigma2 + other.sigma2)

    def to_dict(self):
        return {"type": "normal", "mu": self.mu, "sigma2": self.sigma2}


@dataclass(frozen=True)
class NegativeGumbel(SignedSpec):
    """Df ``1 - exp(-e^t)``; ``exp(X)`` is unit exponential."""

    def exp_spec(self):
        return Exponential(1.0)

    def to_dict(self):
        return {"type": "neg-gumbel"}


@dataclass(frozen=True)
class Rademacher(SignedSpec):
    """Uniform on {-1, +1}: centered, unit variance."""

    mean_zero = True
    variance = 1.0

    def exp_spec(self):
        return Empirical([[math.exp(-1.0)], [math.e]])

    def to_dict(self):
        return {"type": "rademacher"}


@dataclass(frozen=True)
class MultiNormal(SignedSpec):
    mu: tuple
    sigma: tuple

    def __post_init__(self):
        spec = MultiNormalExp(self.mu, self.sigma)  # validates
        object.__setattr__(self, "mu", spec.mu)
        object.__setattr__(self, "sigma", spec.sigma)

    @property
    def dim(self):
        return len(self.mu)

    def exp_spec(self):
        return MultiNormalExp(self.mu, self.sigma)

    def to_dict(self):
        return {"type": "mvnormal", "mu": list(self.mu), "sigma": [list(r) for r in self.sigma]}


def signed_from_dict(obj) -> SignedSpec:
    if isinstance(obj, str):
        obj = {"type": obj}
    kind = str(obj.get("type", "")).lower()
    if kind == "normal":
        return Normal(float(obj.get("mu", 0.0)), float(obj.get("sigma2", 1.0)))
    if kind in ("neg-gumbel", "negative-gumbel", "gumbel"):
        return NegativeGumbel()
    if kind == "rademacher":
        return Rademacher()
    if kind == "mvnormal":
        return MultiNormal(tuple(obj["mu"]), obj["sigma"])
    raise InvalidSpecError(f"unknown signed spec type {kind!r}")


@dataclass(frozen=True, eq=False)
class LogFNorm(FNorm):
    """The F-norm generated by ``exp(X)``."""

    signed: SignedSpec
    config: QuadratureConfig = DEFAULT_CONFIG
    seed: int | None = None
    n: int = 10**6

    @cached_property
    def inner(self) -> FNorm:
        return make_handle(self.signed.exp_spec(), "auto", self.config, self.n, self.seed)

    @property
    def spec(self):
        return self.signed.exp_spec()

    @property
    def dim(self):
        return self.signed.dim

    @property
    def method(self):
        return self.inner.method

    def evaluate(self, x):
        return self.inner.evaluate(x)

    def eval_many(self, X):
        return self.inner.eval_many(X)

    def draw(self, n, rng):
        return self.inner.draw(n, rng)

    def mean(self, i=0):
        return self.inner.mean(i)

    def describe(self):
        return {"method": self.method, "dim": self.dim, "signed": self.signed.to_dict()}


def log_fnorm_eval(s: SignedSpec, x, config: QuadratureConfig = DEFAULT_CONFIG, seed=None) -> float:
    return LogFNorm(s, config, seed).eval(x)


def husler_reiss_eval(sigma2: float, x) -> float:
    """``x Phi(s/2 + log(x/y)/s) + y Phi(s/2 + log(y/x)/s)`` with ``s^2 = sigma2``.

    Zero coordinates and ``sigma2 = 0`` take the explicit limit ``max(x, y)``.
    """
    a = as_point(x, 1)
    if not (math.isfinite(sigma2) and sigma2 >= 0):
        raise DomainError("sigma2 must be a nonnegative real")
    s = math.sqrt(sigma2)
    if s == 0.0 or a[0] == 0.0 or a[1] == 0.0:
        return float(a.max())
    return float(lognormal_fnorm(a[0], a[1], -0.5 * sigma2, s))


def convolution_identity_check(sA: Normal, sB: Normal, probes, config: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Max deviation between ``log(A) * log(B)`` (Tonelli) and ``log(A + B)``."""
    if not (isinstance(sA, Normal) and isinstance(sB, Normal)):
        raise DomainError("convolution identity check is defined for normal factors")
    P = as_points(probes, 1)
    prod = ProductFNorm(LogFNorm(sA, config), LogFNorm(sB, config), "tonelli", config)
    direct = LogFNorm(sA + sB, config)
    return float(np.abs(prod.eval_many(P) - direct.eval_many(P)).max())


def clt_fnorm_demo(base: SignedSpec, ns, points, rng, reps: int = 10**6) -> list[dict]:
    """Log F-norms of ``n^(-1/2) (X(1) + ... + X(n))`` against their normal limit.

    For each ``n`` and point, reports a Monte Carlo estimate (``reps``
    replications) with its standard error and, for Rademacher and normal
    bases, the exact value.  ``deviation`` uses the exact value when known.
    """
    if base.dim != 1:
        raise DomainError("the demo is univariate")
    if not getattr(base, "mean_zero", False):
        raise DomainError("the base variable must be centered")
    if not isinstance(base, (Rademacher, Normal)):
        raise DomainError("supported bases: rademacher, centered normal")
    rng = as_generator(rng)
    P = as_points(points, 1)
    limit = LogFNorm(Normal(0.0, base.variance))
    rows = []
    for n in ns:
        n = int(n)
        if n < 1:
            raise DomainError("n must be positive")
        if isinstance(base, Rademacher):
            S = (2.0 * rng.binomial(n, 0.5, size=reps) - n) / math.sqrt(n)
            k = np.arange(n + 1)
            support = (2.0 * k - n) / math.sqrt(n)
            pmf = binom.pmf(k, n, 0.5)
        else:
            S = rng.normal(0.0, math.sqrt(base.variance), size=reps)
            support = pmf = None
        Y = np.exp(S)[:, None]
        mc_mean, mc_var = _accel.mean_max(Y, P)
        for j, (x0, x1) in enumerate(P):
            lim = limit.eval([x0, x1])
            if pmf is not None:
                exact = float(x0 + np.dot(pmf, np.maximum(x1 * np.exp(support) - x0, 0.0)))
            else:
                exact = lim
            rows.append(
                {
                    "n": n,
                    "x0": float(x0),
                    "x1": float(x1),
                    "mc_value": float(mc_mean[j]),
                    "mc_stderr": float(math.sqrt(mc_var[j] / reps)),
                    "exact_value": exact,
                    "limit_value": lim,
                    "deviation": abs(exact - lim),
                }
            )
    return rows
