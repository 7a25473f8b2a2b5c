"""Declarative distribution specs.

Each spec is an immutable value describing a d-dimensional law of a
nonnegative random vector.  Besides the joint cdf they expose what the
F-norm machinery needs: a numerically stable joint survival function, the
kinks of each marginal (so quadrature can split there), analytic tail
expectations ``E[(X_i - s)^+]`` where known, and inverse-transform sampling.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import gammainc, ndtr, ndtri

from .errors import CdfUnavailable, DomainError, InvalidSpecError

__all__ = [
    "SampleMatrix",
    "Distribution",
    "Degenerate",
    "Bernoulli",
    "Uniform01",
    "Exponential",
    "Pareto",
    "Frechet",
    "LogNormal",
    "MultiNormalExp",
    "IndependentProduct",
    "Copula",
    "Empirical",
    "HReport",
    "as_generator",
    "cdf",
    "quantile",
    "sample",
    "marginal_mean",
    "validate_H",
    "spec_from_dict",
    "load_spec",
]


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an integer seed or a SeedSequence."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        raise DomainError("a seed or Generator is required; no implicit entropy")
    return np.random.default_rng(rng)


# ----------------------------------------------------------------------------
# Sample matrix
# ----------------------------------------------------------------------------


class SampleMatrix:
    """An ``n x d`` matrix of nonnegative observations.

    Columns with zero mean are accepted here so that :func:`validate_H` can
    report them; F-norm evaluation on such samples yields a seminorm.
    """

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.array(data, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidSpecError(f"sample must be a non-empty n x d matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidSpecError("sample entries must be finite")
        if np.any(arr < 0):
            raise InvalidSpecError("sample entries must be nonnegative")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("SampleMatrix is immutable")

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def __eq__(self, other):
        return isinstance(other, SampleMatrix) and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.data.shape, self.data.tobytes()))

    def __repr__(self):
        return f"SampleMatrix(n={self.n}, d={self.d})"

    @classmethod
    def from_csv(cls, path) -> "SampleMatrix":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = [[float(v) for v in row] for row in reader if row]
        if not rows:
            raise InvalidSpecError(f"{path}: no data rows")
        if any(len(r) != len(header) for r in rows):
            raise InvalidSpecError(f"{path}: ragged rows")
        return cls(rows)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([f"x{i + 1}" for i in range(self.d)])
            for row in self.data:
                writer.writerow([repr(float(v)) for v in row])


# ----------------------------------------------------------------------------
# Base class
# ----------------------------------------------------------------------------


class Distribution:
    """Common interface.  Vectorized private methods take ``(k, d)`` arrays."""

    dim: int = 1
    discrete: bool = False

    # -- joint functions -----------------------------------------------------
    def _cdf(self, T: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _sf(self, T: np.ndarray) -> np.ndarray:
        """Joint survival ``1 - F(t)``; subclasses override when cancellation matters."""
        return 1.0 - self._cdf(T)

    def mean(self, i: int = 0) -> float:
        raise NotImplementedError

    def sample_array(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def marginal(self, idx: Sequence[int]) -> "Distribution":
        """Law of the sub-vector ``(X_i)_{i in idx}``."""
        raise NotImplementedError

    # -- per-coordinate metadata ----------------------------------------------
    def component(self, i: int) -> "Distribution":
        return self.marginal((i,))

    def support_upper(self, i: int = 0) -> float:
        return self.component(i).support_upper(0) if self.dim > 1 else math.inf

    def breakpoints(self, i: int = 0) -> np.ndarray:
        """Points where the i-th marginal cdf has a kink or a jump."""
        return self.component(i).breakpoints(0) if self.dim > 1 else np.zeros(0)

    def tail_expectation(self, i: int, s: float):
        """``E[(X_i - s)^+]`` (or an upper bound) if available analytically, else None."""
        return self.component(i).tail_expectation(0, s) if self.dim > 1 else None

    # -- univariate extras ---------------------------------------------------
    def _ppf(self, u: np.ndarray) -> np.ndarray:
        """Left-continuous inverse on ``[0, 1]`` (vectorized)."""
        raise NotImplementedError

    def _isf(self, v: np.ndarray) -> np.ndarray:
        """``q(1 - v)``, accurate for tiny ``v``."""
        return self._ppf(1.0 - v)

    def pdf(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def atoms(self):
        """``(values, probabilities)`` of a discrete univariate law."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _need_1d(self, what):
        if self.dim != 1:
            raise DomainError(f"{what} requires a univariate spec, got d={self.dim}")


def _as_points(spec: Distribution, t) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if arr.ndim == 1:
        arr = arr[None, :] if spec.dim > 1 or arr.size == 1 else arr[:, None]
    if arr.shape[1] != spec.dim:
        raise DomainError(f"expected points of length {spec.dim}, got {arr.shape[1]}")
    return arr


class _Univariate(Distribution):
    dim = 1

    def _cdf1(self, t):
        raise NotImplementedError

    def _sf1(self, t):
        return 1.0 - self._cdf1(t)

    def _cdf(self, T):
        return self._cdf1(np.asarray(T, dtype=np.float64).reshape(len(T), -1)[:, 0])

    def _sf(self, T):
        return self._sf1(np.asarray(T, dtype=np.float64).reshape(len(T), -1)[:, 0])

    def marginal(self, idx):
        if tuple(idx) != (0,):
            raise DomainError(f"bad marginal indices {idx} for d=1")
        return self

    def component(self, i):
        return self

    def sample_array(self, n, rng):
        return self._ppf(rng.random(n))[:, None]


# ----------------------------------------------------------------------------
# Catalog variants
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Degenerate(Distribution):
    """Point mass at ``c``.  Zero components are allowed so (H) can flag them."""

    c: tuple
    discrete = True

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(self.c))
        if not c or any(not math.isfinite(v) or v < 0 for v in c):
            raise InvalidSpecError(f"degenerate point must be finite and nonnegative, got {self.c}")
        object.__setattr__(self, "c", c)

    @property
    def dim(self):
        return len(self.c)

    def _cdf(self, T):
        return np.all(T >= np.array(self.c)[None, :], axis=1).astype(float)

    def mean(self, i=0):
        return self.c[i]

    def sample_array(self, n, rng):
        rng.random((n, self.dim))  # keep stream consumption uniform across variants
        return np.tile(np.array(self.c), (n, 1))

    def marginal(self, idx):
        return Degenerate(tuple(self.c[i] for i in idx))

    def support_upper(self, i=0):
        return self.c[i]

    def breakpoints(self, i=0):
        return np.array([self.c[i]])

    def tail_expectation(self, i, s):
        return max(self.c[i] - s, 0.0)

    def _ppf(self, u):
        self._need_1d("quantile")
        return np.full_like(np.asarray(u, dtype=float), self.c[0])

    def atoms(self):
        self._need_1d("atoms")
        return np.array([self.c[0]]), np.array([1.0])

    def to_dict(self):
        return {"type": "degenerate", "c": list(self.c)}


@dataclass(frozen=True)
class Bernoulli(_Univariate):
    p: float
    discrete = True

    def __post_init__(self):
        if not 0.0 < float(self.p) < 1.0:
            raise InvalidSpecError(f"Bernoulli p must lie in (0, 1), got {self.p}")
        object.__setattr__(self, "p", float(self.p))

    def _cdf1(self, t):
        return np.where(t < 0, 0.0, np.where(t < 1, 1.0 - self.p, 1.0))

    def mean(self, i=0):
        return self.p

    def support_upper(self, i=0):
        return 1.0

    def breakpoints(self, i=0):
        return np.array([0.0, 1.0])

    def tail_expectation(self, i, s):
        return self.p * max(1.0 - s, 0.0) if s >= 0 else self.p - s

    def _ppf(self, u):
        return np.where(np.asarray(u) <= 1.0 - self.p, 0.0, 1.0)

    def _isf(self, v):
        return np.where(np.asarray(v) >= self.p, 0.0, 1.0)

    def atoms(self):
        return np.array([0.0, 1.0]), np.array([1.0 - self.p, self.p])

    def to_dict(self):
        return {"type": "bernoulli", "p": self.p}


@dataclass(frozen=True)
class Uniform01(_Univariate):
    def _cdf1(self, t):
        return np.clip(t, 0.0, 1.0)

    def mean(self, i=0):
        return 0.5

    def support_upper(self, i=0):
        return 1.0

    def breakpoints(self, i=0):
        return np.array([0.0, 1.0])

    def tail_expectation(self, i, s):
        s = min(max(s, 0.0), 1.0)
        return 0.5 * (1.0 - s) ** 2 if s > 0 else 0.5 - s

    def _ppf(self, u):
        return np.asarray(u, dtype=float).copy()

    def _isf(self, v):
        return 1.0 - np.asarray(v, dtype=float)

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        return ((t >= 0) & (t <= 1)).astype(float)

    def to_dict(self):
        return {"type": "uniform"}


@dataclass(frozen=True)
class Exponential(_Univariate):
    lam: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise InvalidSpecError(f"exponential rate must be positive, got {self.lam}")
        object.__setattr__(self, "lam", float(self.lam))

    def _cdf1(self, t):
        return np.where(t <= 0, 0.0, -np.expm1(-self.lam * np.maximum(t, 0.0)))

    def _sf1(self, t):
        return np.where(t <= 0, 1.0, np.exp(-self.lam * np.maximum(t, 0.0)))

    def mean(self, i=0):
        return 1.0 / self.lam

    def breakpoints(self, i=0):
        return np.array([0.0])

    def tail_expectation(self, i, s):
        return math.exp(-self.lam * s) / self.lam if s >= 0 else 1.0 / self.lam - s

    def _ppf(self, u):
        with np.errstate(divide="ignore"):
            return -np.log1p(-np.asarray(u, dtype=float)) / self.lam

    def _isf(self, v):
        with np.errstate(divide="ignore"):
            return -np.log(np.asarray(v, dtype=float)) / self.lam

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t < 0, 0.0, self.lam * np.exp(-self.lam * np.maximum(t, 0.0)))

    def to_dict(self):
        return {"type": "exponential", "lambda": self.lam}


@dataclass(frozen=True)
class Pareto(_Univariate):
    """Pareto law with df ``1 - t^(-1/gamma)`` on ``[1, inf)``."""

    gamma: float

    def __post_init__(self):
        if not 0.0 < float(self.gamma) < 1.0:
            raise InvalidSpecError(f"Pareto tail index must lie in (0, 1), got {self.gamma}")
        object.__setattr__(self, "gamma", float(self.gamma))

    def _sf1(self, t):
        with np.errstate(divide="ignore"):
            return np.where(t <= 1, 1.0, np.maximum(t, 1.0) ** (-1.0 / self.gamma))

    def _cdf1(self, t):
        return 1.0 - self._sf1(t)

    def mean(self, i=0):
        return 1.0 / (1.0 - self.gamma)

    def breakpoints(self, i=0):
        return np.array([1.0])

    def tail_expectation(self, i, s):
        g = self.gamma
        if s <= 1:
            return 1.0 / (1.0 - g) - s
        return g / (1.0 - g) * s ** (1.0 - 1.0 / g)

    def _ppf(self, u):
        with np.errstate(divide="ignore"):
            return (1.0 - np.asarray(u, dtype=float)) ** (-self.gamma)

    def _isf(self, v):
        with np.errstate(divide="ignore"):
            return np.asarray(v, dtype=float) ** (-self.gamma)

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        a = 1.0 / self.gamma
        return np.where(t < 1, 0.0, a * np.maximum(t, 1.0) ** (-a - 1.0))

    def to_dict(self):
        return {"type": "pareto", "gamma": self.gamma}


@dataclass(frozen=True)
class Frechet(_Univariate):
    """Frechet law with df ``exp(-t^(-p))``, shape ``p > 1``."""

    p: float

    def __post_init__(self):
        if not (math.isfinite(self.p) and self.p > 1):
            raise InvalidSpecError(f"Frechet shape must exceed 1, got {self.p}")
        object.__setattr__(self, "p", float(self.p))

    def _cdf1(self, t):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(t <= 0, 0.0, np.exp(-np.maximum(t, 0.0) ** (-self.p)))

    def _sf1(self, t):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(t <= 0, 1.0, -np.expm1(-np.maximum(t, 0.0) ** (-self.p)))

    def mean(self, i=0):
        return float(gamma_fn(1.0 - 1.0 / self.p))

    def breakpoints(self, i=0):
        return np.array([0.0])

    def tail_expectation(self, i, s):
        if s <= 0:
            return self.mean() - s
        # E[X; X > s] = Gamma(1 - 1/p) P(1 - 1/p, s^-p)
        a = 1.0 - 1.0 / self.p
        z = s ** (-self.p)
        return max(float(gamma_fn(a) * gammainc(a, z) + s * math.expm1(-z)), 0.0)

    def _ppf(self, u):
        with np.errstate(divide="ignore"):
            return (-np.log(np.asarray(u, dtype=float))) ** (-1.0 / self.p)

    def _isf(self, v):
        with np.errstate(divide="ignore"):
            return (-np.log1p(-np.asarray(v, dtype=float))) ** (-1.0 / self.p)

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        tt = np.where(t > 0, t, 1.0)
        # log space: near 0 the power overflows while the exponential vanishes
        lt = np.log(tt)
        with np.errstate(over="ignore"):
            val = self.p * np.exp((-self.p - 1.0) * lt - np.exp(-self.p * lt))
        return np.where(t > 0, val, 0.0)

    def to_dict(self):
        return {"type": "frechet", "p": self.p}


@dataclass(frozen=True)
class LogNormal(_Univariate):
    """Law of ``exp(N(mu, sigma2))``."""

    mu: float
    sigma2: float

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise InvalidSpecError("log-normal mu must be finite")
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise InvalidSpecError(f"log-normal variance must be positive, got {self.sigma2}")
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "sigma2", float(self.sigma2))

    @property
    def sigma(self):
        return math.sqrt(self.sigma2)

    def _z(self, t):
        with np.errstate(divide="ignore"):
            return (np.log(np.maximum(t, 0.0)) - self.mu) / self.sigma

    def _cdf1(self, t):
        return ndtr(self._z(t))

    def _sf1(self, t):
        return ndtr(-self._z(t))

    def mean(self, i=0):
        return math.exp(self.mu + 0.5 * self.sigma2)

    def breakpoints(self, i=0):
        return np.array([0.0])

    def tail_expectation(self, i, s):
        if s <= 0:
            return self.mean() - s
        ls = math.log(s)
        val = self.mean() * ndtr((self.mu + self.sigma2 - ls) / self.sigma) - s * ndtr((self.mu - ls) / self.sigma)
        return max(float(val), 0.0)

    def _ppf(self, u):
        return np.exp(self.mu + self.sigma * ndtri(np.asarray(u, dtype=float)))

    def _isf(self, v):
        return np.exp(self.mu - self.sigma * ndtri(np.asarray(v, dtype=float)))

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        tt = np.where(t > 0, t, 1.0)
        z = (np.log(tt) - self.mu) / self.sigma
        val = np.exp(-0.5 * z * z) / (tt * self.sigma * math.sqrt(2 * math.pi))
        return np.where(t > 0, val, 0.0)

    def to_dict(self):
        return {"type": "lognormal", "mu": self.mu, "sigma2": self.sigma2}


@dataclass(frozen=True)
class MultiNormalExp(Distribution):
    """Law of ``exp(N(mu, Sigma))`` componentwise.

    The joint cdf is only provided for diagonal ``Sigma``; otherwise
    :class:`~fnorm.errors.CdfUnavailable` routes callers to Monte Carlo.
    """

    mu: tuple
    sigma: tuple

    def __post_init__(self):
        mu = tuple(float(v) for v in np.atleast_1d(self.mu))
        S = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        if S.shape != (len(mu), len(mu)):
            raise InvalidSpecError(f"covariance must be {len(mu)}x{len(mu)}, got {S.shape}")
        if not np.allclose(S, S.T, atol=1e-12):
            raise InvalidSpecError("covariance must be symmetric")
        if np.linalg.eigvalsh(S).min() < -1e-10 * max(1.0, np.abs(S).max()):
            raise InvalidSpecError("covariance must be positive semidefinite")
        if np.any(np.diag(S) <= 0):
            raise InvalidSpecError("covariance diagonal must be positive")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", tuple(tuple(row) for row in S.tolist()))

    @property
    def dim(self):
        return len(self.mu)

    @property
    def cov(self) -> np.ndarray:
        return np.array(self.sigma)

    @property
    def is_diagonal(self) -> bool:
        S = self.cov
        return bool(np.all(S[~np.eye(self.dim, dtype=bool)] == 0))

    def _components(self):
        return [LogNormal(self.mu[i], self.sigma[i][i]) for i in range(self.dim)]

    def _cdf(self, T):
        if not self.is_diagonal:
            raise CdfUnavailable("joint cdf of exp(N(mu, Sigma)) needs diagonal Sigma")
        return IndependentProduct(tuple(self._components()))._cdf(T)

    def _sf(self, T):
        if not self.is_diagonal:
            raise CdfUnavailable("joint cdf of exp(N(mu, Sigma)) needs diagonal Sigma")
        return IndependentProduct(tuple(self._components()))._sf(T)

    def mean(self, i=0):
        return math.exp(self.mu[i] + 0.5 * self.sigma[i][i])

    def sample_array(self, n, rng):
        w, V = np.linalg.eigh(self.cov)
        L = V * np.sqrt(np.maximum(w, 0.0))
        Z = ndtri(rng.random((n, self.dim)))
        return np.exp(np.array(self.mu)[None, :] + Z @ L.T)

    def marginal(self, idx):
        idx = list(idx)
        if len(idx) == 1:
            return LogNormal(self.mu[idx[0]], self.sigma[idx[0]][idx[0]])
        return MultiNormalExp(tuple(self.mu[i] for i in idx), self.cov[np.ix_(idx, idx)])

    def component(self, i):
        return LogNormal(self.mu[i], self.sigma[i][i])

    def _ppf(self, u):
        self._need_1d("quantile")
        return self.component(0)._ppf(u)

    def to_dict(self):
        return {"type": "mvnexp", "mu": list(self.mu), "sigma": [list(r) for r in self.sigma]}


@dataclass(frozen=True)
class IndependentProduct(Distribution):
    """Independent coordinates with the given univariate laws."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise InvalidSpecError("product needs at least one component")
        for c in comps:
            if not isinstance(c, Distribution) or c.dim != 1:
                raise InvalidSpecError("product components must be univariate specs")
        object.__setattr__(self, "components", comps)

    @property
    def dim(self):
        return len(self.components)

    @property
    def discrete(self):
        return all(c.discrete for c in self.components)

    def _cdf(self, T):
        out = np.ones(len(T))
        for i, c in enumerate(self.components):
            out = out * c._cdf1(T[:, i])
        return out

    def _sf(self, T):
        # 1 - prod F_i = -expm1(sum log1p(-S_i)); keeps precision deep in the tail
        acc = np.zeros(len(T))
        for i, c in enumerate(self.components):
            with np.errstate(divide="ignore"):
                acc = acc + np.log1p(-c._sf1(T[:, i]))
        return -np.expm1(acc)

    def mean(self, i=0):
        return self.components[i].mean()

    def sample_array(self, n, rng):
        return np.column_stack([c.sample_array(n, rng)[:, 0] for c in self.components])

    def marginal(self, idx):
        idx = tuple(idx)
        if len(idx) == 1:
            return self.components[idx[0]]
        return IndependentProduct(tuple(self.components[i] for i in idx))

    def component(self, i):
        return self.components[i]

    def support_upper(self, i=0):
        return self.components[i].support_upper()

    def breakpoints(self, i=0):
        return self.components[i].breakpoints()

    def tail_expectation(self, i, s):
        return self.components[i].tail_expectation(0, s)

    def _ppf(self, u):
        self._need_1d("quantile")
        return self.components[0]._ppf(u)

    def _isf(self, v):
        self._need_1d("quantile")
        return self.components[0]._isf(v)

    def atoms(self):
        self._need_1d("atoms")
        return self.components[0].atoms()

    def pdf(self, t):
        self._need_1d("pdf")
        return self.components[0].pdf(t)

    def to_dict(self):
        return {"type": "product", "components": [c.to_dict() for c in self.components]}


@dataclass(frozen=True)
class Copula(Distribution):
    """Independence or comonotone copula on ``[0, 1]^dim``."""

    variant: str
    d: int

    def __post_init__(self):
        v = str(self.variant).lower()
        if v not in ("independence", "comonotone"):
            raise InvalidSpecError(f"copula variant must be independence|comonotone, got {self.variant}")
        if int(self.d) < 1:
            raise InvalidSpecError("copula dimension must be positive")
        object.__setattr__(self, "variant", v)
        object.__setattr__(self, "d", int(self.d))

    @property
    def dim(self):
        return self.d

    def _cdf(self, T):
        C = np.clip(T, 0.0, 1.0)
        if self.variant == "independence":
            return np.prod(C, axis=1)
        return np.min(C, axis=1)

    def mean(self, i=0):
        return 0.5

    def sample_array(self, n, rng):
        if self.variant == "independence":
            return rng.random((n, self.d))
        u = rng.random(n)
        return np.repeat(u[:, None], self.d, axis=1)

    def marginal(self, idx):
        if len(idx) == 1:
            return Uniform01()
        return Copula(self.variant, len(idx))

    def component(self, i):
        return Uniform01()

    def support_upper(self, i=0):
        return 1.0

    def breakpoints(self, i=0):
        return np.array([0.0, 1.0])

    def tail_expectation(self, i, s):
        return Uniform01().tail_expectation(0, s)

    def _ppf(self, u):
        self._need_1d("quantile")
        return np.asarray(u, dtype=float).copy()

    def pdf(self, t):
        self._need_1d("pdf")
        return Uniform01().pdf(t)

    def to_dict(self):
        return {"type": "copula", "variant": self.variant, "dim": self.d}


@dataclass(frozen=True)
class Empirical(Distribution):
    """Empirical law of a sample (weak inequalities: ``X_i <= t``)."""

    sample: SampleMatrix
    source: str | None = field(default=None, compare=False)
    discrete = True

    def __post_init__(self):
        if not isinstance(self.sample, SampleMatrix):
            object.__setattr__(self, "sample", SampleMatrix(self.sample))

    @property
    def dim(self):
        return self.sample.d

    @property
    def data(self) -> np.ndarray:
        return self.sample.data

    def _cdf(self, T):
        X = self.data
        if self.dim == 1:
            xs = np.sort(X[:, 0])
            return np.searchsorted(xs, T[:, 0], side="right") / len(xs)
        out = np.empty(len(T))
        for start in range(0, len(T), 256):
            blk = T[start : start + 256]
            out[start : start + 256] = np.all(X[None, :, :] <= blk[:, None, :], axis=2).mean(axis=1)
        return out

    def mean(self, i=0):
        return float(self.data[:, i].mean())

    def sample_array(self, n, rng):
        idx = np.minimum((rng.random(n) * self.sample.n).astype(np.int64), self.sample.n - 1)
        return self.data[idx].copy()

    def marginal(self, idx):
        return Empirical(SampleMatrix(self.data[:, list(idx)]))

    def component(self, i):
        return self.marginal((i,))

    def support_upper(self, i=0):
        return float(self.data[:, i].max())

    def breakpoints(self, i=0):
        return np.unique(self.data[:, i])

    def tail_expectation(self, i, s):
        return float(np.maximum(self.data[:, i] - s, 0.0).mean())

    def _ppf(self, u):
        self._need_1d("quantile")
        xs = np.sort(self.data[:, 0])
        n = len(xs)
        k = np.ceil(np.asarray(u, dtype=float) * n).astype(np.int64) - 1
        return xs[np.clip(k, 0, n - 1)]

    def atoms(self):
        self._need_1d("atoms")
        vals, counts = np.unique(self.data[:, 0], return_counts=True)
        return vals, counts / self.sample.n

    def to_dict(self):
        if self.source is not None:
            return {"type": "empirical", "file": self.source}
        return {"type": "empirical", "data": self.data.tolist()}


# ----------------------------------------------------------------------------
# Module-level operations
# ----------------------------------------------------------------------------


def cdf(spec: Distribution, t) -> float:
    """``F(t_1, ..., t_d)``."""
    pts = _as_points(spec, t)
    if pts.shape[0] != 1:
        raise DomainError("cdf takes a single point; use spec._cdf for batches")
    if not np.all(np.isfinite(pts)):
        raise DomainError("cdf argument must be finite")
    return float(spec._cdf(pts)[0])


def quantile(spec: Distribution, u: float) -> float:
    """Left-continuous inverse ``inf{t : F(t) >= u}`` of a univariate spec."""
    if spec.dim != 1:
        raise DomainError(f"quantile requires d=1, got d={spec.dim}")
    if not 0.0 < u < 1.0:
        raise DomainError(f"quantile level must lie in (0, 1), got {u}")
    return float(spec._ppf(np.array([u], dtype=float))[0])


def sample(spec: Distribution, n: int, rng) -> SampleMatrix:
    """``n`` iid draws by inverse transform; deterministic given the seed."""
    if n < 1:
        raise DomainError("sample size must be at least 1")
    return SampleMatrix(spec.sample_array(int(n), as_generator(rng)))


def marginal_mean(spec: Distribution, i: int = 0) -> float:
    if not 0 <= i < spec.dim:
        raise DomainError(f"coordinate {i} out of range for d={spec.dim}")
    return float(spec.mean(i))


@dataclass(frozen=True)
class HReport:
    passed: bool
    violations: tuple = ()

    def to_dict(self):
        return {"passed": self.passed, "violations": [{"coordinate": i, "reason": r} for i, r in self.violations]}


def validate_H(spec: Distribution) -> HReport:
    """Check that every marginal mean is finite and strictly positive."""
    bad = []
    for i in range(spec.dim):
        m = spec.mean(i)
        if not math.isfinite(m):
            bad.append((i, "infinite mean"))
        elif m <= 0:
            bad.append((i, "zero mean"))
    return HReport(passed=not bad, violations=tuple(bad))


# ----------------------------------------------------------------------------
# Serialization
# ----------------------------------------------------------------------------


def _req(obj: dict, key: str):
    if key not in obj:
        raise InvalidSpecError(f"spec of type {obj.get('type')!r} needs field {key!r}")
    return obj[key]


def spec_from_dict(obj: dict, base_dir: Path | None = None) -> Distribution:
    """Build a spec from its structured-text object."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise InvalidSpecError(f"spec must be an object with a 'type' field, got {obj!r}")
    kind = str(obj["type"]).lower()
    try:
        if kind == "degenerate":
            return Degenerate(tuple(np.atleast_1d(_req(obj, "c")).tolist()))
        if kind == "bernoulli":
            return Bernoulli(float(_req(obj, "p")))
        if kind in ("uniform", "uniform01"):
            return Uniform01()
        if kind == "exponential":
            return Exponential(float(obj.get("lambda", 1.0)))
        if kind == "pareto":
            return Pareto(float(_req(obj, "gamma")))
        if kind == "frechet":
            return Frechet(float(_req(obj, "p")))
        if kind == "lognormal":
            return LogNormal(float(_req(obj, "mu")), float(_req(obj, "sigma2")))
        if kind == "mvnexp":
            return MultiNormalExp(tuple(_req(obj, "mu")), _req(obj, "sigma"))
        if kind == "product":
            return IndependentProduct(tuple(spec_from_dict(c, base_dir) for c in _req(obj, "components")))
        if kind == "copula":
            return Copula(str(_req(obj, "variant")), int(obj.get("dim", 2)))
        if kind == "empirical":
            if "file" in obj:
                path = Path(obj["file"])
                full = path if path.is_absolute() or base_dir is None else base_dir / path
                return Empirical(SampleMatrix.from_csv(full), source=str(obj["file"]))
            return Empirical(SampleMatrix(_req(obj, "data")))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidSpecError):
            raise
        raise InvalidSpecError(f"bad parameters for {kind!r}: {exc}") from exc
    raise InvalidSpecError(f"unknown distribution type {kind!r}")


def load_spec(text_or_path: str) -> Distribution:
    """Parse a spec given inline JSON, a JSON file path, or a bare type name."""
    obj, base = _load_json(text_or_path)
    return spec_from_dict(obj, base)


def _load_json(text_or_path: str):
    s = text_or_path.strip()
    if s.startswith("{") or s.startswith("["):
        return json.loads(s), None
    path = Path(s)
    if path.exists():
        return json.loads(path.read_text(encoding="utf-8")), path.parent
    return {"type": s}, None


def iter_points(points: Iterable) -> np.ndarray:
    return np.atleast_2d(np.asarray(list(points), dtype=float))
