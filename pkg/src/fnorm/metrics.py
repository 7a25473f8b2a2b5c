"""Wasserstein distances and the F-norm Lipschitz inequality.

``| ||x||_Fn - ||x||_F | <= ||x||_inf d_W(Fn, F)``, so pointwise convergence of
F-norms and Wasserstein convergence of the dfs go together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import Distribution, Empirical, IndependentProduct
from .errors import DomainError
from .norms import FNorm, as_points, make_handle
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, adaptive_simpson, integrate

__all__ = [
    "wasserstein_1d",
    "wasserstein_product",
    "lipschitz_check",
    "wasserstein_equivalence_experiment",
]


def _discrete_atoms(spec: Distribution):
    try:
        return spec.atoms() if spec.discrete else None
    except (NotImplementedError, DomainError):
        return None


def _cum_probs(spec: Distribution) -> np.ndarray:
    at = _discrete_atoms(spec)
    if at is None:
        return np.zeros(0)
    return np.cumsum(at[1])[:-1]


def _crossings(f: Distribution, g: Distribution) -> np.ndarray:
    """Levels ``u = G(a)`` for atoms ``a`` of ``f``: kinks of ``|q_f - q_g|``."""
    at = _discrete_atoms(f)
    if at is None:
        return np.zeros(0)
    return g._cdf(at[0][:, None])


def _exact_discrete(f: Distribution, g: Distribution) -> float:
    af, pf = _discrete_atoms(f)
    ag, pg = _discrete_atoms(g)
    if isinstance(f, Empirical) and isinstance(g, Empirical) and f.sample.n == g.sample.n:
        return float(np.mean(np.abs(np.sort(f.data[:, 0]) - np.sort(g.data[:, 0]))))
    z = np.union1d(af, ag)
    Ff = np.cumsum(np.bincount(np.searchsorted(z, af), weights=pf, minlength=z.size))
    Fg = np.cumsum(np.bincount(np.searchsorted(z, ag), weights=pg, minlength=z.size))
    return float(np.sum(np.abs(Ff - Fg)[:-1] * np.diff(z)))


def _discrete_vs_continuous(f: Distribution, g: Distribution) -> float:
    """``int |F - G| dt`` with F atomic and G continuous, via ``tau(t) = E(Y - t)^+``.

    Between atoms F is a constant c; ``int G`` over a piece is its length
    minus the drop in tau, split at ``G^{-1}(c)`` where the sign changes.
    """
    z, p = _discrete_atoms(f)
    c = np.cumsum(p)
    c[-1] = 1.0
    tau = np.vectorize(lambda t: g.tail_expectation(0, float(t)), otypes=[float])

    def int_g(lo, hi):
        return (hi - lo) - (tau(lo) - tau(hi))

    # F = 0 before the first atom
    total = float(int_g(0.0, z[0])) if z[0] > 0 else 0.0
    lo, hi, level = z[:-1], z[1:], c[:-1]
    with np.errstate(divide="ignore"):
        cross = np.clip(g._ppf(level), lo, hi)
    below = level * (cross - lo) - int_g(lo, cross)
    above = int_g(cross, hi) - level * (hi - cross)
    total += float(np.sum(below + above))
    # F = 1 after the last atom
    return total + float(tau(z[-1]))


def wasserstein_1d(f: Distribution, g: Distribution, config: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``int_0^1 |q_f(u) - q_g(u)| du`` for univariate specs with finite means.

    Purely atomic pairs are merged exactly.  Otherwise ``[0, 1/2]`` is
    integrated in ``u`` and the upper half in ``s = -log(1 - u)``, where
    quantiles of heavy tails are smooth; the remaining tail is bounded by
    ``E[X; X > q]`` of both laws.
    """
    if f.dim != 1 or g.dim != 1:
        raise DomainError("wasserstein_1d needs univariate specs")
    if not (math.isfinite(f.mean()) and math.isfinite(g.mean())):
        raise DomainError("both laws need finite means")
    if f == g:
        return 0.0
    fa, ga = _discrete_atoms(f) is not None, _discrete_atoms(g) is not None
    if fa and ga:
        return _exact_discrete(f, g)
    if fa:
        return _discrete_vs_continuous(f, g)
    if ga:
        return _discrete_vs_continuous(g, f)

    levels = np.concatenate([_cum_probs(f), _cum_probs(g), _crossings(f, g), _crossings(g, f)])
    levels = levels[(levels > 0) & (levels < 1)]

    def low(u):
        return np.abs(f._ppf(u) - g._ppf(u))

    head = integrate(low, 0.0, 0.5, config, levels[levels < 0.5], tol=config.abs_tol / 2)

    def high(s):
        v = np.exp(-s)
        return np.abs(f._isf(v) - g._isf(v)) * v

    def remainder(S):
        v = math.exp(-S)
        out = 0.0
        for spec in (f, g):
            q = float(spec._isf(np.array([v]))[0])
            out += spec.tail_expectation(0, q) + q * v
        return out

    s_levels = -np.log1p(-levels[levels > 0.5])
    start = math.log(2.0)
    S = 8.0
    while remainder(S) >= config.tail_tol and S < 700.0:
        S += 8.0
    edges = np.unique(np.concatenate([[start], s_levels[s_levels < S], np.arange(start + 1.0, S, 1.0), [S]]))
    tail = adaptive_simpson(high, edges, config.abs_tol / 2, config.max_subdivisions)
    return float(head.value + tail.value)


def wasserstein_product(f: Distribution, g: Distribution, config: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Sum of coordinatewise distances for independent products of equal dimension."""

    def parts(spec):
        if isinstance(spec, IndependentProduct):
            return spec.components
        if spec.dim == 1:
            return (spec,)
        raise DomainError("wasserstein_product needs independent products")

    pf, pg = parts(f), parts(g)
    if len(pf) != len(pg):
        raise DomainError(f"dimension mismatch: {len(pf)} vs {len(pg)}")
    return float(sum(wasserstein_1d(a, b, config) for a, b in zip(pf, pg)))


def lipschitz_check(handle_a: FNorm, handle_b: FNorm, w: float, probes) -> float:
    """``max_x (|a(x) - b(x)| - ||x||_inf w)``; positive values violate the inequality."""
    if handle_a.dim != handle_b.dim:
        raise DomainError("handles have different dimensions")
    P = as_points(probes, handle_a.dim)
    gap = np.abs(handle_a.eval_many(P) - handle_b.eval_many(P))
    return float((gap - P.max(axis=1) * w).max())


@dataclass(frozen=True)
class EquivalenceRow:
    index: int
    deviation: float
    wasserstein: float
    bound: float

    @property
    def within_bound(self):
        return self.deviation <= self.bound + 1e-8

    def to_dict(self):
        return {
            "index": self.index,
            "max_deviation": self.deviation,
            "wasserstein": self.wasserstein,
            "bound": self.bound,
            "within_bound": self.within_bound,
        }


def wasserstein_equivalence_experiment(sequence, limit: Distribution, probes, config: QuadratureConfig = DEFAULT_CONFIG):
    """Tabulate the max F-norm deviation on ``probes`` next to ``d_W`` for each spec."""
    lim = make_handle(limit, config=config)
    P = as_points(probes, limit.dim)
    x_max = float(P.max())
    target = lim.eval_many(P)
    rows = []
    for i, spec in enumerate(sequence):
        if spec.dim != limit.dim:
            raise DomainError("sequence and limit dimensions differ")
        dev = float(np.abs(make_handle(spec, config=config).eval_many(P) - target).max())
        w = wasserstein_product(spec, limit, config)
        rows.append(EquivalenceRow(i, dev, w, x_max * w))
    return rows
