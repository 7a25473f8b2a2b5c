"""Recovering distribution functions from F-norms.

Because ``t -> ||(t, 1/x1, ..., 1/xd)||_F`` is convex, its forward difference
quotients decrease to the right-derivative at ``t = 1``, and that derivative
is ``F(x1, ..., xd)``.  The same idea classifies bivariate norms.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NotConvexError
from .norms import FNorm

__all__ = [
    "DEFAULT_STEPS",
    "right_derivative",
    "invert_to_cdf",
    "ClassificationReport",
    "classify_2d",
    "builtin_norm",
    "WidenWindowWarning",
    "ExtremalFit",
    "extremal_coefficient",
    "extremal_fit",
]

DEFAULT_STEPS = (1e-3, 1e-4, 1e-5)


@dataclass(frozen=True)
class Derivative:
    value: float
    quotients: tuple
    monotone: bool


def right_derivative(g: Callable[[float], float], t: float, steps=DEFAULT_STEPS, noise: float = 0.0) -> Derivative:
    """Right-derivative of a convex ``g`` at ``t`` from three forward differences.

    Two rounds of Richardson extrapolation remove the O(h) and O(h^2)
    terms (the steps must shrink by a factor 10).  ``noise`` is the absolute
    accuracy of ``g``; quotients may disagree with monotonicity by that much.
    """
    if len(steps) != 3:
        raise DomainError("exactly three steps are required")
    g0 = g(t)
    quotients = tuple((g(t + h) - g0) / h for h in steps)
    d1, d2, d3 = quotients
    slack = 4.0 * (noise + 4.0 * np.finfo(float).eps * max(abs(g0), 1.0)) / min(steps) + 1e-12
    monotone = d1 >= d2 - slack and d2 >= d3 - slack
    r1 = (10.0 * d2 - d1) / 9.0
    r2 = (10.0 * d3 - d2) / 9.0
    value = (100.0 * r2 - r1) / 99.0
    return Derivative(value, quotients, monotone)


def invert_to_cdf(handle: FNorm, x, steps=DEFAULT_STEPS) -> float:
    """``F(x)`` as the right-derivative of ``t -> ||(t, 1/x)||`` at 1, clamped to [0, 1].

    Raises :class:`NotConvexError` if the difference quotients increase as
    the step shrinks, which no F-norm can produce.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != handle.dim:
        raise DomainError(f"expected {handle.dim} coordinates, got {x.size}")
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("inversion needs strictly positive, finite coordinates")
    tail = 1.0 / x
    bound = [0.0]

    def g(t):
        res = handle.evaluate(np.concatenate([[t], tail]))
        bound[0] = max(bound[0], res.error_bound if res.method != "mc" else 0.0)
        return res.value

    der = right_derivative(g, 1.0, steps, noise=0.0)
    if not der.monotone:
        # re-check allowing for the evaluator's own error bound
        der = right_derivative(g, 1.0, steps, noise=bound[0])
        if not der.monotone:
            raise NotConvexError(f"difference quotients {der.quotients} are not nonincreasing in h")
    return float(min(max(der.value, 0.0), 1.0))


# ----------------------------------------------------------------------------
# Bivariate classification
# ----------------------------------------------------------------------------


@dataclass
class ClassificationReport:
    is_fnorm: bool
    unit_value: float
    radial_symmetry_violation: float
    homogeneity_violation: float
    derivative_nonnegative: bool
    derivative_monotone: bool
    derivative_limit: float
    first_moment: float
    value_at_01: float
    mean_matches: bool
    truncation: float
    recovered_cdf: list = field(default_factory=list)
    reasons: list = field(default_factory=list)

    def to_dict(self, include_grid: bool = True):
        out = {
            "is_fnorm": self.is_fnorm,
            "unit_value": self.unit_value,
            "radial_symmetry_violation": self.radial_symmetry_violation,
            "homogeneity_violation": self.homogeneity_violation,
            "derivative_nonnegative": self.derivative_nonnegative,
            "derivative_monotone": self.derivative_monotone,
            "derivative_limit": self.derivative_limit,
            "first_moment": self.first_moment,
            "value_at_01": self.value_at_01,
            "mean_matches": self.mean_matches,
            "truncation": self.truncation,
            "reasons": list(self.reasons),
        }
        if include_grid:
            out["recovered_cdf"] = [[t, f] for t, f in self.recovered_cdf]
        return out


def builtin_norm(name: str, p: float = 2.0, scale: float = 1.0) -> Callable[[float, float], float]:
    """Reference norms on R^2: ``lp`` (order p), ``l1``, ``l2``, ``sup``; all multiplied by ``scale``."""
    name = name.lower().removeprefix("builtin:")
    if name == "l1":
        p = 1.0
        name = "lp"
    elif name == "l2":
        p = 2.0
        name = "lp"
    if name == "lp":
        if p < 1:
            raise DomainError("lp needs p >= 1")
        if math.isinf(p):
            return lambda a, b: scale * max(abs(a), abs(b))
        return lambda a, b: scale * (abs(a) ** p + abs(b) ** p) ** (1.0 / p)
    if name in ("sup", "linf", "max"):
        return lambda a, b: scale * max(abs(a), abs(b))
    raise DomainError(f"unknown builtin norm {name!r}")


def classify_2d(
    norm_eval: Callable[[float, float], float],
    grid_count: int = 201,
    limit_tol: float = 1e-3,
    mean_tol: float = 1e-4,
    t_max: float = 1e12,
    seed: int = 0,
) -> ClassificationReport:
    """Decide whether a norm on R^2 is an F-norm.

    A norm is an F-norm iff it is radially symmetric and the derivative of
    ``t -> ||(t, 1)||`` is a df on [0, inf) whose mean equals ``||(0, 1)||``.
    Every failed check adds a human-readable reason.
    """
    reasons: list[str] = []
    rng = np.random.default_rng(seed)
    probes = rng.exponential(size=(64, 2))
    signs = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)

    def n(a, b):
        return float(norm_eval(float(a), float(b)))

    unit = n(1.0, 0.0)
    if abs(unit - 1.0) > 1e-8:
        reasons.append(f"value at (1,0) is {unit:.12g}, not 1")

    sym = 0.0
    hom = 0.0
    for a, b in probes:
        base = n(a, b)
        for s in signs[1:]:
            sym = max(sym, abs(n(s[0] * a, s[1] * b) - base))
        lam = 0.5 + 2.0 * rng.random()
        hom = max(hom, abs(n(lam * a, lam * b) - lam * base) / max(1.0, lam * base))
    if sym > 1e-9:
        reasons.append(f"not radially symmetric (max deviation {sym:.3g})")
    if hom > 1e-9:
        reasons.append(f"not positively homogeneous (max relative deviation {hom:.3g})")

    def g(t):
        return n(t, 1.0)

    def deriv(t):
        # steps relative to t keep the rounding error of g(t + h) - g(t) bounded
        return right_derivative(g, t, tuple(h * max(1.0, t) for h in DEFAULT_STEPS)).value

    # grow T until the derivative is close to 1 or clearly has a limit elsewhere
    T = 8.0
    dT = deriv(T)
    prev = -math.inf
    while dT <= 1.0 - limit_tol and T < t_max:
        if abs(dT - prev) < 1e-12 and T > 1e3:
            break
        prev = dT
        T *= 2.0
        dT = deriv(T)
    # the limit of a bounded monotone derivative: look once more further out
    limit = deriv(max(T * 16.0, 1e6))

    grid = np.unique(np.concatenate([np.linspace(0.0, T, grid_count), np.geomspace(1e-3, T, 64)]))
    values = np.array([deriv(t) for t in grid])
    slack = 1e-7
    nonneg = bool(values.min() >= -slack)
    monotone = bool(np.all(np.diff(values) >= -slack))
    if not nonneg:
        reasons.append(f"derivative takes negative values (min {values.min():.3g})")
    if not monotone:
        reasons.append("derivative is not nondecreasing, so it is not a df")
    if values.max() > 1.0 + slack or limit > 1.0 + limit_tol:
        reasons.append(f"derivative exceeds 1 (tends to {limit:.6g}), so it is not a df")
    elif limit < 1.0 - limit_tol:
        reasons.append(f"derivative plateaus at {limit:.6g} < 1: mass escapes to infinity")

    # first moment of the recovered df: int_0^S (1 - g') = S - g(S) + g(0), S -> inf
    g0 = g(0.0)
    S = max(T, 1.0)
    # S - g(S) carries a rounding error of order S * eps; stop before it matters
    s_cap = min(t_max, mean_tol / (100.0 * np.finfo(float).eps * max(1.0, abs(g0))))
    moments = [S - g(S) + g0]
    converged = False
    while S < s_cap and not converged:
        S *= 4.0
        moments.append(S - g(S) + g0)
        converged = abs(moments[-1] - moments[-2]) < mean_tol / 10
    moment = moments[-1]
    if not converged and len(moments) >= 3:
        # power-law tails shrink by a fixed ratio per step: Aitken extrapolation
        d1, d2 = moments[-2] - moments[-3], moments[-1] - moments[-2]
        ratio = d2 / d1 if d1 != 0 else math.inf
        if 0.0 < ratio < 1.0:
            moment = moments[-1] + d2 * ratio / (1.0 - ratio)
    mean_ok = bool(abs(moment - g0) <= mean_tol * max(1.0, abs(g0)) and moment > 0)
    if not mean_ok:
        if abs(moment) <= mean_tol:
            reasons.append(
                f"derivative is a df with zero first moment but ||(0,1)|| = {g0:.6g}: "
                "it does not define a df with a strictly positive first moment"
            )
        else:
            reasons.append(f"first moment of the derivative ({moment:.6g}) differs from ||(0,1)|| = {g0:.6g}")

    report = ClassificationReport(
        is_fnorm=not reasons,
        unit_value=unit,
        radial_symmetry_violation=sym,
        homogeneity_violation=hom,
        derivative_nonnegative=nonneg,
        derivative_monotone=monotone,
        derivative_limit=limit,
        first_moment=moment,
        value_at_01=g0,
        mean_matches=mean_ok,
        truncation=T,
        recovered_cdf=[(float(t), float(v)) for t, v in zip(grid, values)],
        reasons=reasons,
    )
    return report


# ----------------------------------------------------------------------------
# Extremal coefficient
# ----------------------------------------------------------------------------


class WidenWindowWarning(UserWarning):
    """The fitting window is too narrow for the remainder to be resolved."""


@dataclass(frozen=True)
class ExtremalFit:
    theta: float
    raw_theta: float
    cubic: float
    window: float
    grid_count: int
    residual: float

    def to_dict(self):
        return {
            "theta": self.theta,
            "raw_theta": self.raw_theta,
            "cubic_coefficient": self.cubic,
            "window": self.window,
            "grid_count": self.grid_count,
            "max_residual": self.residual,
        }


def extremal_fit(handle: FNorm, window: float = 0.95, grid_count: int = 50, cubic: bool = True) -> ExtremalFit:
    """Least-squares fit of ``r(x) = ||(x, 1, ..., 1)|| - x ~ theta h^2 / 2 (+ kappa h^3)``, ``h = 1 - x``.

    The exact first-order term is removed before fitting.  The optional
    cubic column absorbs the next-order bias so wider windows stay accurate.
    """
    if not 0.0 < window < 1.0:
        raise DomainError("window lower end must lie in (0, 1)")
    if grid_count < 3:
        raise DomainError("grid_count must be at least 3")
    d = handle.dim
    x = np.linspace(window, 1.0, grid_count + 1)[:-1]
    h = 1.0 - x
    pts = np.column_stack([x, np.ones((x.size, d))])
    r = handle.eval_many(pts) - x
    cols = [h * h / 2.0]
    if cubic:
        cols.append(h**3)
    M = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(M, r, rcond=None)
    resid = float(np.abs(M @ coef - r).max())
    if np.abs(r).max() < 1e-12:
        warnings.warn(
            f"remainder vanishes on the window [{window}, 1); widen the window", WidenWindowWarning, stacklevel=2
        )
    raw = float(coef[0])
    return ExtremalFit(
        theta=float(min(max(raw, 1.0), d)),
        raw_theta=raw,
        cubic=float(coef[1]) if cubic else 0.0,
        window=window,
        grid_count=grid_count,
        residual=resid,
    )


def extremal_coefficient(handle: FNorm, window: float = 0.95, grid_count: int = 50) -> float:
    """Extremal coefficient ``||1||_D`` in [1, d] of a copula F-norm."""
    return extremal_fit(handle, window, grid_count).theta

