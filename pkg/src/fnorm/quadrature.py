"""Vectorized adaptive Simpson quadrature with tail truncation.

All intervals of one refinement level are evaluated in a single call of the
integrand, so integrands should accept and return 1-D numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError, IntegrationFailure, TailNotIntegrable

__all__ = ["QuadratureConfig", "QuadResult", "adaptive_simpson", "integrate", "integrate_tail"]


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    max_subdivisions: int = 10_000
    truncation_growth: float = 2.0
    tail_tol: float = 1e-12

    def __post_init__(self):
        if not (0 < self.abs_tol < 1):
            raise DomainError("abs_tol must lie in (0, 1)")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be positive")
        if not self.truncation_growth > 1:
            raise DomainError("truncation_growth must exceed 1")
        if not self.tail_tol > 0:
            raise DomainError("tail_tol must be positive")

    def to_dict(self):
        return {
            "abs_tol": self.abs_tol,
            "max_subdivisions": self.max_subdivisions,
            "truncation_growth": self.truncation_growth,
            "tail_tol": self.tail_tol,
        }


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_bound: float
    subdivisions: int = 0


def adaptive_simpson(f: Callable, edges, tol: float, max_subdivisions: int) -> QuadResult:
    """Integrate ``f`` over ``[edges[0], edges[-1]]`` split at every edge.

    Each initial piece gets ``tol / K``; a bisected piece hands half its
    budget to each child.  Endpoint values are taken one ulp inside the
    piece, so jumps located exactly at an edge are integrated correctly.
    """
    edges = np.unique(np.asarray(edges, dtype=np.float64))
    if edges.size < 2:
        return QuadResult(0.0, 0.0, 0)
    if not np.all(np.isfinite(edges)):
        raise DomainError("adaptive_simpson needs finite edges")
    a = edges[:-1]
    b = edges[1:]
    k = a.size
    m = 0.5 * (a + b)
    fa = np.asarray(f(np.nextafter(a, b)), dtype=np.float64)
    fb = np.asarray(f(np.nextafter(b, a)), dtype=np.float64)
    fm = np.asarray(f(m), dtype=np.float64)
    tols = np.full(k, tol / k)

    total = 0.0
    err_total = 0.0
    n_sub = 0
    while a.size:
        h = b - a
        left = 0.5 * (a + m)
        right = 0.5 * (m + b)
        vals = np.asarray(f(np.concatenate([left, right])), dtype=np.float64)
        fl = vals[: a.size]
        fr = vals[a.size :]
        s1 = h / 6.0 * (fa + 4.0 * fm + fb)
        s2 = h / 12.0 * (fa + 4.0 * fl + 2.0 * fm + 4.0 * fr + fb)
        err = np.abs(s2 - s1) / 15.0
        if not np.all(np.isfinite(s2)):
            raise IntegrationFailure("integrand produced non-finite values", total, math.inf)
        # pieces too narrow to bisect are accepted as they are
        tiny = h <= 64 * np.spacing(np.maximum(np.abs(a), np.abs(b)))
        done = (err <= tols) | tiny
        total += float(np.sum(s2[done] + (s2[done] - s1[done]) / 15.0))
        err_total += float(np.sum(err[done]))
        rest = ~done
        if not rest.any():
            break
        n_sub += int(rest.sum())
        if n_sub > max_subdivisions:
            estimate = total + float(np.sum(s2[rest]))
            bound = err_total + float(np.sum(err[rest]))
            raise IntegrationFailure(
                f"adaptive quadrature exceeded {max_subdivisions} subdivisions", estimate, bound
            )
        a, m, b = (
            np.concatenate([a[rest], m[rest]]),
            np.concatenate([left[rest], right[rest]]),
            np.concatenate([m[rest], b[rest]]),
        )
        fa, fm, fb = (
            np.concatenate([fa[rest], fm[rest]]),
            np.concatenate([fl[rest], fr[rest]]),
            np.concatenate([fm[rest], fb[rest]]),
        )
        half = tols[rest] / 2.0
        tols = np.concatenate([half, half])
    return QuadResult(total, err_total, n_sub)


def _edges(a: float, b: float, breakpoints: Iterable[float]) -> np.ndarray:
    bp = np.asarray(list(breakpoints), dtype=np.float64)
    bp = bp[np.isfinite(bp) & (bp > a) & (bp < b)]
    return np.concatenate([[a], bp, [b]])


def integrate(f: Callable, a: float, b: float, config: QuadratureConfig = DEFAULT_CONFIG, breakpoints=(), tol=None) -> QuadResult:
    """Integral of ``f`` over a finite interval, split at ``breakpoints``."""
    if b <= a:
        return QuadResult(0.0, 0.0, 0)
    tol = config.abs_tol if tol is None else tol
    return adaptive_simpson(f, _edges(a, b, breakpoints), tol, config.max_subdivisions)


def _geometric_edges(start: float, stop: float, growth: float) -> np.ndarray:
    n = max(1, math.ceil(math.log(stop / start) / math.log(growth)))
    return start * growth ** np.arange(n + 1, dtype=np.float64)


def integrate_tail(
    f: Callable,
    a: float,
    config: QuadratureConfig = DEFAULT_CONFIG,
    breakpoints=(),
    remainder: Callable[[float], float] | None = None,
    start: float | None = None,
    tol=None,
) -> QuadResult:
    """Integral of a nonnegative, eventually decaying ``f`` over ``[a, inf)``.

    With ``remainder`` (an upper bound for the integral beyond T) the cutoff
    T grows geometrically until the bound drops below ``tail_tol`` and
    ``[anchor, T]`` is integrated at once in ``log t``.  Without it, successive geometric
    segments are integrated until one contributes less than ``tail_tol``;
    segments that stop shrinking raise :class:`TailNotIntegrable`.
    """
    tol = config.abs_tol if tol is None else tol
    growth = config.truncation_growth
    bp = np.asarray(list(breakpoints), dtype=np.float64)
    bp = bp[np.isfinite(bp)]
    anchor = max(a, float(bp.max()) if bp.size else a, start or 0.0)
    if anchor <= 0:
        anchor = 1.0
    # both branches integrate [a, anchor] with the breakpoints first
    head = integrate(f, a, anchor, config, bp, tol / 2)

    if remainder is not None:
        T = anchor
        steps = 0
        while remainder(T) >= config.tail_tol:
            T *= growth
            steps += 1
            if steps > 5000 or not math.isfinite(T):
                raise TailNotIntegrable("analytic tail bound does not decay", head.value, math.inf)
        if T == anchor:
            return QuadResult(head.value, head.error_bound + remainder(T), head.subdivisions)
        # in s = log t power-law tails become smooth exponentials
        def g(s):
            t = np.exp(s)
            return f(t) * t

        edges = np.log(_geometric_edges(anchor, T, growth))
        # four starting pieces per step so fast early decay is not missed
        edges = np.concatenate([np.linspace(a, b, 4, endpoint=False) for a, b in zip(edges[:-1], edges[1:])] + [edges[-1:]])
        body = adaptive_simpson(g, edges, tol / 2, config.max_subdivisions)
        return QuadResult(
            head.value + body.value,
            head.error_bound + body.error_bound + remainder(T),
            head.subdivisions + body.subdivisions,
        )

    total = head.value
    err = head.error_bound
    subs = head.subdivisions
    lo = anchor
    prev = math.inf
    stalls = 0
    for _ in range(5000):
        hi = lo * growth
        seg = integrate(f, lo, hi, config, (), tol / 4)
        total += seg.value
        err += seg.error_bound
        subs += seg.subdivisions
        if abs(seg.value) < config.tail_tol:
            return QuadResult(total, err, subs)
        stalls = stalls + 1 if abs(seg.value) >= prev else 0
        if stalls >= 8:
            break
        prev = abs(seg.value)
        lo = hi
    raise TailNotIntegrable(
        "segment contributions are not decreasing; the tail does not look integrable", total, math.inf
    )
