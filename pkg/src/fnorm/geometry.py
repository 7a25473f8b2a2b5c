"""Positive-orthant unit spheres of F-norms and Hausdorff distances between them.

By radial symmetry the unit sphere is determined by its part in
``[0, inf)^(d+1)``, and by homogeneity every direction ``s`` is mapped onto
it by ``s / ||s||``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.special import ndtr

from . import _accel
from .distributions import Distribution
from .errors import DomainError
from .norms import FNorm, make_handle

__all__ = [
    "SpherePointCloud",
    "simplex_grid",
    "trace_sphere",
    "hr_sphere_param",
    "parse_lambda_grid",
    "hausdorff",
    "hausdorff_convergence_experiment",
]


@dataclass(frozen=True, eq=False)
class SpherePointCloud:
    points: np.ndarray
    source: str = ""
    m: int = 0
    max_residual: float = field(default=float("nan"))

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            raise DomainError("point cloud is empty")
        if np.any(pts < 0) or not np.all(np.isfinite(pts)):
            raise DomainError("sphere points must be finite and componentwise nonnegative")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            self.write_csv(fh)

    def write_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{i}" for i in range(self.dim)])
        for row in self.points:
            writer.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path, source: str | None = None) -> "SpherePointCloud":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            next(reader)
            rows = [[float(v) for v in row] for row in reader if row]
        return cls(np.array(rows), source or str(path))


def simplex_grid(k: int, m: int) -> np.ndarray:
    """All points of ``{s >= 0 : sum s = 1}`` in R^k with coordinates in ``(1/m) Z``."""
    if k < 1 or m < 1:
        raise DomainError("need k >= 1 and m >= 1")
    # stars and bars: choose k-1 bar positions among m + k - 1 slots
    rows = []
    for bars in combinations(range(m + k - 1), k - 1):
        edges = (-1,) + bars + (m + k - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(k)])
    return np.array(rows, dtype=float) / m


def trace_sphere(handle: FNorm, m: int, tol: float = 1e-9) -> SpherePointCloud:
    """Map the simplex direction grid of resolution ``m`` onto ``{x >= 0 : ||x|| = 1}``.

    Every emitted point is re-evaluated; a residual above ``tol`` is an error.
    """
    if m < 2:
        raise DomainError("m must be at least 2")
    dirs = simplex_grid(handle.dim + 1, m)
    pts = dirs / handle.eval_many(dirs)[:, None]
    resid = float(np.abs(handle.eval_many(pts) - 1.0).max())
    if resid > tol:
        raise DomainError(f"traced points miss the unit sphere by {resid:.3g} > {tol:g}")
    return SpherePointCloud(pts, handle.method, m, resid)


def hr_sphere_param(sigma: float, lambdas) -> SpherePointCloud:
    """``(1, l) / (Phi(s/2 - log(l)/s) + l Phi(s/2 + log(l)/s))`` plus (1, 0) and (0, 1).

    ``sigma = 0`` gives the sup-norm corner ``(1, l) / max(1, l)``.
    """
    lam = np.sort(np.asarray(lambdas, dtype=float))
    if lam.size == 0 or np.any(lam <= 0) or not np.all(np.isfinite(lam)):
        raise DomainError("lambda grid must be positive and finite")
    if not (math.isfinite(sigma) and sigma >= 0):
        raise DomainError("sigma must be a nonnegative real")
    if sigma == 0:
        norm = np.maximum(1.0, lam)
    else:
        ll = np.log(lam)
        norm = ndtr(sigma / 2 - ll / sigma) + lam * ndtr(sigma / 2 + ll / sigma)
    body = np.column_stack([1.0 / norm, lam / norm])
    pts = np.vstack([[1.0, 0.0], body, [0.0, 1.0]])
    return SpherePointCloud(pts, f"husler-reiss:sigma={sigma!r}", lam.size)


def parse_lambda_grid(text: str) -> np.ndarray:
    """``log:a:b:n`` (geometric), ``lin:a:b:n`` (linear) or a comma list."""
    parts = text.split(":")
    if parts[0] in ("log", "lin") and len(parts) == 4:
        a, b, n = float(parts[1]), float(parts[2]), int(parts[3])
        if parts[0] == "log":
            return np.geomspace(a, b, n)
        return np.linspace(a, b, n)
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise DomainError(f"cannot parse lambda grid {text!r}") from exc


def _directed(A, B, metric) -> float:
    if isinstance(metric, FNorm):
        best = 0.0
        chunk = max(1, 200_000 // max(len(B), 1))
        for start in range(0, len(A), chunk):
            blk = A[start : start + chunk]
            diffs = np.abs(blk[:, None, :] - B[None, :, :]).reshape(-1, A.shape[1])
            dist = metric.eval_many(diffs).reshape(len(blk), len(B))
            best = max(best, float(dist.min(axis=1).max()))
        return best
    return _accel.directed_hausdorff(A, B, _accel.METRIC_CODES[metric])


def hausdorff(a, b, metric="l2") -> float:
    """Hausdorff distance between finite clouds under ``sup``, ``l1``, ``l2`` or an F-norm handle."""
    A = a.points if isinstance(a, SpherePointCloud) else np.atleast_2d(np.asarray(a, dtype=float))
    B = b.points if isinstance(b, SpherePointCloud) else np.atleast_2d(np.asarray(b, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise DomainError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    if len(A) == 0 or len(B) == 0:
        raise DomainError("clouds must be nonempty")
    if isinstance(metric, FNorm):
        if metric.dim + 1 != A.shape[1]:
            raise DomainError("metric norm has the wrong dimension")
    elif metric not in _accel.METRIC_CODES:
        raise DomainError(f"unknown metric {metric!r}; use sup, l1, l2 or an F-norm handle")
    return max(_directed(A, B, metric), _directed(B, A, metric))


def _cloud(source, m: int) -> SpherePointCloud:
    if isinstance(source, SpherePointCloud):
        return source
    if isinstance(source, Distribution):
        source = make_handle(source)
    return trace_sphere(source, m)


def hausdorff_convergence_experiment(sequence, limit, m: int = 128, metric="l2") -> list[dict]:
    """``d_H`` between each sphere in ``sequence`` and the limit sphere.

    Items may be specs, F-norm handles or ready-made clouds.
    """
    target = _cloud(limit, m)
    rows = []
    for i, item in enumerate(sequence):
        rows.append({"index": i, "hausdorff": hausdorff(_cloud(item, m), target, metric)})
    return rows
