import math

import numpy as np
import pytest

from fnorm.distributions import Copula, Exponential, Pareto, Uniform01
from fnorm.errors import DomainError
from fnorm.geometry import (
    SpherePointCloud,
    hausdorff,
    hausdorff_convergence_experiment,
    hr_sphere_param,
    parse_lambda_grid,
    simplex_grid,
    trace_sphere,
)
from fnorm.algebra import husler_reiss_eval
from fnorm.norms import make_handle, supnorm


def test_simplex_grid_counts():
    g = simplex_grid(3, 4)
    assert g.shape == (math.comb(6, 2), 3)
    assert np.allclose(g.sum(axis=1), 1.0)
    assert simplex_grid(2, 5).tolist()[0] == [0.0, 1.0]


def test_traced_points_have_unit_norm():
    h = make_handle(Copula("independence", 2))
    cloud = trace_sphere(h, 12)
    assert np.allclose(h.eval_many(cloud.points), 1.0, atol=1e-12)
    assert cloud.dim == 3


def test_sup_sphere_is_a_square_corner():
    cloud = trace_sphere(supnorm(1), 8)
    assert np.allclose(cloud.points.max(axis=1), 1.0)


def test_hr_param_lies_on_hr_sphere():
    for sigma in (0.3, 1.0, 2.5):
        cloud = hr_sphere_param(sigma, parse_lambda_grid("log:0.01:100:33"))
        vals = [husler_reiss_eval(sigma * sigma, p) for p in cloud.points]
        assert np.allclose(vals, 1.0, atol=1e-12)


def test_hr_limits():
    lam = parse_lambda_grid("log:0.001:1000:200")
    corner = hr_sphere_param(0.0, lam)
    assert np.allclose(corner.points.max(axis=1), 1.0)
    flat = hr_sphere_param(40.0, lam)
    assert np.allclose(flat.points.sum(axis=1), 1.0, atol=1e-6)


def test_lambda_grid_forms():
    assert parse_lambda_grid("lin:1:2:3").tolist() == [1.0, 1.5, 2.0]
    assert parse_lambda_grid("0.5,2").tolist() == [0.5, 2.0]
    assert parse_lambda_grid("log:1:100:3") == pytest.approx([1, 10, 100])
    with pytest.raises(DomainError):
        parse_lambda_grid("a,b")


def test_hausdorff_basic():
    a = np.array([[0.0, 0.0]])
    b = np.array([[3.0, 4.0], [0.0, 1.0]])
    assert hausdorff(a, b, "l2") == 5.0
    assert hausdorff(a, b, "l1") == 7.0
    assert hausdorff(a, b, "sup") == 4.0
    assert hausdorff(b, b, "l2") == 0.0
    with pytest.raises(DomainError):
        hausdorff(a, b, "l7")


def test_hausdorff_with_fnorm_metric():
    a = np.array([[0.0, 0.0]])
    b = np.array([[0.0, 1.0]])
    h = make_handle(Exponential(1.0))
    assert hausdorff(a, b, h) == pytest.approx(1.0)


def test_cloud_csv_round_trip(tmp_path):
    cloud = hr_sphere_param(1.0, [0.5, 1.0, 2.0])
    cloud.to_csv(tmp_path / "c.csv")
    back = SpherePointCloud.from_csv(tmp_path / "c.csv")
    assert np.array_equal(back.points, cloud.points)
    assert (tmp_path / "c.csv").read_bytes().startswith(b"x0,x1\n")


def test_pareto_spheres_converge():
    seq = [Pareto(0.5 + 2.0**-k) for k in range(2, 6)]
    rows = hausdorff_convergence_experiment(seq, Pareto(0.5), m=64)
    d = [r["hausdorff"] for r in rows]
    assert all(x > y for x, y in zip(d, d[1:]))


def test_uniform_sphere_flat_and_curved_parts():
    cloud = trace_sphere(make_handle(Uniform01()), 64)
    x0, x1 = cloud.points.T
    assert np.all((np.abs(x0 - 1) < 1e-12) | (np.abs(x1 - 1 - np.sqrt(np.clip(1 - x0**2, 0, None))) < 1e-9))
