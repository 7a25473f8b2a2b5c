import math

import numpy as np
import pytest
from scipy import integrate, stats

from fnorm.distributions import Copula, Exponential, Frechet, IndependentProduct, Pareto, SampleMatrix, Uniform01, sample
from fnorm.empirical import (
    clt_covariance,
    clt_covariance_product,
    empirical_eval,
    empirical_pickands,
    pickands,
    simulate_limit_path,
    sup_deviation,
)
from fnorm.errors import DomainError
from fnorm.norms import make_handle


def brute_cov(ref, p1, p2):
    """Cov(y1 max(x1/y1, X), y2 max(x2/y2, X)) by direct integration against the density."""
    (x1, y1), (x2, y2) = p1, p2
    f1 = lambda s: max(x1, y1 * s)  # noqa: E731
    f2 = lambda s: max(x2, y2 * s)  # noqa: E731
    lo, hi = ref.support()
    kinks = sorted({x1 / y1, x2 / y2})

    def E(f):
        edges = [lo] + [k for k in kinks if lo < k < hi] + [hi]
        return sum(integrate.quad(lambda s: f(s) * ref.pdf(s), a, b, limit=200, epsabs=1e-13)[0] for a, b in zip(edges, edges[1:]))

    return E(lambda s: f1(s) * f2(s)) - E(f1) * E(f2)


def test_empirical_eval_is_a_mean():
    data = [[1.0], [3.0]]
    assert empirical_eval(data, [2.0, 1.0]) == pytest.approx(2.5)


@pytest.mark.parametrize(
    "spec,ref",
    [(Uniform01(), stats.uniform()), (Exponential(1.0), stats.expon()), (Frechet(4.0), stats.invweibull(c=4.0)), (Pareto(0.3), stats.pareto(b=1 / 0.3))],
    ids=lambda v: type(v).__name__,
)
def test_clt_covariance_against_brute_force(spec, ref):
    for p1, p2 in [((0.5, 1.0), (0.5, 1.0)), ((0.5, 1.0), (1.5, 2.0)), ((2.0, 1.0), (0.3, 0.5))]:
        assert clt_covariance(spec, p1, p2) == pytest.approx(brute_cov(ref, p1, p2), rel=1e-7, abs=1e-11)


def test_clt_covariance_requires_finite_variance():
    with pytest.raises(DomainError):
        clt_covariance(Pareto(0.5), (1.0, 1.0), (1.0, 1.0))
    with pytest.raises(DomainError):
        clt_covariance(Uniform01(), (0.0, 1.0), (1.0, 1.0))


def test_clt_covariance_product_matches_mc():
    spec = IndependentProduct((Uniform01(), Uniform01()))
    p = (0.5, 1.0, 1.0)
    want = clt_covariance_product(spec, p, p)
    s = sample(spec, 400_000, 4).data
    vals = np.maximum(0.5, s.max(axis=1))
    assert want == pytest.approx(vals.var(), rel=0.02)


def test_sup_deviation_bound_dominates_grid():
    spec = Exponential(1.0)
    s = sample(spec, 2000, 9)
    res = sup_deviation(s, spec, 2.0, grid_count=11)
    assert res.off_grid_bound >= res.grid_max
    fine = sup_deviation(s, spec, 2.0, grid_count=81)
    assert fine.grid_max <= res.off_grid_bound + 1e-12


def test_sup_deviation_median_decreases():
    # strict decrease for a single seed is a coin flip with this heavy tail; the median is not
    spec = Pareto(0.5)
    runs = []
    for seed in range(12):
        data = sample(spec, 10**5, 500 + seed).data
        runs.append([sup_deviation(SampleMatrix(data[:n]), spec, 2.0).grid_max for n in (10**3, 10**4, 10**5)])
    med = np.median(runs, axis=0)
    assert med[0] > med[1] > med[2]


def test_limit_path_is_seeded():
    a = simulate_limit_path(Uniform01(), [(0.5, 1.0)], 3, n_paths=64, bridge_steps=256, u_count=128)
    b = simulate_limit_path(Uniform01(), [(0.5, 1.0)], 3, n_paths=64, bridge_steps=256, u_count=128)
    assert np.array_equal(a.values, b.values)
    assert a.table()[0][:2] == (0.5, 1.0)


def test_limit_path_exponential_variance():
    spec = Exponential(1.0)
    p = (1.0, 1.0)
    path = simulate_limit_path(spec, [p], 2, n_paths=4000)
    assert float(path.covariance()) == pytest.approx(clt_covariance(spec, p, p), rel=0.1)


def test_limit_path_rejects_multivariate():
    with pytest.raises(DomainError):
        simulate_limit_path(Copula("independence", 2), [(1.0, 1.0)], 1)


def test_pickands_endpoints_and_estimate():
    h = make_handle(Copula("independence", 2))
    assert pickands(h, [0.0, 0.0]) == pytest.approx(1.0)
    s = sample(Copula("independence", 2), 50_000, 2)
    t = [0.3, 0.3]
    assert empirical_pickands(s, t) == pytest.approx(pickands(h, t), abs=0.01)
    with pytest.raises(DomainError):
        pickands(h, [0.8, 0.8])


def test_exact_value_of_uniform_covariance():
    # Var(max(1/2, U)) = 5/12 - 25/64
    assert clt_covariance(Uniform01(), (0.5, 1.0), (0.5, 1.0)) == pytest.approx(5 / 12 - 25 / 64, abs=1e-13)
    assert math.isfinite(clt_covariance(Exponential(2.0), (0.0001, 1.0), (3.0, 0.1)))
