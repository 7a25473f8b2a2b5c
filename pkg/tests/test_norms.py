import math

import numpy as np
import pytest
from scipy import integrate, stats

from fnorm.distributions import (
    Copula,
    Degenerate,
    Empirical,
    Exponential,
    Frechet,
    IndependentProduct,
    LogNormal,
    MultiNormalExp,
    Pareto,
    Uniform01,
)
from fnorm.errors import CdfUnavailable, DomainError
from fnorm.norms import (
    bounds,
    frechet_reduction_check,
    is_weighted_supnorm,
    make_handle,
    max_cf,
    supnorm,
)


def brute_1d(ref, x0, x1):
    """E max(x0, x1 X) by integrating against the scipy density."""
    f = lambda s: max(x0, x1 * s) * ref.pdf(s)  # noqa: E731
    lo, hi = ref.support()
    kink = x0 / x1
    pts = [kink] if lo < kink < (hi if math.isfinite(hi) else kink + 1) else None
    return integrate.quad(f, lo, hi, points=pts if math.isfinite(hi) else None, limit=400, epsabs=1e-12)[0] if math.isfinite(hi) else (
        integrate.quad(f, lo, max(kink, lo + 1), limit=400, epsabs=1e-12)[0]
        + integrate.quad(f, max(kink, lo + 1), np.inf, limit=400, epsabs=1e-12)[0]
    )


@pytest.mark.parametrize(
    "spec,ref",
    [
        (Frechet(3.0), stats.invweibull(c=3.0)),
        (Frechet(1.5), stats.invweibull(c=1.5)),
        (LogNormal(-0.5, 1.0), stats.lognorm(s=1.0, scale=math.exp(-0.5))),
        (Exponential(0.7), stats.expon(scale=1 / 0.7)),
        (Pareto(0.3), stats.pareto(b=1 / 0.3)),
    ],
    ids=lambda v: getattr(v, "__class__").__name__,
)
def test_closed_forms_against_scipy(spec, ref):
    h = make_handle(spec, "closed")
    for x0, x1 in [(1.0, 1.0), (0.3, 2.0), (2.0, 0.7), (0.0, 1.0)]:
        assert h.eval([x0, x1]) == pytest.approx(brute_1d(ref, x0, x1), rel=1e-8)


def test_independence_copula_against_dblquad():
    h = make_handle(Copula("independence", 2))
    for x in [(0.5, 1.0, 1.0), (0.2, 0.7, 1.3), (1.0, 0.4, 0.6)]:
        want = integrate.dblquad(lambda v, u: max(x[0], x[1] * u, x[2] * v), 0, 1, 0, 1, epsabs=1e-11)[0]
        assert h.eval(x) == pytest.approx(want, abs=1e-8)


def test_method_selection():
    assert make_handle(Exponential(1.0)).method == "closed"
    assert make_handle(IndependentProduct((Uniform01(), Exponential(1.0)))).method == "quad"
    assert make_handle(Empirical([[1.0], [2.0]])).method == "empirical"
    corr = MultiNormalExp((0.0, 0.0), ((1.0, 0.5), (0.5, 1.0)))
    with pytest.raises(CdfUnavailable):
        make_handle(corr)
    assert make_handle(corr, seed=1, n=1000).method == "mc"


def test_product_quadrature_against_mc():
    spec = IndependentProduct((Uniform01(), Exponential(2.0)))
    q = make_handle(spec, "quad")
    mc = make_handle(spec, "mc", n=10**6, seed=3)
    x = [0.4, 1.0, 1.5]
    est = mc.evaluate(x)
    assert abs(q.eval(x) - est.value) <= 4 * est.error_bound


def test_empirical_norm_is_sample_mean():
    data = np.array([[1.0, 0.0], [0.5, 3.0], [2.0, 2.0]])
    h = make_handle(Empirical(data))
    x = np.array([0.8, 1.0, 0.5])
    want = np.mean([max(0.8, 1.0 * a, 0.5 * b) for a, b in data])
    assert h.eval(x) == pytest.approx(want, abs=1e-15)


def test_supnorm_and_weighted_supnorm():
    assert supnorm(2).eval([1, -3, 2]) == 3.0
    assert is_weighted_supnorm(make_handle(Degenerate((2.0,))), [2.0])
    assert not is_weighted_supnorm(make_handle(Exponential(1.0)), [1.0])


def test_bounds_and_max_cf():
    lo, hi = bounds(Exponential(1.0), [1.0, 2.0])
    v = make_handle(Exponential(1.0)).eval([1.0, 2.0])
    assert lo <= v <= hi
    assert max_cf(make_handle(Exponential(1.0)), [1.0]) == pytest.approx(1 + math.exp(-1))
    with pytest.raises(DomainError):
        max_cf(make_handle(Exponential(1.0)), [-1.0])


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        make_handle(Exponential(1.0)).eval([1.0, 2.0, 3.0])
    with pytest.raises(DomainError):
        make_handle(Exponential(1.0)).eval([1.0, float("nan")])


def test_frechet_reduction():
    chk = frechet_reduction_check(3.0, [1.0, 2.0])
    assert abs(chk.lhs - chk.rhs) <= 1e-9


def test_pareto_infinite_variance_still_evaluates():
    h = make_handle(Pareto(0.9), "quad")
    assert h.eval([0.0, 1.0]) == pytest.approx(10.0, rel=1e-8)
