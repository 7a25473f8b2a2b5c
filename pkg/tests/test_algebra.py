import math

import numpy as np
import pytest
from scipy import integrate

from fnorm.algebra import (
    LogFNorm,
    MultiNormal,
    NegativeGumbel,
    Normal,
    ProductFNorm,
    Rademacher,
    clt_fnorm_demo,
    husler_reiss_eval,
    idempotent_check,
    product_eval,
    signed_from_dict,
)
from fnorm.distributions import Bernoulli, Copula, Empirical, Exponential, Frechet, Pareto, Uniform01
from fnorm.errors import DomainError, InvalidSpecError, ProductUnavailable
from fnorm.norms import make_handle, supnorm


def test_uniform_times_uniform():
    u = make_handle(Uniform01())
    # P(UV <= t) = t - t log t, so E max(a, UV) = a + int_a^1 (1 - t + t log t) dt
    a = 0.5
    want = a + (1 - a) - (1 - a * a) / 2 - 0.25 - (a * a / 2 * math.log(a) - a * a / 4)
    assert product_eval(u, u, [a, 1.0]) == pytest.approx(want, abs=1e-10)
    coarse = integrate.dblquad(lambda v, w: max(a, w * v), 0, 1, 0, 1)[0]
    assert coarse == pytest.approx(want, abs=1e-7)


def test_exponential_times_uniform_orders_agree():
    e, u = make_handle(Exponential(1.0)), make_handle(Uniform01())
    x = [0.7, 1.3]
    left = ProductFNorm(e, u, "tonelli-left").eval(x)
    right = ProductFNorm(e, u, "tonelli-right").eval(x)
    want = integrate.dblquad(lambda s, w: max(0.7, 1.3 * w * s) * math.exp(-s), 0, 1, 0, np.inf, epsabs=1e-12)[0]
    assert left == pytest.approx(want, abs=1e-8)
    assert right == pytest.approx(want, abs=1e-8)


def test_heavy_tailed_product():
    p, f = make_handle(Pareto(0.3)), make_handle(Frechet(3.0))
    prod = ProductFNorm(p, f)
    assert prod.mean() == pytest.approx(p.mean() * f.mean())
    # at (0, 1) the norm is the mean of the product
    assert prod.eval([0.0, 1.0]) == pytest.approx(prod.mean(), rel=1e-8)


def test_atoms_preferred():
    prod = ProductFNorm(make_handle(Exponential(1.0)), make_handle(Bernoulli(0.5)))
    assert prod.describe()["integrated_against"] == "right"
    assert prod.evaluate([1.0, 1.0]).error_bound == 0.0


def test_empirical_factor():
    emp = make_handle(Empirical([[1.0], [3.0]]))
    u = make_handle(Uniform01())
    # E max(1, U * Y), Y uniform on {1, 3}
    want = 0.5 * 1.0 + 0.5 * (1.0 / 3.0 + (9 - 1) / 6.0)
    assert product_eval(u, emp, [1.0, 1.0]) == pytest.approx(want, abs=1e-12)


def test_multivariate_needs_seed():
    c = make_handle(Copula("independence", 2))
    with pytest.raises(ProductUnavailable):
        ProductFNorm(c, c)
    mc = ProductFNorm(c, c, "mc", n=200_000, seed=4)
    r = mc.evaluate([0.0, 1.0, 0.0])
    assert abs(r.value - 0.25) <= 4 * r.error_bound
    with pytest.raises(ProductUnavailable):
        ProductFNorm(c, c, "tonelli")


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        ProductFNorm(make_handle(Uniform01()), make_handle(Copula("independence", 2)))


def test_mc_reproducible():
    u = make_handle(Uniform01())
    a = ProductFNorm(u, u, "mc", n=10_000, seed=1).eval([0.2, 1.0])
    b = ProductFNorm(u, u, "mc", n=10_000, seed=1).eval([0.2, 1.0])
    assert a == b


def test_only_supnorm_is_idempotent():
    probes = [[1.0, 0.5], [0.3, 2.0], [0.0, 1.0]]
    assert idempotent_check(supnorm(1), probes).idempotent
    rep = idempotent_check(make_handle(Uniform01()), probes)
    assert not rep.idempotent and rep.max_deviation > 0.01


def test_husler_reiss():
    for s2 in (0.25, 1.0, 4.0):
        want = LogFNorm(Normal(-s2 / 2, s2)).eval([1.0, 2.0])
        assert husler_reiss_eval(s2, [1.0, 2.0]) == pytest.approx(want, abs=1e-14)
    assert husler_reiss_eval(0.0, [1.0, 2.0]) == 2.0
    assert husler_reiss_eval(1.0, [0.0, 3.0]) == 3.0
    # large sigma approaches the L1 norm
    assert husler_reiss_eval(400.0, [1.0, 2.0]) == pytest.approx(3.0, abs=1e-6)


def test_log_fnorm_special_cases():
    assert LogFNorm(NegativeGumbel()).eval([1.0, 1.0]) == pytest.approx(1 + math.exp(-1))
    assert LogFNorm(Normal(0.3, 0.0)).eval([1.0, 1.0]) == pytest.approx(math.exp(0.3))
    assert LogFNorm(Rademacher()).eval([1.0, 1.0]) == pytest.approx(0.5 + 0.5 * math.e)
    mv = LogFNorm(MultiNormal((0.0, 0.0), ((1.0, 0.5), (0.5, 1.0))), seed=3, n=200_000)
    assert mv.method == "mc"


def test_signed_round_trip():
    for s in (Normal(0.1, 2.0), NegativeGumbel(), Rademacher(), MultiNormal((0.0, 1.0), ((1.0, 0.0), (0.0, 2.0)))):
        assert signed_from_dict(s.to_dict()) == s
    with pytest.raises(InvalidSpecError):
        signed_from_dict({"type": "cauchy"})


def test_clt_demo_rows():
    rows = clt_fnorm_demo(Normal(0.0, 1.0), [1, 4], [[1.0, 1.0]], 0, reps=20_000)
    assert [r["n"] for r in rows] == [1, 4]
    assert rows[0]["deviation"] == 0.0
    assert abs(rows[0]["mc_value"] - rows[0]["limit_value"]) <= 5 * rows[0]["mc_stderr"]
    with pytest.raises(DomainError):
        clt_fnorm_demo(Normal(1.0, 1.0), [1], [[1.0, 1.0]], 0, reps=10)
