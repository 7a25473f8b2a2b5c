import numpy as np
import pytest
from scipy import integrate, stats

from fnorm.distributions import (
    Bernoulli,
    Copula,
    Degenerate,
    Empirical,
    Exponential,
    Frechet,
    IndependentProduct,
    LogNormal,
    Pareto,
    Uniform01,
)
from fnorm.errors import DomainError
from fnorm.metrics import lipschitz_check, wasserstein_1d, wasserstein_equivalence_experiment, wasserstein_product
from fnorm.norms import make_handle


def test_discrete_pairs_exact():
    assert wasserstein_1d(Bernoulli(0.2), Bernoulli(0.5)) == pytest.approx(0.3, abs=1e-15)
    assert wasserstein_1d(Degenerate((1.0,)), Degenerate((3.0,))) == pytest.approx(2.0)
    a = Empirical([[0.0], [1.0], [5.0]])
    b = Empirical([[2.0], [2.0], [2.0]])
    assert wasserstein_1d(a, b) == pytest.approx((2 + 1 + 3) / 3)


def test_empirical_against_scipy():
    rng = np.random.default_rng(1)
    x, y = rng.exponential(size=300), rng.uniform(size=200)
    want = stats.wasserstein_distance(x, y)
    assert wasserstein_1d(Empirical(x[:, None]), Empirical(y[:, None])) == pytest.approx(want, abs=1e-12)


def test_discrete_vs_continuous():
    # U vs point mass at c: c^2/2 + (1-c)^2/2
    c = 0.3
    assert wasserstein_1d(Uniform01(), Degenerate((c,))) == pytest.approx((c * c + (1 - c) ** 2) / 2, abs=1e-12)
    emp = Empirical(np.random.default_rng(2).uniform(size=(50, 1)))
    x = np.sort(emp.data[:, 0])
    grid = np.linspace(0, 1, 200_001)
    Fn = np.searchsorted(x, grid, side="right") / x.size
    want = np.trapezoid(np.abs(Fn - grid), grid)
    assert wasserstein_1d(emp, Uniform01()) == pytest.approx(want, abs=1e-5)


@pytest.mark.parametrize(
    "f,g,want",
    [
        (Pareto(0.5), Pareto(0.25), 2 - 4 / 3),
        (Exponential(1.0), Exponential(2.0), 0.5),
        (Frechet(3.0), Frechet(4.0), "cross"),
        (LogNormal(0.0, 1.0), LogNormal(0.0, 0.25), None),
    ],
    ids=["pareto", "exponential", "frechet", "lognormal"],
)
def test_continuous_pairs(f, g, want):
    if want == "cross":
        # Frechet quantiles (-log u)^(-1/p) cross at u = 1/e
        q = lambda u: abs((-np.log(u)) ** (-1 / 3) - (-np.log(u)) ** (-1 / 4))  # noqa: E731
        want = sum(integrate.quad(q, a, b, limit=400, epsabs=1e-13)[0] for a, b in [(0, 1 / np.e), (1 / np.e, 1)])
    # stochastically ordered pairs: the distance is the mean difference
    if want is None:
        want = abs(f.mean() - g.mean())
    if isinstance(f, LogNormal):
        u = np.linspace(0, 1, 2_000_001)[1:-1]
        qf = stats.lognorm(s=1.0).ppf(u)
        qg = stats.lognorm(s=0.5).ppf(u)
        want = np.trapezoid(np.abs(qf - qg), u)
        assert wasserstein_1d(f, g) == pytest.approx(want, rel=1e-3)
        return
    assert wasserstein_1d(f, g) == pytest.approx(want, abs=1e-9)


def test_symmetric_and_zero_on_equal():
    assert wasserstein_1d(Exponential(1.0), Exponential(1.0)) == 0.0
    a = wasserstein_1d(Uniform01(), Exponential(3.0))
    b = wasserstein_1d(Exponential(3.0), Uniform01())
    assert a == pytest.approx(b, abs=1e-10)


def test_requires_finite_means():
    with pytest.raises(DomainError):
        wasserstein_1d(Copula("independence", 2), Uniform01())


def test_product_distance_adds_up():
    f = IndependentProduct((Uniform01(), Exponential(1.0)))
    g = IndependentProduct((Degenerate((0.5,)), Exponential(2.0)))
    assert wasserstein_product(f, g) == pytest.approx(0.25 + 0.5, abs=1e-9)
    with pytest.raises(DomainError):
        wasserstein_product(f, Uniform01())


def test_lipschitz_inequality_holds():
    rng = np.random.default_rng(0)
    probes = rng.uniform(-3, 3, size=(500, 2))
    for f, g in [(Exponential(1.0), Uniform01()), (Pareto(0.3), Frechet(3.0)), (Bernoulli(0.4), Exponential(2.0))]:
        w = wasserstein_1d(f, g)
        assert lipschitz_check(make_handle(f), make_handle(g), w, probes) <= 1e-9


def test_equivalence_rows():
    seq = [Exponential(1.0 + 2.0**-k) for k in range(1, 6)]
    rows = wasserstein_equivalence_experiment(seq, Exponential(1.0), [[1.0, 1.0], [0.0, 2.0], [2.0, 0.5]])
    assert all(r.within_bound for r in rows)
    assert rows[-1].wasserstein < rows[0].wasserstein
    assert rows[0].to_dict()["within_bound"] is True
