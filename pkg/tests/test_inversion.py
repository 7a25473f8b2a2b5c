import math
import warnings

import numpy as np
import pytest

from fnorm.distributions import Bernoulli, Copula, Degenerate, Exponential, Frechet, LogNormal
from fnorm.errors import DomainError, NotConvexError
from fnorm.inversion import (
    WidenWindowWarning,
    builtin_norm,
    classify_2d,
    extremal_fit,
    invert_to_cdf,
    right_derivative,
)
from fnorm.norms import make_handle


def test_right_derivative_of_smooth_function():
    d = right_derivative(lambda t: t**3, 1.0)
    assert d.value == pytest.approx(3.0, abs=1e-9)


def test_right_derivative_flags_concave():
    assert not right_derivative(lambda t: -(t**2), 1.0).monotone
    assert right_derivative(lambda t: t**2, 1.0).monotone


def test_inversion_of_non_norm_raises():
    class Concave:
        # sqrt is concave, so its difference quotients grow as h shrinks
        dim = 1

        def eval(self, x):
            return math.sqrt(x[0]) + x[1]

        def evaluate(self, x):
            from fnorm.norms import EvalResult

            return EvalResult(self.eval(x), "closed", 0.0)

    with pytest.raises(NotConvexError):
        invert_to_cdf(Concave(), [0.5])


def test_inversion_of_atoms_is_right_continuous():
    h = make_handle(Bernoulli(0.3))
    assert invert_to_cdf(h, [0.5]) == pytest.approx(0.7, abs=1e-9)
    assert invert_to_cdf(h, [1.0]) == pytest.approx(1.0, abs=1e-9)
    assert invert_to_cdf(make_handle(Degenerate((2.0,))), [2.0]) == pytest.approx(1.0)


def test_inversion_bivariate_copula():
    h = make_handle(Copula("independence", 2))
    assert invert_to_cdf(h, [0.4, 0.5]) == pytest.approx(0.2, abs=1e-6)


@pytest.mark.parametrize("spec", [Frechet(2.0), LogNormal(0.0, 0.5)], ids=str)
def test_inversion_matches_cdf(spec):
    h = make_handle(spec)
    for t in (0.5, 1.0, 2.5):
        assert invert_to_cdf(h, [t]) == pytest.approx(float(spec._cdf(np.array([[t]]))[0]), abs=1e-6)


def test_invert_rejects_nonpositive():
    with pytest.raises(DomainError):
        invert_to_cdf(make_handle(Exponential(1.0)), [0.0])


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_lp_norms_are_fnorms(p):
    rep = classify_2d(builtin_norm("lp", p))
    assert rep.is_fnorm, rep.reasons
    # derivative of (1 + t^p)^(1/p) at t is (1 + t^-p)^(1/p - 1)
    for t, f in rep.recovered_cdf[1::40]:
        assert f == pytest.approx((1 + t**-p) ** (1 / p - 1), abs=1e-6)


def test_sup_norm_is_an_fnorm():
    assert classify_2d(builtin_norm("sup")).is_fnorm


def test_fnorm_handle_is_classified_true():
    h = make_handle(Exponential(1.0))
    assert classify_2d(lambda a, b: h.eval([a, b])).is_fnorm


def test_half_l2_not_normalized():
    rep = classify_2d(builtin_norm("l2", scale=0.5))
    assert not rep.is_fnorm
    assert rep.reasons


def test_report_dict_optional_grid():
    rep = classify_2d(builtin_norm("l2"))
    assert "recovered_cdf" not in rep.to_dict(include_grid=False)
    assert len(rep.to_dict()["recovered_cdf"]) >= 201


def test_extremal_fit_reports_nuisance():
    fit = extremal_fit(make_handle(Copula("independence", 2)))
    assert fit.theta == pytest.approx(2.0, abs=1e-3)
    assert math.isfinite(fit.to_dict()["raw_theta"])


def test_narrow_window_warns():
    h = make_handle(Copula("comonotone", 2))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        extremal_fit(h, window=0.999999999)
    assert any(issubclass(w.category, WidenWindowWarning) for w in caught)
