import math

import numpy as np
import pytest

from fnorm.errors import DomainError, IntegrationFailure, TailNotIntegrable
from fnorm.quadrature import QuadratureConfig, adaptive_simpson, integrate, integrate_tail


def test_polynomial_exact():
    res = integrate(lambda t: 3 * t**2, 0.0, 2.0)
    assert res.value == pytest.approx(8.0, abs=1e-13)


def test_kink_at_breakpoint():
    f = lambda t: np.abs(t - 0.3)  # noqa: E731
    res = integrate(f, 0.0, 1.0, breakpoints=[0.3])
    assert res.value == pytest.approx(0.045 + 0.245, abs=1e-12)


def test_jump_handled_with_breakpoint():
    f = lambda t: np.where(t < 0.5, 1.0, 2.0)  # noqa: E731
    res = integrate(f, 0.0, 1.0, breakpoints=[0.5])
    assert res.value == pytest.approx(1.5, abs=1e-12)


def test_error_bound_reported():
    res = integrate(np.sin, 0.0, math.pi, QuadratureConfig(abs_tol=1e-6))
    assert abs(res.value - 2.0) <= 1e-6
    assert res.error_bound <= 1e-6


def test_budget_exhaustion_keeps_estimate():
    f = lambda t: np.sqrt(np.abs(np.sin(50 * t)))  # noqa: E731
    with pytest.raises(IntegrationFailure) as info:
        adaptive_simpson(f, np.array([0.0, 10.0]), 1e-14, 8)
    assert math.isfinite(info.value.estimate)
    assert info.value.error_bound > 0
    assert info.value.code == "integration-failure"


def test_tail_with_remainder():
    res = integrate_tail(lambda t: np.exp(-t), 0.0, remainder=lambda T: math.exp(-T))
    assert res.value == pytest.approx(1.0, abs=1e-11)


def test_tail_without_remainder():
    res = integrate_tail(lambda t: 1.0 / (1.0 + t) ** 3, 0.0)
    assert res.value == pytest.approx(0.5, abs=1e-10)


def test_divergent_tail_raises():
    with pytest.raises(TailNotIntegrable):
        integrate_tail(lambda t: 1.0 / (1.0 + t), 0.0)


@pytest.mark.parametrize(
    "kwargs",
    [{"abs_tol": 0.0}, {"max_subdivisions": 0}, {"truncation_growth": 1.0}, {"tail_tol": -1.0}],
)
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        QuadratureConfig(**kwargs)
