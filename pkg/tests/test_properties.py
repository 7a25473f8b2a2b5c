"""Randomized norm properties driven by hypothesis."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from fnorm.distributions import Bernoulli, Copula, Exponential, Frechet, LogNormal, Pareto, Uniform01
from fnorm.norms import bounds, make_handle

SPECS = [Bernoulli(0.4), Uniform01(), Exponential(1.3), Pareto(0.4), Frechet(2.5), LogNormal(0.2, 0.6)]
HANDLES = [(s, make_handle(s)) for s in SPECS]
coord = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
point = st.tuples(coord, coord)
which = st.integers(0, len(SPECS) - 1)


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


@settings(max_examples=200, deadline=None)
@given(which, point, point)
def test_triangle(k, x, y):
    _, h = HANDLES[k]
    s = np.add(x, y)
    assert h.eval(s) <= h.eval(x) + h.eval(y) + 1e-12 * (1 + h.eval(x) + h.eval(y))


@settings(max_examples=200, deadline=None)
@given(which, point, st.floats(-20, 20, allow_nan=False))
def test_homogeneity(k, x, lam):
    _, h = HANDLES[k]
    assert close(h.eval(np.multiply(lam, x)), abs(lam) * h.eval(x), 1e-11)


@settings(max_examples=200, deadline=None)
@given(which, point, st.tuples(st.sampled_from([-1, 1]), st.sampled_from([-1, 1])))
def test_radial_symmetry(k, x, signs):
    _, h = HANDLES[k]
    assert h.eval(np.multiply(signs, x)) == h.eval(x)


@settings(max_examples=200, deadline=None)
@given(which, point, st.tuples(st.floats(0, 10), st.floats(0, 10)))
def test_monotone_in_absolute_values(k, x, bump):
    _, h = HANDLES[k]
    ax = np.abs(x)
    assert h.eval(ax) <= h.eval(ax + np.array(bump)) + 1e-12 * (1 + h.eval(ax))


@settings(max_examples=200, deadline=None)
@given(which, point)
def test_bounds_sandwich(k, x):
    spec, h = HANDLES[k]
    lo, hi = bounds(spec, x)
    v = h.eval(x)
    assert lo - 1e-12 * (1 + v) <= v <= hi + 1e-12 * (1 + v)


@settings(max_examples=100, deadline=None)
@given(st.tuples(st.floats(0, 5), st.floats(0, 5), st.floats(0, 5)))
def test_copula_between_comonotone_and_l1(x):
    indep = make_handle(Copula("independence", 2)).eval(x)
    comon = make_handle(Copula("comonotone", 2)).eval(x)
    # comonotone is the smallest norm among copulas with these margins
    assert comon <= indep + 1e-12
    assert indep <= x[0] + 0.5 * (x[1] + x[2]) + 1e-12
