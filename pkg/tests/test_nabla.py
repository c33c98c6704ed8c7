import math

import mpmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nablafrac.errors import DegenerateScale, OrderOutOfRange, ReversedBounds
from nablafrac.funcspace import GridFunction, sample
from nablafrac.nabla import (
    backward_reconstruction,
    frac_nabla_derivative,
    nabla_derivative,
    nabla_derivative_n,
    nabla_integral,
    running_integral,
)
from nablafrac.timescale import explicit, integer_range, real_sample, uniform_step

Z = integer_range(0, 10)
HZ = uniform_step(0.5, 0, 10)


def ulps(x, y):
    return abs(x - y) / np.spacing(max(abs(x), abs(y), np.finfo(float).tiny))


def test_first_derivative_examples():
    d = nabla_derivative(sample("t^2", Z))
    assert np.array_equal(d.values, 2 * d.scale.points - 1)
    assert np.all(nabla_derivative(sample("7", Z)).values == 0)
    assert np.all(nabla_derivative(sample("t", HZ)).values == 1)


def test_higher_order():
    d2 = nabla_derivative_n(sample("t^2", HZ), 2)
    assert np.all(d2.values == 2)
    assert np.array_equal(d2.scale.points, HZ.points[2:])
    f = sample("t^2", Z)
    assert np.array_equal(nabla_derivative_n(f, 1).values, nabla_derivative(f).values)
    # third backward difference by hand
    v = f.values
    triple = v[3:] - 3 * v[2:-1] + 3 * v[1:-2] - v[:-3]
    assert np.array_equal(nabla_derivative_n(f, 3).values, triple)
    assert np.all(triple == 0)
    with pytest.raises(DegenerateScale):
        nabla_derivative_n(sample("t", explicit([0, 1, 2])), 3)


def test_nabla_integral_examples():
    g = sample("2*t-1", Z)
    assert nabla_integral(g, 0, 5) == 25
    assert nabla_integral(g, 3, 3) == 0
    with pytest.raises(ReversedBounds):
        nabla_integral(g, 5, 3)


@pytest.mark.parametrize("n", [16, 64, 256])
def test_nabla_integral_is_the_backward_rectangle_rule(n):
    # sum_{i=1..n} (i/n) (1/n) = 1/2 + 1/(2n) exactly
    val = nabla_integral(sample("t", real_sample(0, 1, n)), 0.0, 1.0)
    assert abs(val - 0.5) <= 1.0 / n
    assert val == pytest.approx(0.5 + 0.5 / n, rel=1e-14)


def test_fractional_derivative_examples():
    assert frac_nabla_derivative(sample("t^2", Z), 0.5).at(3.0) == 5.0
    d = frac_nabla_derivative(sample("t^2", HZ), 0.5).at(1.0)
    assert d == pytest.approx(1.0606601718, abs=1e-10)
    # same value from the closed form nu^(1-mu) (t + rho(t))
    assert d == pytest.approx(math.sqrt(0.5) * 1.5, rel=1e-15)
    assert np.all(frac_nabla_derivative(sample("5", HZ), 0.3).values == 0)


@pytest.mark.parametrize("mu", [0.0, -0.5, 1.5])
def test_order_range(mu):
    with pytest.raises(OrderOutOfRange):
        frac_nabla_derivative(sample("t", Z), mu)


def test_backward_reconstruction_examples():
    f = sample("t^2", Z)
    assert backward_reconstruction(f, 0.5, 3.0) == 4.0
    assert backward_reconstruction(sample("3", Z), 0.7, 6.0) == 3.0
    ts = explicit([0, 0.3, 1.1, 4])
    for t in ts.points[1:]:
        assert ulps(backward_reconstruction(sample("t", ts), 1.0, t), ts.points[list(ts.points).index(t) - 1]) <= 4


# -- properties --------------------------------------------------------------

rational_scales = st.lists(st.integers(-500, 500), min_size=2, max_size=30, unique=True).map(
    lambda xs: explicit(sorted(x / 7 for x in xs))
)


@st.composite
def scaled_functions(draw):
    ts = draw(rational_scales)
    vals = draw(st.lists(st.integers(-1000, 1000), min_size=len(ts), max_size=len(ts)))
    return GridFunction(ts, np.array(vals) / 3.0)


orders = st.floats(min_value=0.01, max_value=1.0)


@given(scaled_functions())
def test_mu_one_is_the_nabla_derivative_bitwise(f):
    assert frac_nabla_derivative(f, 1.0).values.tobytes() == nabla_derivative(f).values.tobytes()


@settings(max_examples=50)
@given(scaled_functions())
def test_fundamental_theorem(f):
    big = running_integral(f)
    d = nabla_derivative(big)
    for got, want in zip(d.values, f.values[1:]):
        assert ulps(got, want) <= 4 or abs(got - want) <= 4 * np.spacing(np.max(np.abs(big.values)) + 1) / np.min(f.scale.graininess())


@given(scaled_functions())
def test_running_integral_matches_pointwise(f):
    big = running_integral(f)
    a = f.scale.min
    for t, v in zip(f.scale.points, big.values):
        assert nabla_integral(f, a, t) == v


@given(rational_scales, st.floats(-50, 50), orders)
def test_constant_has_zero_derivative(ts, c, mu):
    d = frac_nabla_derivative(GridFunction(ts, np.full(len(ts), c)), mu)
    assert np.all(d.values == 0)


@given(rational_scales, orders)
def test_identity_function(ts, mu):
    d = frac_nabla_derivative(sample("t", ts), mu)
    with mpmath.workdps(40):
        expected = [float(mpmath.mpf(float(n)) ** (1 - mpmath.mpf(mu))) for n in ts.graininess()]
    for got, want in zip(d.values, expected):
        assert ulps(got, want) <= 4
    assert np.all(frac_nabla_derivative(sample("t", ts), 1.0).values == 1.0)


@given(scaled_functions(), orders)
def test_backward_relation(f, mu):
    for i, t in enumerate(f.scale.points[1:]):
        got = backward_reconstruction(f, mu, t)
        want = f.values[i]
        scale = max(abs(f.values[i]), abs(f.values[i + 1]))
        assert abs(got - want) <= 4 * np.spacing(scale) if scale else got == want
