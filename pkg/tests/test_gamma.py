import math

import numpy as np
import pytest

from nablafrac.gamma import gamma


def test_relative_accuracy_on_working_range():
    xs = np.linspace(0.1, 30, 5001)
    err = max(abs(gamma(x) / math.gamma(x) - 1) for x in xs)
    assert err <= 1e-12


@pytest.mark.parametrize("x", [-0.5, -1.5, -2.25, 0.25])
def test_reflection_branch(x):
    assert gamma(x) == pytest.approx(math.gamma(x), rel=1e-12)


def test_integers_are_exact_factorials():
    assert gamma(1) == 1.0
    assert gamma(2) == 1.0
    assert gamma(6) == 120.0


def test_half_integer():
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)


@pytest.mark.parametrize("x", [0, -1, -3])
def test_poles(x):
    with pytest.raises(ValueError):
        gamma(x)
