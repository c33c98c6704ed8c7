"""Euler gamma function via the Lanczos approximation (g = 7, 9 coefficients)."""

from __future__ import annotations

import math

_G = 7
_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma(x: float) -> float:
    """Gamma(x) for real ``x`` away from the poles at 0, -1, -2, ...

    Positive integers up to 171 return the exact factorial so that
    ``gamma(1) == 1.0`` and integer-order formulas stay exact.
    """
    x = float(x)
    if x == math.floor(x):
        if x <= 0:
            raise ValueError(f"gamma has a pole at {x!r}")
        if x <= 171:
            return float(math.factorial(int(x) - 1))
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    x -= 1.0
    acc = _COEFFS[0]
    for k in range(1, _G + 2):
        acc += _COEFFS[k] / (x + k)
    tt = x + _G + 0.5
    return math.sqrt(2.0 * math.pi) * tt ** (x + 0.5) * math.exp(-tt) * acc
