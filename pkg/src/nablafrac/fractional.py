"""Grünwald-Letnikov sums, Riemann-Liouville integrals and derivatives, Caputo derivatives.

Every operator takes a base point ``a`` and acts on the part of the scale at
or after it. Inner sums run over ``s`` in ascending order through
:func:`~nablafrac.nabla.ascending_sum`, so each output value is reproducible
bit for bit regardless of how the outer loop is scheduled.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from nablafrac.errors import NablaError, NonUniformScale, OrderOutOfRange
from nablafrac.funcspace import GridFunction
from nablafrac.gamma import gamma
from nablafrac.nabla import ascending_sum, check_order, nabla_derivative, power
from nablafrac.timescale import kappa_domain

#: relative spread of the graininess tolerated by :func:`gl_derivative`
UNIFORM_RTOL = 1e-9


class Kernel(str, enum.Enum):
    """``regularized`` uses ``(t - rho(s))**(mu-1)``, ``unregularized`` uses ``(t - s)**(mu-1)``."""

    REGULARIZED = "regularized"
    UNREGULARIZED = "unregularized"


@dataclass(frozen=True, eq=False)
class GLWeights:
    mu: float
    w: np.ndarray

    def __len__(self) -> int:
        return int(self.w.size)


def gl_weights(mu: float, count: int) -> GLWeights:
    """Signed binomial weights ``w[r] = (-1)**r * binom(mu, r)`` for ``r < count``.

    Built with ``w[r] = w[r-1] * (r - 1 - mu) / r``; for a non-negative
    integer ``mu`` every weight past ``r = mu`` is exactly zero.
    """
    if count < 1:
        raise ValueError("count must be positive")
    w = np.empty(int(count))
    w[0] = 1.0
    for r in range(1, int(count)):
        w[r] = w[r - 1] * (r - 1 - mu) / r
    w.setflags(write=False)
    return GLWeights(float(mu), w)


def _base_index(f: GridFunction, a: float | None) -> int:
    return 0 if a is None else f.scale.index(a)


def _step_at(points: np.ndarray, i: int) -> float:
    return float(points[i] - points[i - 1]) if i > 0 else float(points[1] - points[0])


def _gl_value(values, points, w, i, ia, mu) -> float:
    n = i - ia
    window = values[i - n:i + 1][::-1]
    return ascending_sum(w[:n + 1] * window) / float(power(_step_at(points, i), mu))


def gl_derivative(f: GridFunction, mu: float, a: float | None = None) -> GridFunction:
    """Grünwald-Letnikov sum from base point ``a`` on a uniform scale.

    At each ``t >= a`` returns ``h**-mu * sum_{r=0..n} w[r] f(t - r h)`` with
    ``n h = t - a``. The step ``h`` is taken as the graininess at ``t`` so
    that ``mu = 1`` reproduces :func:`nabla_derivative` exactly.
    """
    if not mu > 0:
        raise OrderOutOfRange(f"Grünwald-Letnikov order must be positive, got {mu!r}")
    f.require_unmasked()
    ts = f.scale
    if not ts.is_uniform(UNIFORM_RTOL):
        raise NonUniformScale(f"{ts.label} is not uniformly spaced")
    ia = _base_index(f, a)
    w = gl_weights(mu, len(ts) - ia).w
    out = np.array([_gl_value(f.values, ts.points, w, i, ia, mu) for i in range(ia, len(ts))])
    return GridFunction(ts.tail(ia), out)


def gl_derivative_at(f: GridFunction, mu: float, t: float, a: float | None = None) -> float:
    if not mu > 0:
        raise OrderOutOfRange(f"Grünwald-Letnikov order must be positive, got {mu!r}")
    f.require_unmasked()
    ts = f.scale
    if not ts.is_uniform(UNIFORM_RTOL):
        raise NonUniformScale(f"{ts.label} is not uniformly spaced")
    ia, i = _base_index(f, a), ts.index(t)
    if i < ia:
        raise NablaError(f"t={t!r} lies before the base point")
    w = gl_weights(mu, i - ia + 1).w
    return _gl_value(f.values, ts.points, w, i, ia, mu)


def _rl_row(points, fnu, i, ia, mu, kernel) -> float:
    # s runs over points[ia+1 .. i]; fnu[j - ia - 1] = f(s_j) * nu(s_j)
    if i == ia:
        return 0.0
    t = points[i]
    if kernel is Kernel.REGULARIZED:
        lags = t - points[ia:i]
        terms = power(lags, mu - 1) * fnu[:i - ia]
    else:
        stop = i if mu < 1 else i + 1  # the s = t term is a pole for mu < 1
        lags = t - points[ia + 1:stop]
        terms = power(lags, mu - 1) * fnu[:stop - ia - 1]
    return ascending_sum(terms)


def _rl_setup(f, mu, a, kernel):
    if not mu > 0:
        raise OrderOutOfRange(f"integral order must be positive, got {mu!r}")
    f.require_unmasked()
    ia = _base_index(f, a)
    pts = f.scale.points
    fnu = f.values[ia + 1:] * f.scale.graininess()[ia:]
    return ia, pts, fnu, Kernel(kernel), gamma(mu)


def rl_integral(
    f: GridFunction,
    mu: float,
    a: float | None = None,
    kernel: Kernel | str = Kernel.REGULARIZED,
) -> GridFunction:
    """Riemann-Liouville nabla integral of order ``mu > 0``.

    ``(1/Gamma(mu)) * sum_{a < s <= t} K(t, s)**(mu-1) f(s) nu(s)`` at every
    ``t >= a``; zero at ``t = a``. With the unregularized kernel the pole term
    ``s = t`` is dropped when ``mu < 1``.
    """
    ia, pts, fnu, kernel, g = _rl_setup(f, mu, a, kernel)
    out = np.array([_rl_row(pts, fnu, i, ia, mu, kernel) / g for i in range(ia, len(pts))])
    return GridFunction(f.scale.tail(ia), out)


def rl_integral_at(
    f: GridFunction,
    mu: float,
    t: float,
    a: float | None = None,
    kernel: Kernel | str = Kernel.REGULARIZED,
) -> float:
    ia, pts, fnu, kernel, g = _rl_setup(f, mu, a, kernel)
    i = f.scale.index(t)
    if i < ia:
        raise NablaError(f"t={t!r} lies before the base point")
    return _rl_row(pts, fnu, i, ia, mu, kernel) / g


def _anchor(f: GridFunction, a: float | None) -> None:
    if a is not None and f.scale.index(a) != 0:
        raise NablaError("the base point must be the scale minimum")


def rl_derivative(f: GridFunction, mu: float, a: float | None = None) -> GridFunction:
    """``nabla o I^(1-mu)`` on the kappa domain, ``0 < mu <= 1``; ``I^0`` is the identity."""
    check_order(mu)
    _anchor(f, a)
    if mu == 1:
        return nabla_derivative(f)
    return nabla_derivative(rl_integral(f, 1 - mu, None, Kernel.REGULARIZED))


def caputo_derivative(f: GridFunction, mu: float, a: float | None = None) -> GridFunction:
    """Caputo nabla derivative on the kappa domain.

    For ``0 < mu < 1``: ``(1/Gamma(1-mu)) * sum_{a < s <= t} (t - rho(s))**-mu
    f_nabla(s) nu(s)``. ``mu = 1`` is the plain nabla derivative.
    """
    check_order(mu)
    _anchor(f, a)
    fn = nabla_derivative(f)
    if mu == 1:
        return fn
    pts = f.scale.points
    fnu = fn.values * f.scale.graininess()
    g = gamma(1 - mu)
    out = np.array([
        ascending_sum(power(pts[i] - pts[:i], -mu) * fnu[:i]) / g
        for i in range(1, len(pts))
    ])
    return GridFunction(kappa_domain(f.scale), out)


def negative_order_dispatch(
    f: GridFunction,
    mu: float,
    a: float | None = None,
    operator: str = "derivative",
) -> GridFunction:
    """Route a signed-order request.

    A derivative of negative order is the integral of order ``-mu``; an
    integral of negative order is the Riemann-Liouville derivative of order
    ``-mu``. Positive orders go to the operator named.
    """
    if mu == 0:
        raise OrderOutOfRange("order 0 is excluded")
    if operator == "derivative":
        if mu < 0:
            return rl_integral(f, -mu, a, Kernel.REGULARIZED)
        return rl_derivative(f, mu, a)
    if operator == "integral":
        if mu < 0:
            return rl_derivative(f, -mu, a)
        return rl_integral(f, mu, a, Kernel.REGULARIZED)
    raise ValueError(f"unknown operator {operator!r}")
