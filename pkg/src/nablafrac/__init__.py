"""Nabla fractional calculus on finite time scales."""

from nablafrac.errors import (
    DegenerateScale,
    EvalError,
    MaskedInput,
    NablaError,
    NonUniformScale,
    OrderOutOfRange,
    OutsideKappaDomain,
    ParseError,
    PointNotInScale,
    PoleOnScale,
    ReversedBounds,
    ScaleMismatch,
)
from nablafrac.expr import parse_expression, to_text
from nablafrac.fractional import (
    GLWeights,
    Kernel,
    caputo_derivative,
    gl_derivative,
    gl_weights,
    negative_order_dispatch,
    rl_derivative,
    rl_integral,
)
from nablafrac.funcspace import GridFunction, lincomb, sample
from nablafrac.gamma import gamma
from nablafrac.nabla import (
    backward_reconstruction,
    frac_nabla_derivative,
    nabla_derivative,
    nabla_derivative_n,
    nabla_integral,
)
from nablafrac.timescale import (
    TimeScale,
    explicit,
    integer_range,
    kappa_domain,
    nu,
    real_sample,
    rho,
    sigma,
    uniform_step,
)

__version__ = "0.1.0"
