"""Numerical fractional calculus: Riemann-Liouville and Caputo operators and fractional action dynamics."""

from .funcspace import (
    AnalyticFunction,
    DomainError,
    FractionalOrder,
    GridFunction,
    constant,
    exponential,
    interpolate,
    linear_combination,
    polynomial,
    power,
    sample,
    sinusoid,
)
from .fracops import (
    OperatorKind,
    OperatorRequest,
    Side,
    caputo_derivative,
    gl_derivative,
    rl_derivative,
    rl_integral,
    rl_integral_right,
)
from .specfun import beta, gamma

__version__ = "0.1.0"
