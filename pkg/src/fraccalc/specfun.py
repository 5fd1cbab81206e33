"""Gamma and Beta functions used by the fractional operators and their closed forms."""

from __future__ import annotations

import math

__all__ = [
    "SpecialFunctionError",
    "PoleError",
    "GammaOverflowError",
    "gamma",
    "lgamma",
    "gamma_sign",
    "rgamma",
    "gamma_ratio",
    "beta",
]


class SpecialFunctionError(ValueError):
    pass


class PoleError(SpecialFunctionError):
    """Argument sits on a pole of Gamma (zero or a negative integer)."""


class GammaOverflowError(SpecialFunctionError, OverflowError):
    pass


def _is_pole(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _check_arg(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise SpecialFunctionError(f"gamma argument must be finite, got {x}")
    if _is_pole(x):
        raise PoleError(f"gamma has a pole at {x:g}")
    return x


def gamma(x: float) -> float:
    """Euler's Gamma function for real, non-pole arguments.

    Backed by the C library's ``tgamma`` through :func:`math.gamma`, which is
    accurate to a few ulps across the representable range.
    """
    x = _check_arg(x)
    try:
        return math.gamma(x)
    except OverflowError:
        raise GammaOverflowError(f"gamma({x:g}) exceeds the float range") from None


def lgamma(x: float) -> float:
    """log|Gamma(x)|; finite wherever Gamma itself would overflow."""
    return math.lgamma(_check_arg(x))


def gamma_sign(x: float) -> float:
    x = _check_arg(x)
    if x > 0:
        return 1.0
    # Gamma alternates sign between consecutive negative integers
    return -1.0 if math.floor(x) % 2 else 1.0


def rgamma(x: float) -> float:
    """1/Gamma(x), with the entire-function value 0 at the poles."""
    x = float(x)
    if _is_pole(x):
        return 0.0
    if x > 171.0:
        return 0.0 if x > 180.0 else math.exp(-math.lgamma(x))
    return 1.0 / gamma(x)


def gamma_ratio(p: float, q: float) -> float:
    """Gamma(p) / Gamma(q), evaluated in log space so large arguments do not overflow.

    A pole in the denominator yields 0. A pole in the numerator is an error.
    """
    _check_arg(p)
    if _is_pole(q):
        return 0.0
    if abs(p) < 170.0 and abs(q) < 170.0:
        return gamma(p) / gamma(q)
    return gamma_sign(p) * gamma_sign(q) * math.exp(math.lgamma(p) - math.lgamma(q))


def beta(a: float, b: float) -> float:
    """Euler's Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b) for a, b > 0."""
    a = float(a)
    b = float(b)
    if not (a > 0 and b > 0) or not (math.isfinite(a) and math.isfinite(b)):
        raise SpecialFunctionError(f"beta requires a > 0 and b > 0, got ({a}, {b})")
    # float addition commutes, so beta(a, b) == beta(b, a) bit for bit
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))
