"""Riemann-Liouville, Caputo and Grunwald-Letnikov operators on grid functions.

All integrals use product-trapezoidal quadrature: the operand is replaced by
its piecewise-linear interpolant and the weakly singular kernel
``(x - t)**(alpha - 1)`` is integrated exactly against it panel by panel.
Right-sided operators are evaluated by reflecting the grid, ``t -> a + b - t``,
which turns them into left-sided ones at ``a + b - x``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import specfun
from .funcspace import (
    AnalyticFunction,
    DomainError,
    FractionalOrder,
    GridFunction,
    as_order,
    interpolate,
    linear_combination,
    sample,
)

__all__ = [
    "OperatorKind",
    "Side",
    "OperatorRequest",
    "ClosedFormResult",
    "ClearanceError",
    "DerivativeUnavailableError",
    "GridMismatchError",
    "product_trapezoid_weights",
    "rl_integral",
    "rl_integral_right",
    "rl_integral_nodes",
    "rl_derivative",
    "caputo_derivative",
    "gl_derivative",
    "apply",
    "closed_form_rl_integral_power",
    "closed_form_rl_derivative_power",
    "closed_form_caputo_power",
    "caputo_rl_relation_residual",
    "check_linearity",
    "check_semigroup",
    "check_integration_by_parts",
    "check_integer_recovery",
    "check_zero_order_limit",
]


class OperatorKind(enum.Enum):
    RL_INTEGRAL = "rl_integral"
    RL_DERIVATIVE = "rl_derivative"
    CAPUTO = "caputo"
    GRUNWALD_LETNIKOV = "gl"


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class ClearanceError(DomainError):
    """Finite-difference stencil does not fit inside the grid."""


class DerivativeUnavailableError(DomainError):
    pass


class GridMismatchError(DomainError):
    pass


@dataclass(frozen=True)
class OperatorRequest:
    kind: OperatorKind
    side: Side
    order: FractionalOrder
    terminal: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "order", as_order(self.order))


@dataclass(frozen=True)
class ClosedFormResult:
    """``coefficient * x**exponent``; kind ``zero`` is the identically-zero result."""

    kind: str
    coefficient: float
    exponent: float

    def __call__(self, x):
        if self.kind == "zero":
            return np.zeros_like(np.asarray(x, dtype=float)) + 0.0
        return self.coefficient * np.asarray(x, dtype=float) ** self.exponent


# -- quadrature kernel -------------------------------------------------------


def product_trapezoid_weights(u: np.ndarray, alpha: float) -> np.ndarray:
    """Weights w with sum_i w_i p(t_i) = integral u(t)^(alpha-1) p(t) dt over [t_0, t_last].

    ``u`` holds the kernel distances ``c - t_i`` at increasing breakpoints
    ``t_i`` (so ``u`` is decreasing and non-negative); ``p`` is linear
    between breakpoints. No 1/Gamma(alpha) factor is applied.
    """
    u_hi, u_lo = u[:-1], u[1:]
    width = u_hi - u_lo
    A = (u_hi**alpha - u_lo**alpha) / alpha
    B = (u_hi ** (alpha + 1) - u_lo ** (alpha + 1)) / (alpha + 1)
    w = np.zeros(u.size)
    w[:-1] += (B - u_lo * A) / width
    w[1:] += (u_hi * A - B) / width
    return w


def _product_trapezoid(t: np.ndarray, f: np.ndarray, x: float, alpha: float) -> float:
    """(1/Gamma(alpha)) * integral_{t[0]}^{x} (x - s)^(alpha-1) p(s) ds for breakpoints ending at x."""
    u = x - t
    u[-1] = 0.0
    return float(np.dot(product_trapezoid_weights(u, alpha), f)) * specfun.rgamma(alpha)


def _check_point(g: GridFunction, x: float) -> float:
    x = float(x)
    slack = 1e-12 * (g.b - g.a)
    if not (g.a - slack <= x <= g.b + slack):
        raise DomainError(f"evaluation point outside domain [{g.a:g}, {g.b:g}]: {x:g}")
    return min(max(x, g.a), g.b)


def _left_integral(g: GridFunction, alpha: float, x: float) -> float:
    x = _check_point(g, x)
    nodes = g.nodes
    # nodes strictly left of x; x itself closes the final (possibly partial) panel
    j = int(np.searchsorted(nodes, x - 1e-9 * g.h, side="left")) - 1
    if j < 0:
        return 0.0
    t = np.append(nodes[: j + 1], x)
    f = np.append(g.values[: j + 1], interpolate(g, x))
    return _product_trapezoid(t, f, x, alpha)


def _map(fn, x):
    if np.ndim(x) == 0:
        return fn(float(x))
    return np.array([fn(float(xi)) for xi in np.asarray(x).ravel()]).reshape(np.shape(x))


def _check_terminal(g: GridFunction, side: Side, terminal: float | None):
    expected = g.a if side is Side.LEFT else g.b
    if terminal is not None and abs(terminal - expected) > 1e-12 * (g.b - g.a):
        raise DomainError(f"{side.value} terminal must be the grid endpoint {expected:g}, got {terminal:g}")


# -- Riemann-Liouville integrals ---------------------------------------------


def rl_integral(f: GridFunction, alpha, x):
    """Left Riemann-Liouville integral of order ``alpha`` from ``f.a`` to ``x``.

    For alpha = 1 this is exactly the composite trapezoid rule.
    """
    order = as_order(alpha)
    return _map(lambda xi: _left_integral(f, order.alpha, xi), x)


def rl_integral_right(f: GridFunction, alpha, x):
    """Right Riemann-Liouville integral, kernel ``(t - x)**(alpha - 1)`` over ``[x, f.b]``."""
    order = as_order(alpha)
    r = f.reflect()
    return _map(lambda xi: _left_integral(r, order.alpha, f.a + f.b - xi), x)


def rl_integral_nodes(f: GridFunction, alpha, side: Side = Side.LEFT) -> GridFunction:
    """The integral evaluated at every node, as a new grid function (zero at the terminal)."""
    order = as_order(alpha)
    src = f if side is Side.LEFT else f.reflect()
    vals = np.zeros(f.n_points)
    nodes = src.nodes
    for i in range(1, f.n_points):
        vals[i] = _product_trapezoid(nodes[: i + 1].copy(), src.values[: i + 1], nodes[i], order.alpha)
    out = GridFunction(f.a, f.b, vals)
    return out if side is Side.LEFT else out.reflect()


# -- derivatives -------------------------------------------------------------


def _fd_weights(offsets: Sequence[int], k: int) -> np.ndarray:
    """Weights w with sum_j w_j F(x + s_j h) ~ h^k F^(k)(x)."""
    s = np.asarray(offsets, dtype=float)
    V = np.vander(s, increasing=True).T
    rhs = np.zeros(len(s))
    rhs[k] = math.factorial(k)
    return np.linalg.solve(V, rhs)


def _stencil(x: float, a: float, b: float, h: float, k: int) -> list[int]:
    tol = 1e-9 * h
    p = (k + 1) // 2
    if x - p * h >= a - tol and x + p * h <= b + tol:
        return list(range(-p, p + 1))
    if x - (k + 1) * h >= a - tol:
        return list(range(-(k + 1), 1))
    if x + (k + 1) * h <= b + tol:
        return list(range(0, k + 2))
    raise ClearanceError(
        f"x={x:g} lacks clearance for a {k}-th difference with h={h:g} on [{a:g}, {b:g}]"
    )


def _differentiate(F, x: float, a: float, b: float, h: float, k: int) -> float:
    offsets = _stencil(x, a, b, h, k)
    w = _fd_weights(offsets, k)
    pts = np.clip(x + h * np.asarray(offsets, dtype=float), a, b)
    return float(sum(wi * F(p) for wi, p in zip(w, pts)) / h**k)


def _rl_derivative_left(f: GridFunction, order: FractionalOrder, x: float) -> float:
    x = _check_point(f, x)
    if not x > f.a:
        raise DomainError(f"left derivative needs x > a={f.a:g}, got {x:g}")
    if order.is_integer:
        k = int(order.alpha)
        return _differentiate(lambda y: interpolate(f, y), x, f.a, f.b, f.h, k)
    n = order.n
    gamma_ = n - order.alpha
    return _differentiate(lambda y: _left_integral(f, gamma_, y), x, f.a, f.b, f.h, n)


def rl_derivative(f: GridFunction, alpha, x, side: Side = Side.LEFT):
    """Riemann-Liouville derivative: n-th derivative of the order ``n - alpha`` integral.

    The outer derivative is a second-order finite difference with step equal to
    the grid spacing, central where the stencil fits and one-sided at the
    far edge. Integer ``alpha`` differentiates ``f`` directly. The right-sided
    operator ``(-d/dx)^n I_{b-}^{n-alpha}`` is the left one on the reflected grid.
    """
    order = as_order(alpha)
    if side is Side.LEFT:
        return _map(lambda xi: _rl_derivative_left(f, order, xi), x)
    r = f.reflect()
    return _map(lambda xi: _rl_derivative_left(r, order, f.a + f.b - xi), x)


def caputo_derivative(f: AnalyticFunction, alpha, x, grid: tuple[float, float, int], side: Side = Side.LEFT):
    """Caputo derivative: order ``n - alpha`` integral of the exact n-th derivative of ``f``.

    ``grid = (a, b, n_points)`` is where the derivative is sampled.
    """
    if not isinstance(f, AnalyticFunction):
        raise DerivativeUnavailableError("Caputo derivative needs an analytic function with exact derivatives")
    order = as_order(alpha)
    a, b, n_points = grid
    if order.is_integer:
        k = int(order.alpha)
        return (-1.0 if side is Side.RIGHT and k % 2 else 1.0) * f.derivative(k, x)
    n = order.n
    sign = -1.0 if side is Side.RIGHT and n % 2 else 1.0
    if not f.domain_ok(a, b):
        raise DomainError(f"{f} is not defined on all of [{a}, {b}]")
    nodes = GridFunction(a, b, np.zeros(int(n_points))).nodes
    dn = np.asarray(f.derivative(n, nodes), dtype=float)
    if not np.all(np.isfinite(dn)):
        raise DerivativeUnavailableError(f"derivative of order {n} of {f} is not finite on [{a}, {b}]")
    d = GridFunction(a, b, dn)
    if side is Side.LEFT:
        xs = np.asarray(x, dtype=float)
        if np.any(xs <= a):
            raise DomainError(f"left Caputo derivative needs x > a={a:g}")
        return rl_integral(d, n - order.alpha, x)
    xs = np.asarray(x, dtype=float)
    if np.any(xs >= b):
        raise DomainError(f"right Caputo derivative needs x < b={b:g}")
    return sign * rl_integral_right(d, n - order.alpha, x)


def _gl_left(f: GridFunction, alpha: float, x: float) -> float:
    i = f.node_index(x)
    if i is None:
        raise DomainError(f"Grunwald-Letnikov evaluation needs a grid node, got x={x:g}")
    if i == 0:
        raise DomainError(f"Grunwald-Letnikov evaluation needs x > a={f.a:g}")
    k = np.arange(1, i + 1)
    # generalized binomial C(alpha, k) by C(alpha, k) = C(alpha, k-1) * (alpha - k + 1) / k
    binom = np.concatenate(([1.0], np.cumprod((alpha - k + 1) / k)))
    signed = binom * np.where(np.arange(i + 1) % 2, -1.0, 1.0)
    window = f.values[i::-1]
    return float(np.dot(signed, window)) * f.h ** (-alpha)


def gl_derivative(f: GridFunction, alpha, x, side: Side = Side.LEFT):
    """Grunwald-Letnikov backward-difference derivative at grid nodes; first-order accurate."""
    order = as_order(alpha)
    if side is Side.LEFT:
        return _map(lambda xi: _gl_left(f, order.alpha, xi), x)
    r = f.reflect()
    return _map(lambda xi: _gl_left(r, order.alpha, f.a + f.b - xi), x)


def apply(req: OperatorRequest, f, x, grid: tuple[float, float, int] | None = None):
    """Dispatch an :class:`OperatorRequest`.

    ``f`` may be a grid function or an analytic one; analytic operands are
    sampled on ``grid`` for the grid-based operators. Caputo requires an
    analytic operand and a grid.
    """
    if req.kind is OperatorKind.CAPUTO:
        if grid is None:
            raise DomainError("Caputo evaluation needs a (a, b, n_points) grid")
        _check_terminal(GridFunction(grid[0], grid[1], [0.0, 0.0]), req.side, req.terminal)
        return caputo_derivative(f, req.order, x, grid, req.side)
    if isinstance(f, AnalyticFunction):
        if grid is None:
            raise DomainError("analytic operand needs a (a, b, n_points) grid to be sampled on")
        f = sample(f, *grid)
    _check_terminal(f, req.side, req.terminal)
    if req.kind is OperatorKind.RL_INTEGRAL:
        if req.side is Side.LEFT:
            return rl_integral(f, req.order, x)
        return rl_integral_right(f, req.order, x)
    if req.kind is OperatorKind.RL_DERIVATIVE:
        return rl_derivative(f, req.order, x, req.side)
    return gl_derivative(f, req.order, x, req.side)


# -- closed forms at terminal 0 ----------------------------------------------


def closed_form_rl_integral_power(m: float, alpha) -> ClosedFormResult:
    """I^alpha x^m = Gamma(m+1)/Gamma(m+alpha+1) x^(m+alpha), m > -1."""
    order = as_order(alpha)
    if not m > -1:
        raise DomainError(f"power-law rule needs m > -1, got {m}")
    coeff = specfun.gamma_ratio(m + 1, m + order.alpha + 1)
    return ClosedFormResult("power", coeff, m + order.alpha)


def closed_form_rl_derivative_power(m: float, alpha) -> ClosedFormResult:
    """D^alpha x^m = Gamma(m+1)/Gamma(m-alpha+1) x^(m-alpha), m > -1; zero when 1/Gamma hits a pole."""
    order = as_order(alpha)
    if not m > -1:
        raise DomainError(f"power-law rule needs m > -1, got {m}")
    coeff = specfun.gamma_ratio(m + 1, m - order.alpha + 1)
    if coeff == 0.0:
        return ClosedFormResult("zero", 0.0, 0.0)
    return ClosedFormResult("power", coeff, m - order.alpha)


def closed_form_caputo_power(m: float, alpha) -> ClosedFormResult:
    order = as_order(alpha)
    n = order.n if not order.is_integer else int(order.alpha)
    if m == math.floor(m) and 0 <= m < n:
        return ClosedFormResult("zero", 0.0, 0.0)
    if not m > n - 1:
        raise DomainError(f"Caputo derivative of x**{m} of order {order.alpha} is not integrable at 0")
    return closed_form_rl_derivative_power(m, order)


def caputo_rl_relation_residual(f: AnalyticFunction, alpha, x: float, grid: tuple[float, float, int] | None = None) -> float:
    """RL(f)(x) - [Caputo(f)(x) + sum_{k<n} f^(k)(0) x^(k-alpha) / Gamma(k-alpha+1)], terminal 0.

    ``grid`` defaults to ``(0, x, 1025)``.
    """
    order = as_order(alpha)
    if order.is_integer:
        raise DomainError("the Caputo/RL relation is stated for non-integer order")
    if not x > 0:
        raise DomainError(f"relation is evaluated at x > 0, got {x}")
    grid = grid or (0.0, float(x), 1025)
    if grid[0] != 0.0:
        raise DomainError("the Caputo/RL relation is implemented for terminal a = 0")
    rl = rl_derivative(sample(f, *grid), order, x)
    cap = caputo_derivative(f, order, x, grid)
    correction = sum(
        f.derivative(k, 0.0) * x ** (k - order.alpha) * specfun.rgamma(k - order.alpha + 1)
        for k in range(order.n)
    )
    return float(rl - (cap + correction))


# -- property checks ---------------------------------------------------------


def check_linearity(req: OperatorRequest, f, g, c: float, xs, grid: tuple[float, float, int] | None = None) -> float:
    """max |op(c f +- g) - (c op f +- op g)| over ``xs`` and both signs."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if isinstance(f, GridFunction) and isinstance(g, GridFunction):
        if not f.same_grid(g):
            raise GridMismatchError("linearity check needs f and g on the same grid")
        combos = {s: f.with_values(c * f.values + s * g.values) for s in (1.0, -1.0)}
    elif isinstance(f, AnalyticFunction) and isinstance(g, AnalyticFunction):
        combos = {s: linear_combination((c, f), (s, g)) for s in (1.0, -1.0)}
    else:
        raise GridMismatchError("linearity check needs two grid functions or two analytic functions")
    of = np.asarray(apply(req, f, xs, grid))
    og = np.asarray(apply(req, g, xs, grid))
    dev = 0.0
    for s, h in combos.items():
        oh = np.asarray(apply(req, h, xs, grid))
        dev = max(dev, float(np.max(np.abs(oh - (c * of + s * og)))))
    return dev


def check_semigroup(f: GridFunction, alpha, beta, x: float) -> float:
    """|I^alpha(I^beta f)(x) - I^(alpha+beta) f(x)|; the inner integral is tabulated on the full grid."""
    a_, b_ = as_order(alpha), as_order(beta)
    inner = rl_integral_nodes(f, b_)
    lhs = rl_integral(inner, a_, x)
    rhs = rl_integral(f, a_.alpha + b_.alpha, x)
    return abs(lhs - rhs)


def check_integration_by_parts(f: GridFunction, g: GridFunction, alpha) -> float:
    """|int_a^b (I_{a+} f) g - int_a^b f (I_{b-} g)|, both outer integrals by the trapezoid rule."""
    if not f.same_grid(g):
        raise GridMismatchError("integration by parts needs f and g on the same grid")
    left = rl_integral_nodes(f, alpha, Side.LEFT).values * g.values
    right = f.values * rl_integral_nodes(g, alpha, Side.RIGHT).values
    return abs(float(np.trapezoid(left, dx=f.h) - np.trapezoid(right, dx=f.h)))


def check_integer_recovery(
    f: AnalyticFunction, n: int, x: float, grid: tuple[float, float, int], side: Side = Side.LEFT
) -> float:
    if int(n) != n or n < 1:
        raise DomainError(f"integer recovery needs a positive integer order, got {n}")
    g = sample(f, *grid)
    target = f.derivative(int(n), x) * ((-1.0) ** n if side is Side.RIGHT else 1.0)
    return abs(rl_derivative(g, n, x, side) - target)


def check_zero_order_limit(f: GridFunction, x: float, p_sequence: Sequence[float], side: Side = Side.LEFT) -> np.ndarray:
    ps = np.asarray(p_sequence, dtype=float)
    if np.any(ps <= 0) or np.any(ps >= 1) or np.any(np.diff(ps) >= 0):
        raise DomainError("p_sequence must be strictly decreasing inside (0, 1)")
    fx = interpolate(f, x)
    return np.array([abs(rl_derivative(f, p, x, side) - fx) for p in ps])
