"""Operand representations: uniform-grid samples and analytic functions with exact derivatives."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "DomainError",
    "FractionalOrder",
    "GridFunction",
    "AnalyticFunction",
    "constant",
    "power",
    "polynomial",
    "exponential",
    "sinusoid",
    "linear_combination",
    "sample",
    "interpolate",
]


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class FractionalOrder:
    """A real order alpha > 0 and its integer ceiling n = floor(alpha) + 1."""

    alpha: float
    n: int = field(init=False)

    def __post_init__(self):
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or alpha <= 0:
            raise DomainError(f"fractional order must be finite and > 0, got {self.alpha}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "n", int(math.floor(alpha)) + 1)

    @property
    def is_integer(self) -> bool:
        return self.alpha == math.floor(self.alpha)

    def __float__(self) -> float:
        return self.alpha


def as_order(alpha) -> FractionalOrder:
    return alpha if isinstance(alpha, FractionalOrder) else FractionalOrder(alpha)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples ``values[i] = f(a + i*h)`` on a uniform grid over ``[a, b]``."""

    a: float
    b: float
    values: np.ndarray

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise DomainError("a grid function needs at least two samples")
        if not (math.isfinite(a) and math.isfinite(b)) or not b > a:
            raise DomainError(f"grid requires finite a < b, got [{a}, {b}]")
        if not np.all(np.isfinite(values)):
            raise DomainError("grid samples must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "values", values)

    @property
    def n_points(self) -> int:
        return self.values.size

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n_points - 1)

    @property
    def nodes(self) -> np.ndarray:
        xs = self.a + self.h * np.arange(self.n_points)
        xs[-1] = self.b
        return xs

    def __call__(self, x):
        return interpolate(self, x)

    def same_grid(self, other: "GridFunction") -> bool:
        return (self.a, self.b, self.n_points) == (other.a, other.b, other.n_points)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.a, self.b, values)

    def reflect(self) -> "GridFunction":
        """Samples of ``f(a + b - t)`` on the same grid."""
        return GridFunction(self.a, self.b, self.values[::-1].copy())

    def node_index(self, x: float, rtol: float = 1e-9) -> int | None:
        """Index of the node at ``x``, or None when ``x`` falls between nodes."""
        k = (x - self.a) / self.h
        i = int(round(k))
        if 0 <= i < self.n_points and abs(k - i) <= rtol * max(1.0, abs(k)):
            return i
        return None

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("x,value\n")
        for x, v in zip(self.nodes, self.values):
            buf.write(f"{x:.17g},{v:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GridFunction":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["x", "value"]:
            raise DomainError("grid CSV must start with the header 'x,value'")
        data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
        if data.ndim != 2 or data.shape[0] < 2 or data.shape[1] != 2:
            raise DomainError("grid CSV needs at least two 'x,value' rows")
        xs = data[:, 0]
        steps = np.diff(xs)
        h = (xs[-1] - xs[0]) / (xs.size - 1)
        if np.any(steps <= 0) or np.max(np.abs(steps - h)) > 1e-9 * max(1.0, abs(h)):
            raise DomainError("grid CSV abscissae must be uniformly spaced and increasing")
        return cls(xs[0], xs[-1], data[:, 1])


def _falling_factorial(m: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= m - j
    return out


@dataclass(frozen=True)
class AnalyticFunction:
    """A closed-form function from a small registry, with exact derivatives of any order.

    ``kind`` is one of ``constant``, ``power``, ``polynomial``, ``exponential``,
    ``sinusoid`` or ``sum``. Use the module-level constructors rather than
    building instances by hand.
    """

    kind: str
    params: tuple

    def value(self, x):
        return self.derivative(0, x)

    def __call__(self, x):
        return self.value(x)

    def domain_ok(self, lo: float, hi: float) -> bool:
        if self.kind == "power":
            m = self.params[0]
            if m == math.floor(m):
                return m >= 0 or not (lo <= 0 <= hi)
            return lo >= 0 if m > 0 else lo > 0
        if self.kind == "sum":
            return all(f.domain_ok(lo, hi) for _, f in self.params)
        return True

    def derivative(self, k: int, x):
        if k < 0 or int(k) != k:
            raise ValueError(f"derivative order must be a non-negative integer, got {k}")
        k = int(k)
        x = np.asarray(x, dtype=float)
        kind, p = self.kind, self.params
        if kind == "constant":
            out = np.full_like(x, p[0] if k == 0 else 0.0)
        elif kind == "power":
            m = p[0]
            if m == math.floor(m) and 0 <= m < k:
                out = np.zeros_like(x)
            elif m == math.floor(m):
                with np.errstate(divide="ignore"):
                    out = _falling_factorial(m, k) * x ** float(m - k)
            else:
                if np.any(x < 0):
                    raise DomainError(f"x**{m} is undefined for x < 0")
                with np.errstate(divide="ignore"):
                    out = _falling_factorial(m, k) * x ** (m - k)
        elif kind == "polynomial":
            coeffs = np.polynomial.polynomial.polyder(np.asarray(p, dtype=float), k) if k else np.asarray(p)
            out = np.polynomial.polynomial.polyval(x, coeffs) if len(p) > k else np.zeros_like(x)
        elif kind == "exponential":
            lam = p[0]
            out = lam**k * np.exp(lam * x)
        elif kind == "sinusoid":
            w = p[0]
            # d^k/dx^k sin(wx) = w^k sin(wx + k*pi/2); reduce k mod 4 to keep the phase exact
            r = k % 4
            base = np.sin(w * x) if r in (0, 2) else np.cos(w * x)
            out = w**k * (base if r in (0, 1) else -base)
        elif kind == "sum":
            out = np.zeros_like(x)
            for c, f in p:
                out = out + c * f.derivative(k, x)
        else:
            raise ValueError(f"unknown analytic kind {kind!r}")
        return out if out.ndim else float(out)

    def __str__(self):
        if self.kind == "sum":
            return " + ".join(f"{c:g}*({f})" for c, f in self.params)
        names = {"constant": "const", "power": "pow", "polynomial": "poly", "exponential": "exp", "sinusoid": "sin"}
        return f"{names[self.kind]}:" + ",".join(f"{v:g}" for v in self.params)


def constant(c: float) -> AnalyticFunction:
    return AnalyticFunction("constant", (float(c),))


def power(m: float) -> AnalyticFunction:
    return AnalyticFunction("power", (float(m),))


def polynomial(coeffs: Sequence[float]) -> AnalyticFunction:
    """Polynomial with ascending coefficients ``c0 + c1 x + c2 x^2 + ...``."""
    coeffs = tuple(float(c) for c in coeffs)
    if not coeffs:
        raise ValueError("polynomial needs at least one coefficient")
    return AnalyticFunction("polynomial", coeffs)


def exponential(lam: float) -> AnalyticFunction:
    return AnalyticFunction("exponential", (float(lam),))


def sinusoid(omega: float) -> AnalyticFunction:
    return AnalyticFunction("sinusoid", (float(omega),))


def linear_combination(*terms: tuple[float, AnalyticFunction]) -> AnalyticFunction:
    """sum_i c_i f_i, keeping exact derivatives."""
    return AnalyticFunction("sum", tuple((float(c), f) for c, f in terms))


def sample(f: AnalyticFunction, a: float, b: float, n_points: int) -> GridFunction:
    if n_points < 2 or int(n_points) != n_points:
        raise DomainError(f"n_points must be an integer >= 2, got {n_points}")
    if not b > a:
        raise DomainError(f"sampling interval must satisfy a < b, got [{a}, {b}]")
    if not f.domain_ok(a, b):
        raise DomainError(f"{f} is not defined on all of [{a}, {b}]")
    xs = a + (b - a) / (n_points - 1) * np.arange(n_points)
    xs[-1] = b
    return GridFunction(a, b, f.value(xs))


def interpolate(g: GridFunction, x):
    """Piecewise-linear interpolant of ``g`` at ``x`` (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    slack = 1e-12 * (g.b - g.a)
    if np.any(xa < g.a - slack) or np.any(xa > g.b + slack):
        raise DomainError(f"evaluation point outside domain [{g.a}, {g.b}]")
    out = np.interp(xa, g.nodes, g.values)
    return out if out.ndim else float(out)
