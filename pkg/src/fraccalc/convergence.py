"""Empirical convergence orders of the discrete operators against power-law closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fracops as fo
from .funcspace import AnalyticFunction, DomainError, sample

__all__ = ["ConvergenceRow", "closed_form", "convergence_table", "METHODS"]

METHODS = ("integral", "rl", "caputo", "gl")


@dataclass(frozen=True)
class ConvergenceRow:
    n_points: int
    h: float
    abs_error: float
    observed_order: float


def _power_terms(f: AnalyticFunction) -> list[tuple[float, float]]:
    """(coefficient, exponent) pairs when ``f`` is a finite sum of powers, else DomainError."""
    if f.kind == "constant":
        return [(f.params[0], 0.0)]
    if f.kind == "power":
        return [(1.0, f.params[0])]
    if f.kind == "polynomial":
        return [(c, float(k)) for k, c in enumerate(f.params) if c != 0.0]
    if f.kind == "sum":
        return [(c * cc, m) for c, g in f.params for cc, m in _power_terms(g)]
    raise DomainError(f"no closed form available for {f}")


def closed_form(method: str, f: AnalyticFunction, alpha: float):
    """Exact operator value x -> (Op f)(x) at terminal 0, for sums of powers."""
    rule = {
        "integral": fo.closed_form_rl_integral_power,
        "rl": fo.closed_form_rl_derivative_power,
        "gl": fo.closed_form_rl_derivative_power,
        "caputo": fo.closed_form_caputo_power,
    }[method]
    parts = [(c, rule(m, alpha)) for c, m in _power_terms(f)]
    return lambda x: float(sum(c * cf(x) for c, cf in parts))


def _evaluate(method: str, f: AnalyticFunction, alpha: float, x: float, b: float, n: int) -> float:
    if method == "caputo":
        return fo.caputo_derivative(f, alpha, x, (0.0, b, n))
    g = sample(f, 0.0, b, n)
    if method == "integral":
        return fo.rl_integral(g, alpha, x)
    if method == "rl":
        return fo.rl_derivative(g, alpha, x)
    return fo.gl_derivative(g, alpha, x)


def convergence_table(method: str, f: AnalyticFunction, alpha: float, x: float, b: float,
                      n_start: int = 65, n_stop: int = 1025) -> list[ConvergenceRow]:
    """Errors at n_points = n_start, 2 n_start - 1, ... up to n_stop (each level halves h).

    ``observed_order`` is log2(err_prev / err); it is NaN on the first row and
    whenever either error sits at rounding level.
    """
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}")
    exact = closed_form(method, f, alpha)(x)
    floor = 64 * np.finfo(float).eps * max(1.0, abs(exact))
    rows: list[ConvergenceRow] = []
    n = n_start
    while n <= n_stop:
        err = abs(_evaluate(method, f, alpha, x, b, n) - exact)
        order = math.nan
        if rows and rows[-1].abs_error > floor and err > floor:
            order = math.log2(rows[-1].abs_error / err)
        rows.append(ConvergenceRow(n, b / (n - 1), err, order))
        n = 2 * n - 1
    return rows
