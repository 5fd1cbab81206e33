"""Command-line interface.

Exit status: 0 success, 1 property failure (``verify``), 2 invalid input,
3 numerical failure. Results go to stdout (or ``--out``), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import falva as fv
from . import fracops as fo
from .convergence import METHODS, convergence_table
from .funcspace import (
    AnalyticFunction,
    DomainError,
    GridFunction,
    constant,
    exponential,
    polynomial,
    power,
    sample,
    sinusoid,
)
from .specfun import SpecialFunctionError
from .verify import CHECKS, DEFAULT_GRID, run_suite

EXIT_OK, EXIT_PROPERTY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class NumericError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str, what: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{what} must be comma-separated numbers, got {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise UsageError(f"{what} must be finite")
    return vals


def _pair(text: str, what: str) -> tuple[float, float]:
    vals = _floats(text, what)
    if len(vals) != 2 or not vals[1] > vals[0]:
        raise UsageError(f"{what} must be 'lo,hi' with lo < hi, got {text!r}")
    return vals[0], vals[1]


def parse_function(spec: str) -> AnalyticFunction | GridFunction:
    """``const:c``, ``pow:m``, ``poly:c0,c1,...``, ``exp:lam``, ``sin:w`` or ``csv:PATH``."""
    kind, _, arg = spec.partition(":")
    if kind == "csv":
        try:
            return GridFunction.from_csv(Path(arg).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read {arg}: {exc.strerror}") from None
    makers = {"const": constant, "pow": power, "exp": exponential, "sin": sinusoid}
    if kind == "poly":
        return polynomial(_floats(arg, "poly coefficients"))
    if kind not in makers or not arg:
        raise UsageError(f"unknown function spec {spec!r}; use const:c, pow:m, poly:c0,c1,..., exp:l, sin:w or csv:path")
    vals = _floats(arg, f"{kind} parameter")
    if len(vals) != 1:
        raise UsageError(f"{kind} takes exactly one parameter")
    return makers[kind](vals[0])


def _operand(args) -> tuple[AnalyticFunction | GridFunction, GridFunction]:
    f = parse_function(args.func)
    if isinstance(f, GridFunction):
        return f, f
    a, b = _pair(args.domain, "--domain")
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    return f, sample(f, a, b, args.n)


def _points(args, g: GridFunction) -> np.ndarray:
    xs = np.array(_floats(args.at, "--at") if args.at else [g.b], dtype=float)
    slack = 1e-12 * (g.b - g.a)
    if np.any(xs < g.a - slack) or np.any(xs > g.b + slack):
        raise UsageError("evaluation point outside domain")
    return xs


def _order(value: float, what: str = "--alpha") -> float:
    if value is None or not math.isfinite(value) or value <= 0:
        raise UsageError(f"{what} must be a positive number")
    return value


def _finite(values):
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NumericError("non-finite result")
    return arr


def _fmt(v: float) -> str:
    return "nan" if math.isnan(v) else f"{v:.17g}"


def _side(args) -> fo.Side:
    return fo.Side(args.side)


def cmd_integral(args) -> str:
    alpha = _order(args.alpha)
    beta = _order(args.beta, "--beta") if args.beta is not None else None
    _, g = _operand(args)
    xs = _points(args, g)
    side = _side(args)
    if beta is not None:
        g = fo.rl_integral_nodes(g, beta, side)
    op = fo.rl_integral if side is fo.Side.LEFT else fo.rl_integral_right
    vals = _finite(op(g, alpha, xs))
    return "x,value\n" + "".join(f"{_fmt(x)},{_fmt(v)}\n" for x, v in zip(xs, vals))


def _deriv_values(method, f, g, alpha, xs, side):
    if method == "rl":
        return fo.rl_derivative(g, alpha, xs, side)
    if method == "gl":
        if any(g.node_index(x) is None for x in xs):
            raise UsageError("gl method needs evaluation points on grid nodes")
        return fo.gl_derivative(g, alpha, xs, side)
    if not isinstance(f, AnalyticFunction):
        raise UsageError("caputo method needs an analytic function (exact derivatives); csv input has none")
    return fo.caputo_derivative(f, alpha, xs, (g.a, g.b, g.n_points), side)


def cmd_deriv(args) -> str:
    alpha = _order(args.alpha)
    f, g = _operand(args)
    xs = _points(args, g)
    side = _side(args)
    methods = ["rl", "caputo", "gl"] if args.method == "all" else [args.method]
    if "caputo" in methods and not isinstance(f, AnalyticFunction):
        raise UsageError("caputo method needs an analytic function (exact derivatives); csv input has none")
    cols = [_finite(_deriv_values(m, f, g, alpha, xs, side)) for m in methods]
    header = "x," + (",".join(methods) if len(methods) > 1 else "value")
    lines = [",".join([_fmt(x)] + [_fmt(c[i]) for c in cols]) for i, x in enumerate(xs)]
    return header + "\n" + "\n".join(lines) + "\n"


def cmd_converge(args) -> str:
    alpha = _order(args.alpha)
    method = args.method or "integral"
    if method not in METHODS:
        raise UsageError(f"converge --method must be one of {', '.join(METHODS)}")
    f = parse_function(args.func)
    if not isinstance(f, AnalyticFunction):
        raise UsageError("converge needs an analytic function with a closed form")
    a, b = _pair(args.domain, "--domain")
    if a != 0.0:
        raise UsageError("converge compares against closed forms at terminal 0; use --domain 0,b")
    if _side(args) is not fo.Side.LEFT:
        raise UsageError("converge supports --side left only")
    n_stop = args.grid or 1025
    if args.n < 3 or n_stop < args.n:
        raise UsageError("converge needs 3 <= --n <= --grid")
    x = _floats(args.at, "--at")[0] if args.at else b
    if not 0 < x <= b:
        raise UsageError("evaluation point outside domain")
    if method == "gl" and abs(x / b * (args.n - 1) - round(x / b * (args.n - 1))) > 1e-9:
        raise UsageError("gl method needs --at on a node of the coarsest grid")
    try:
        rows = convergence_table(method, f, alpha, x, b, args.n, n_stop)
    except DomainError as exc:
        if "closed form" in str(exc) or "not integrable" in str(exc):
            raise UsageError(str(exc)) from None
        raise
    out = ["n_points,h,abs_error,observed_order"]
    out += [f"{r.n_points},{_fmt(r.h)},{_fmt(r.abs_error)},{_fmt(r.observed_order)}" for r in rows]
    return "\n".join(out) + "\n"


def parse_model(spec: str, dim: int) -> fv.LagrangianModel:
    kind, _, arg = spec.partition(":")
    if kind == "freeparticle" and not arg:
        return fv.free_particle(dim)
    if kind in ("oscillator", "well"):
        vals = _floats(arg, f"{kind} parameter") if arg else [1.0]
        if len(vals) != 1:
            raise UsageError(f"{kind} takes one parameter")
        return fv.harmonic_oscillator(vals[0], dim) if kind == "oscillator" else fv.gaussian_well(vals[0], dim)
    raise UsageError(f"unknown model {spec!r}; use oscillator:w, freeparticle or well:k")


def cmd_falva_sim(args) -> str:
    if args.alpha is None:
        raise UsageError("--alpha is required")
    if not (0.0 < args.alpha <= 1.0):
        raise UsageError("alpha must lie in (0,1]")
    a, t = _pair(args.horizon, "--horizon")
    q0 = _floats(args.q0, "--q0")
    v0 = _floats(args.v0, "--v0")
    if len(q0) != len(v0):
        raise UsageError("--q0 and --v0 must have the same length")
    model = parse_model(args.model, len(q0))
    try:
        problem = fv.FalvaProblem(model, args.alpha, a, t, q0, v0, epsilon=args.eps, steps=args.steps)
        path = fv.simulate(problem)
    except fv.FalvaError as exc:
        raise UsageError(str(exc)) from None
    except fv.NumericalFailure as exc:
        raise NumericError(str(exc)) from None
    _finite(path.qs)
    action = fv.falva_action(problem, path) if args.action else None
    if action is not None and not math.isfinite(action):
        raise NumericError("action is not finite")
    return path.to_csv(action)


def cmd_verify(args) -> tuple[str, int]:
    only = [s.strip() for s in args.only.split(",")] if args.only else None
    if only:
        unknown = [n for n in only if n not in CHECKS]
        if unknown:
            raise UsageError(f"unknown property {', '.join(unknown)}; choose from {', '.join(CHECKS)}")
    grid = args.grid or DEFAULT_GRID
    if grid < 9 or (grid - 1) % 4:
        raise UsageError("--grid must be 4k+1 with k >= 2 (checks evaluate at quarter points)")
    opts = {}
    if args.alpha is not None or args.beta is not None:
        opts = {"alpha": _order(args.alpha), "beta": _order(args.beta, "--beta")}
    results = run_suite(grid, only, **opts)
    failed = [r.name for r in results if not r.passed]
    lines = [r.line() for r in results]
    lines.append(f"{len(results) - len(failed)}/{len(results)} properties passed" +
                 (f"; failing: {', '.join(failed)}" if failed else ""))
    return "\n".join(lines) + "\n", EXIT_PROPERTY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fraccalc", description="Fractional integrals, derivatives and fractional-action dynamics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, func=True):
        if func:
            p.add_argument("--func", required=True, help="const:c | pow:m | poly:c0,c1,... | exp:l | sin:w | csv:path")
            p.add_argument("--domain", default="0,1", help="a,b")
            p.add_argument("--n", type=int, default=129, help="grid points")
            p.add_argument("--at", help="evaluation points x[,x...] (default: b)")
            p.add_argument("--side", choices=["left", "right"], default="left")
        p.add_argument("--alpha", type=float)
        p.add_argument("--out", help="write output to this file instead of stdout")

    p = sub.add_parser("integral", help="Riemann-Liouville integral")
    common(p)
    p.add_argument("--beta", type=float, help="apply I^alpha to I^beta f")

    p = sub.add_parser("deriv", help="fractional derivative")
    common(p)
    p.add_argument("--method", choices=["rl", "caputo", "gl", "all"], default="rl")

    p = sub.add_parser("converge", help="error and observed order under grid doubling")
    common(p)
    p.set_defaults(n=65)
    p.add_argument("--method", default="integral", help=" | ".join(METHODS))
    p.add_argument("--grid", type=int, help="largest grid size (default 1025)")

    p = sub.add_parser("falva-sim", help="simulate fractional-action dynamics")
    common(p, func=False)
    p.add_argument("--model", default="oscillator:1", help="oscillator:w | freeparticle | well:k")
    p.add_argument("--horizon", default="0,1", help="a,t")
    p.add_argument("--q0", default="1")
    p.add_argument("--v0", default="0")
    p.add_argument("--steps", type=int, default=1024)
    p.add_argument("--eps", type=float, help="standoff from the horizon (default 1e-3*(t-a) for alpha<1)")
    p.add_argument("--action", action="store_true", help="append '# action=<value>'")

    p = sub.add_parser("verify", help="run the property suites")
    p.add_argument("--only", help="comma-separated property names")
    p.add_argument("--grid", type=int, help=f"grid size for operator suites (default {DEFAULT_GRID})")
    p.add_argument("--alpha", type=float, help="semigroup alpha")
    p.add_argument("--beta", type=float, help="semigroup beta")
    p.add_argument("--out")
    return parser


COMMANDS = {
    "integral": cmd_integral,
    "deriv": cmd_deriv,
    "converge": cmd_converge,
    "falva-sim": cmd_falva_sim,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        result = COMMANDS[args.command](args)
        text, status = result if isinstance(result, tuple) else (result, EXIT_OK)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, SpecialFunctionError, fv.FalvaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


def run() -> None:
    sys.exit(main())
