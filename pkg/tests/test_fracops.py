import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from fraccalc import fracops as fo
from fraccalc.fracops import OperatorKind, OperatorRequest, Side
from fraccalc.funcspace import DomainError, constant, exponential, polynomial, power, sample, sinusoid


def rl_integral_oracle(fun, alpha, x, a=0.0):
    """Adaptive quadrature with the algebraic endpoint weight (x - t)^(alpha - 1)."""
    val, _ = integrate.quad(fun, a, x, weight="alg", wvar=(0.0, alpha - 1.0), epsabs=1e-14, epsrel=1e-13)
    return val / math.gamma(alpha)


def rl_derivative_oracle(fun, alpha, x, delta=1e-3):
    """d/dx of the order (1 - alpha) integral, by a fourth-order difference of oracle integrals (0 < alpha < 1)."""
    F = lambda y: rl_integral_oracle(fun, 1.0 - alpha, y)
    return (-F(x + 2 * delta) + 8 * F(x + delta) - 8 * F(x - delta) + F(x - 2 * delta)) / (12 * delta)


def fitted_order(ns, errs, b=1.0):
    hs = b / (np.asarray(ns) - 1.0)
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])


# -- integrals ---------------------------------------------------------------


def test_integral_examples():
    assert fo.rl_integral(sample(constant(1), 0, 1, 101), 1.0, 1.0) == pytest.approx(1.0, abs=1e-12)
    g = sample(power(1), 0, 1, 1025)
    assert fo.rl_integral(g, 0.5, 1.0) == pytest.approx(0.7522527780636751, abs=1e-6)
    assert fo.rl_integral(sample(constant(1), 0, 1, 1025), 0.5, 1.0) == pytest.approx(1.1283791670955126, abs=1e-6)


def test_integral_example_values_against_quadrature_oracle():
    assert rl_integral_oracle(lambda t: t, 0.5, 1.0) == pytest.approx(0.7522527780636751, rel=1e-12)
    assert rl_integral_oracle(lambda t: 1.0, 0.5, 1.0) == pytest.approx(1.1283791670955126, rel=1e-12)


@pytest.mark.parametrize("f, fun", [(sinusoid(2.0), lambda t: math.sin(2 * t)), (exponential(-1.0), lambda t: math.exp(-t))])
@pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0, 1.7])
def test_integral_matches_quadrature(f, fun, alpha):
    g = sample(f, 0, 2, 2049)
    for x in (0.37, 1.0, 2.0):
        assert fo.rl_integral(g, alpha, x) == pytest.approx(rl_integral_oracle(fun, alpha, x), abs=1e-6)


def test_alpha_one_is_trapezoid_rule():
    g = sample(sinusoid(3.0), 0, 1, 65)
    assert fo.rl_integral(g, 1.0, 1.0) == pytest.approx(np.trapezoid(g.values, dx=g.h), rel=1e-13)


def test_integral_is_exact_for_linear_data():
    g = sample(polynomial([2.0, -3.0]), 0, 1, 9)
    exact = 2 * fo.closed_form_rl_integral_power(0, 0.4)(0.63) - 3 * fo.closed_form_rl_integral_power(1, 0.4)(0.63)
    assert fo.rl_integral(g, 0.4, 0.63) == pytest.approx(exact, abs=1e-14)


def test_integral_vanishes_at_terminal_and_rejects_outside_points():
    g = sample(power(2), 0, 1, 33)
    assert fo.rl_integral(g, 0.5, 0.0) == 0.0
    assert fo.rl_integral_right(g, 0.5, 1.0) == 0.0
    with pytest.raises(DomainError, match="outside domain"):
        fo.rl_integral(g, 0.5, 1.2)


def test_right_integral_matches_quadrature():
    g = sample(power(2), 0, 1, 2049)
    val, _ = integrate.quad(lambda t: t**2, 0.3, 1.0, weight="alg", wvar=(0.5 - 1.0, 0.0))
    assert fo.rl_integral_right(g, 0.5, 0.3) == pytest.approx(val / math.gamma(0.5), abs=1e-6)


@pytest.mark.parametrize("m, alpha", [(0, 0.5), (1, 0.5), (2, 1.5), (0.5, 0.5), (3, 0.25)])
def test_power_integral_closed_form_against_oracle(m, alpha):
    cf = fo.closed_form_rl_integral_power(m, alpha)
    for x in (0.4, 1.0, 2.5):
        assert cf(x) == pytest.approx(rl_integral_oracle(lambda t: t**m, alpha, x), rel=1e-10)


def test_half_power_closed_form_is_sqrt_pi_over_two():
    assert fo.closed_form_rl_integral_power(0.5, 0.5)(1.0) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-14)
    assert rl_integral_oracle(math.sqrt, 0.5, 1.0) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-12)


# -- derivatives -------------------------------------------------------------


def test_lacroix_half_derivative():
    g = sample(power(1), 0, 4, 2049)
    assert fo.rl_derivative(g, 0.5, math.pi) == pytest.approx(2.0, abs=5e-3)


def test_lacroix_is_second_order():
    errs = [abs(fo.rl_derivative(sample(power(1), 0, 4, n), 0.5, math.pi) - 2.0) for n in (257, 513, 1025, 2049)]
    assert np.all(np.diff(errs) < 0)
    assert fitted_order([257, 513, 1025, 2049], errs, b=4.0) > 1.8


def test_derivative_example_values_against_oracle():
    # D^1/2 x at pi is 2 sqrt(pi/pi) = 2; D^1/2 x^2 at 1 is 2/Gamma(2.5)
    assert rl_derivative_oracle(lambda t: t, 0.5, math.pi) == pytest.approx(2.0, abs=1e-8)
    assert rl_derivative_oracle(lambda t: t * t, 0.5, 1.0) == pytest.approx(1.5045055561273502, abs=1e-8)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_power_law_derivative(m, alpha):
    exact = fo.closed_form_rl_derivative_power(m, alpha)(0.7)
    errs = [abs(fo.rl_derivative(sample(power(m), 0, 1, n), alpha, 0.7) - exact) for n in (129, 257, 513, 1025)]
    assert errs[-1] <= 1e-2
    assert fitted_order([129, 257, 513, 1025], errs) >= 1.0


@pytest.mark.parametrize("alpha", [0.3, 0.6])
def test_derivative_of_smooth_function_against_oracle(alpha):
    g = sample(sinusoid(1.5), 0, 1, 1025)
    want = rl_derivative_oracle(lambda t: math.sin(1.5 * t), alpha, 0.6)
    assert fo.rl_derivative(g, alpha, 0.6) == pytest.approx(want, abs=1e-5)


def test_derivative_above_one():
    g = sample(power(3), 0, 1, 1025)
    exact = fo.closed_form_rl_derivative_power(3, 1.5)(0.5)
    assert fo.rl_derivative(g, 1.5, 0.5) == pytest.approx(exact, abs=1e-4)


def test_gl_cross_validates_rl_and_converges():
    x = 0.5
    errs = []
    for n in (129, 257, 513, 1025):
        g = sample(power(2), 0, 1, n)
        gl, rl = fo.gl_derivative(g, 0.5, x), fo.rl_derivative(g, 0.5, x)
        assert abs(gl - rl) <= 5e-2
        errs.append(abs(gl - fo.closed_form_rl_derivative_power(2, 0.5)(x)))
    order = fitted_order([129, 257, 513, 1025], errs)
    assert 0.8 <= order <= 1.3


def test_gl_requires_nodes():
    g = sample(power(1), 0, 1, 11)
    with pytest.raises(DomainError, match="node"):
        fo.gl_derivative(g, 0.5, 0.33)
    with pytest.raises(DomainError):
        fo.gl_derivative(g, 0.5, 0.0)


def test_gl_binomial_weights():
    # x = first node after a: (f(h) - alpha f(0)) / h^alpha
    g = sample(polynomial([2.0, 1.0]), 0, 1, 5)
    want = (g.values[1] - 0.5 * g.values[0]) / g.h**0.5
    assert fo.gl_derivative(g, 0.5, 0.25) == pytest.approx(want, rel=1e-14)


def test_caputo_examples():
    assert fo.caputo_derivative(constant(5), 0.5, 1.0, (0, 1, 1025)) == 0.0
    assert fo.caputo_derivative(power(1), 0.5, 1.0, (0, 1, 1025)) == pytest.approx(2 / math.sqrt(math.pi), abs=1e-6)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9, 1.5, 2.3])
def test_caputo_annihilates_constants_exactly(alpha):
    xs = np.linspace(0.1, 1.0, 7)
    vals = fo.caputo_derivative(constant(-3.7), alpha, xs, (0, 1, 257))
    assert np.all(vals == 0.0)


def test_caputo_power_closed_forms():
    assert fo.closed_form_caputo_power(1, 1.5)(0.4) == 0.0
    assert fo.closed_form_caputo_power(2, 1.5)(1.0) == pytest.approx(2 / math.gamma(1.5), rel=1e-14)
    val = fo.caputo_derivative(power(2), 1.5, 1.0, (0, 1, 1025))
    assert val == pytest.approx(2 / math.gamma(1.5), abs=1e-5)


def test_caputo_rejects_grid_operand_and_singular_derivative():
    with pytest.raises(fo.DerivativeUnavailableError):
        fo.caputo_derivative(sample(power(1), 0, 1, 9), 0.5, 0.5, (0, 1, 9))
    with pytest.raises(fo.DerivativeUnavailableError):
        fo.caputo_derivative(power(0.5), 1.5, 0.5, (0, 1, 65))


def test_rl_of_constant_converges_to_closed_form():
    exact = 5 / math.gamma(0.5)
    errs = [abs(fo.rl_derivative(sample(constant(5), 0, 1, n), 0.5, 1.0) - exact) for n in (129, 257, 513, 1025)]
    assert errs[-1] <= 1e-2
    assert np.all(np.diff(errs) < 0)


@pytest.mark.parametrize("f, alpha", [(polynomial([1, 1]), 0.5), (constant(5), 0.3), (polynomial([1, 2, 3]), 1.5)], ids=str)
def test_caputo_rl_relation_refines(f, alpha):
    res = [abs(fo.caputo_rl_relation_residual(f, alpha, 1.0, (0, 1, n))) for n in (257, 513, 1025, 2049)]
    assert res[2] <= 1e-2
    assert np.all(np.diff(res) < 0)


def test_caputo_rl_relation_example():
    assert abs(fo.caputo_rl_relation_residual(polynomial([1, 1]), 0.5, 1.0)) <= 1e-2


def test_clearance_error_on_tiny_interval():
    g = sample(power(1), 0, 1, 2)
    with pytest.raises(fo.ClearanceError):
        fo.rl_derivative(g, 2.5, 0.5)


def test_derivative_needs_interior_point():
    g = sample(power(1), 0, 1, 33)
    with pytest.raises(DomainError):
        fo.rl_derivative(g, 0.5, 0.0)
    with pytest.raises(DomainError, match="outside domain"):
        fo.rl_derivative(g, 0.5, 1.5)


# -- properties --------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from([OperatorKind.RL_INTEGRAL, OperatorKind.RL_DERIVATIVE, OperatorKind.GRUNWALD_LETNIKOV]),
    st.sampled_from([Side.LEFT, Side.RIGHT]),
    st.floats(0.1, 2.4),
    st.floats(-5, 5),
)
def test_linearity_grid_operators(kind, side, alpha, c):
    f = sample(power(2), 0, 1, 65)
    g = sample(sinusoid(3.0), 0, 1, 65)
    req = OperatorRequest(kind, side, alpha)
    assert fo.check_linearity(req, f, g, c, [0.25, 0.5, 0.75]) <= 1e-9 * (1 + abs(c))


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([Side.LEFT, Side.RIGHT]), st.floats(0.1, 2.4), st.floats(-5, 5))
def test_linearity_caputo(side, alpha, c):
    req = OperatorRequest(OperatorKind.CAPUTO, side, alpha)
    dev = fo.check_linearity(req, power(2), exponential(0.5), c, [0.25, 0.5, 0.75], (0, 1, 65))
    assert dev <= 1e-9 * (1 + abs(c))


def test_linearity_needs_matching_grids():
    with pytest.raises(fo.GridMismatchError):
        req = OperatorRequest(OperatorKind.RL_INTEGRAL, Side.LEFT, 0.5)
        fo.check_linearity(req, sample(power(1), 0, 1, 9), sample(power(1), 0, 1, 17), 1.0, [0.5])


def test_semigroup_example():
    assert fo.check_semigroup(sample(power(2), 0, 1, 257), 0.3, 0.4, 1.0) <= 5e-3


def test_semigroup_refinement_order_random_pairs():
    rng = np.random.default_rng(11)
    ns = [65, 129, 257, 513]
    for alpha, beta in rng.uniform(0.1, 1.5, (20, 2)):
        for f in (power(2), sinusoid(2.0)):
            devs = [fo.check_semigroup(sample(f, 0, 1, n), alpha, beta, 1.0) for n in ns]
            assert devs[-1] <= 5e-3
            assert fitted_order(ns, devs) >= 1.0, (alpha, beta, str(f), devs)


def test_integration_by_parts():
    f, g = sample(power(1), 0, 1, 513), sample(polynomial([1, -1]), 0, 1, 513)
    assert fo.check_integration_by_parts(f, g, 0.5) <= 1e-3
    f2, g2 = sample(sinusoid(2.0), 0, 1, 513), sample(exponential(0.3), 0, 1, 513)
    assert fo.check_integration_by_parts(f2, g2, 0.7) <= 1e-3


@pytest.mark.parametrize("n", [1, 2])
def test_integer_recovery(n):
    assert fo.check_integer_recovery(power(3), n, 0.5, (0, 1, 1025)) <= 1e-3
    assert fo.check_integer_recovery(sinusoid(1.0), n, 1.0, (0, 2, 1025), Side.RIGHT) <= 1e-3


def test_zero_order_limit_strictly_decreasing():
    devs = fo.check_zero_order_limit(sample(power(1), 0, 2, 1025), 1.0, [0.4, 0.2, 0.1, 0.05, 0.025])
    assert np.all(np.diff(devs) < 0)
    with pytest.raises(DomainError):
        fo.check_zero_order_limit(sample(power(1), 0, 2, 65), 1.0, [0.1, 0.2])


def test_nonlocality():
    base = sample(power(2), 0, 1, 257)
    bump = np.where(base.nodes <= 0.25, 0.1 * np.sin(4 * np.pi * base.nodes) ** 2, 0.0)
    moved = abs(fo.rl_derivative(base.with_values(base.values + bump), 0.5, 1.0) - fo.rl_derivative(base, 0.5, 1.0))
    assert moved >= 1e-6


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 2.5), st.floats(0.0, 1.0))
def test_right_integral_is_reflected_left_integral(alpha, x):
    g = sample(exponential(1.3), 0, 1, 129)
    assert fo.rl_integral_right(g, alpha, x) == pytest.approx(fo.rl_integral(g.reflect(), alpha, 1.0 - x), abs=1e-14)


def test_right_derivative_of_reflected_power():
    # D_{1-}^alpha (1 - x)^2 evaluated at x equals D_{0+}^alpha t^2 at t = 1 - x
    g = sample(polynomial([1, -2, 1]), 0, 1, 1025)
    exact = fo.closed_form_rl_derivative_power(2, 0.5)(0.6)
    assert fo.rl_derivative(g, 0.5, 0.4, Side.RIGHT) == pytest.approx(exact, abs=1e-4)


def test_apply_dispatch_and_terminal_check():
    g = sample(power(1), 0, 1, 257)
    req = OperatorRequest(OperatorKind.RL_INTEGRAL, Side.LEFT, 0.5, terminal=0.0)
    assert fo.apply(req, g, 1.0) == fo.rl_integral(g, 0.5, 1.0)
    with pytest.raises(DomainError, match="terminal"):
        fo.apply(OperatorRequest(OperatorKind.RL_INTEGRAL, Side.LEFT, 0.5, terminal=0.5), g, 1.0)
    with pytest.raises(DomainError):
        fo.apply(OperatorRequest(OperatorKind.CAPUTO, Side.LEFT, 0.5), power(1), 1.0)


def test_closed_form_rl_derivative_pole_gives_zero():
    # D^2 x = 0: 1/Gamma(0) vanishes
    cf = fo.closed_form_rl_derivative_power(1, 2.0)
    assert cf(0.3) == 0.0
    with pytest.raises(DomainError):
        fo.closed_form_rl_derivative_power(-1.5, 0.5)


def test_action_weights_nonnegative():
    u = 1.0 - np.linspace(0, 0.99, 200)
    for alpha in (0.1, 0.5, 0.9, 1.0, 1.7):
        assert np.all(fo.product_trapezoid_weights(u, alpha) >= 0)
