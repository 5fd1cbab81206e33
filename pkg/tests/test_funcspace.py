import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraccalc.funcspace import (
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


def test_sample_examples():
    g = sample(power(2), 0, 1, 3)
    assert np.array_equal(g.values, [0.0, 0.25, 1.0])
    assert np.array_equal(sample(constant(5), 0, 1, 2).values, [5.0, 5.0])
    assert g.h == 0.5
    assert g.nodes[-1] == 1.0


def test_sample_rejects_bad_input():
    with pytest.raises(DomainError):
        sample(power(2), 0, 1, 1)
    with pytest.raises(DomainError):
        sample(power(2), 1, 1, 5)
    with pytest.raises(DomainError):
        sample(power(-1), -1, 1, 5)
    with pytest.raises(DomainError):
        sample(power(0.5), -1, 1, 5)


def test_interpolate_examples():
    g = sample(power(2), 0, 1, 3)
    assert interpolate(g, 0.25) == 0.125
    assert interpolate(g, 1.0) == 1.0
    assert np.allclose(g(np.array([0.0, 0.75])), [0.0, 0.625])
    with pytest.raises(DomainError, match="outside domain"):
        interpolate(g, 1.5)


@given(st.integers(2, 200), st.floats(-5, 5), st.floats(0.1, 10))
def test_interpolation_reproduces_nodes(n, a, width):
    g = sample(sinusoid(1.3), a, a + width, n)
    assert np.array_equal(interpolate(g, g.nodes), g.values)


@pytest.mark.parametrize(
    "f",
    [power(3), power(2.5), polynomial([1, -2, 0.5, 3]), exponential(-0.7), sinusoid(2.0),
     linear_combination((2.0, power(1)), (-1.0, sinusoid(3.0)))],
    ids=str,
)
def test_exact_derivatives_match_finite_differences(f):
    rng = np.random.default_rng(3)
    h = 1e-4
    for x in rng.uniform(0.3, 2.0, 10):
        for k in (1, 2, 3):
            # central difference of the (k-1)th exact derivative
            fd = (f.derivative(k - 1, x + h) - f.derivative(k - 1, x - h)) / (2 * h)
            assert f.derivative(k, x) == pytest.approx(fd, rel=1e-6, abs=1e-6)


def test_sinusoid_derivative_phase_is_exact_over_many_orders():
    for k in range(12):
        d = sinusoid(1.0).derivative(k, 0.0)
        assert d == [0.0, 1.0, 0.0, -1.0][k % 4]


def test_integer_power_below_order_vanishes():
    assert power(2).derivative(3, 0.4) == 0.0
    assert power(2).derivative(2, -1.0) == 2.0
    with pytest.raises(DomainError):
        power(0.5).derivative(1, -0.1)


def test_fractional_order():
    o = FractionalOrder(1.5)
    assert (o.alpha, o.n, o.is_integer) == (1.5, 2, False)
    assert FractionalOrder(2).n == 3 and FractionalOrder(2).is_integer
    for bad in (0, -1, math.nan, math.inf):
        with pytest.raises(DomainError):
            FractionalOrder(bad)


def test_grid_values_are_read_only():
    g = sample(power(1), 0, 1, 5)
    with pytest.raises(ValueError):
        g.values[0] = 3.0


def test_grid_validation():
    with pytest.raises(DomainError):
        GridFunction(0, 1, [1.0])
    with pytest.raises(DomainError):
        GridFunction(1, 0, [1.0, 2.0])
    with pytest.raises(DomainError):
        GridFunction(0, 1, [1.0, math.nan])


@settings(max_examples=50)
@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=50), st.floats(-10, 10), st.floats(1e-3, 10))
def test_csv_round_trip_is_lossless(values, a, width):
    g = GridFunction(a, a + width, values)
    back = GridFunction.from_csv(g.to_csv())
    assert back.same_grid(g) or np.isclose(back.b, g.b, rtol=1e-15)
    assert np.array_equal(back.values, g.values)


def test_csv_rejects_nonuniform_grid():
    with pytest.raises(DomainError, match="uniformly"):
        GridFunction.from_csv("x,value\n0,1\n0.5,2\n2,3\n")
    with pytest.raises(DomainError, match="header"):
        GridFunction.from_csv("t,f\n0,1\n1,2\n")


def test_node_index_and_reflect():
    g = sample(power(1), 0, 1, 5)
    assert g.node_index(0.75) == 3
    assert g.node_index(0.7) is None
    assert np.array_equal(g.reflect().values, g.values[::-1])
