"""Tests for exact polynomials and radial symbolic expressions."""

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import ZeroExpressionError, ZeroPointError
from src.exact_core import MultivariatePolynomial, RadialSymbolicExpr
from src.tensor_calc import log_derivative_tensor


def r(dimension, power):
    return RadialSymbolicExpr.radius_power(dimension, power)


def x(dimension, axis):
    return RadialSymbolicExpr.coordinate(dimension, axis)


def test_polynomial_from_terms_and_coefficients():
    """Test building a polynomial from an exponent map."""
    p = MultivariatePolynomial.from_terms(2, {(2, 0): 3, (0, 1): Fraction(1, 2), (1, 1): 0})

    assert p.coefficient((2, 0)) == 3
    assert p.coefficient((0, 1)) == Fraction(1, 2)
    assert p.coefficient((1, 1)) == 0
    assert p.total_degree() == 2
    assert p.homogeneous_degree() is None


def test_polynomial_rejects_bad_exponents():
    """Test exponent vectors of the wrong length are refused."""
    with pytest.raises(ValueError):
        MultivariatePolynomial.from_terms(2, {(1, 0, 0): 1})


def test_polynomial_divide_by_radius_squared():
    """Test exact division by |x|^2 and the non-divisible case."""
    x0 = MultivariatePolynomial.variable(2, 0)
    rho = MultivariatePolynomial.radius_squared(2)

    assert (rho * x0).divide_by_radius_squared() == x0
    assert x0.divide_by_radius_squared() is None


def test_polynomial_substitute_linear():
    """Test P(Ax) for a rational rotation."""
    a = [[Fraction(3, 5), Fraction(4, 5)], [Fraction(-4, 5), Fraction(3, 5)]]
    x0 = MultivariatePolynomial.variable(2, 0)

    rotated = x0.substitute_linear(a)

    assert rotated.evaluate([1, 0]) == Fraction(3, 5)
    assert rotated.evaluate([0, 1]) == Fraction(4, 5)
    assert MultivariatePolynomial.radius_squared(2).substitute_linear(a) == (
        MultivariatePolynomial.radius_squared(2)
    )


def test_radius_power_derivative():
    """Test d/dx0 |x|^-2 = -2 x0 |x|^-4."""
    derivative = r(2, -2).differentiate(0)

    assert derivative == x(2, 0).multiply_radius(-4) * -2


def test_canonical_form_absorbs_radius_squared():
    """Test the polynomial x0^2 + x1^2 and |x|^2 share one canonical form."""
    polynomial = RadialSymbolicExpr.from_polynomial(MultivariatePolynomial.radius_squared(2))

    assert polynomial == r(2, 2)
    assert polynomial.canonicalize().terms.keys() == {2}
    assert hash(polynomial) == hash(r(2, 2))


def test_canonical_form_detects_zero():
    """Test cancellation across radius powers is recognized as zero."""
    expr = r(3, 2) * r(3, -2) - 1

    assert expr.is_zero
    assert expr.constant_value() == 0


@pytest.mark.parametrize("dimension", [1, 2, 3, 4])
def test_laplacian_of_log(dimension):
    """Test sum_i d_i (x_i |x|^-2) = (N - 2) |x|^-2."""
    total = RadialSymbolicExpr.zero(dimension)
    for i in range(dimension):
        total = total + x(dimension, i).multiply_radius(-2).differentiate(i)

    assert total == r(dimension, -2) * (dimension - 2)


def test_evaluate_exact_and_float():
    """Test exact evaluation as even + odd * |x|."""
    value = r(2, 3).evaluate([3, 4])

    assert value.as_pair() == (0, 25)
    assert value.radius_squared == 25
    assert float(value) == pytest.approx(125.0)
    assert r(2, 3).evaluate_numeric([3.0, 4.0]) == pytest.approx(125.0)


def test_evaluate_at_origin_fails():
    """Test evaluation at the origin raises ZeroPointError."""
    with pytest.raises(ZeroPointError):
        r(2, -2).evaluate([0, 0])
    with pytest.raises(ZeroPointError):
        r(2, -2).evaluate_numeric([0.0, 0.0])


def test_homogeneity_degree():
    """Test degrees of homogeneous, inhomogeneous and zero expressions."""
    assert x(3, 0).multiply_radius(-2).homogeneity_degree() == -1
    assert (x(3, 1) * x(3, 2) * r(3, -5)).homogeneity_degree() == -3
    assert (x(3, 0) + r(3, 2)).homogeneity_degree() is None
    with pytest.raises(ZeroExpressionError):
        RadialSymbolicExpr.zero(3).homogeneity_degree()


def test_differentiate_rejects_bad_axis():
    """Test axes are 0-based and bounded by N."""
    with pytest.raises(ValueError):
        r(2, 1).differentiate(2)


def test_compose_orthogonal_keeps_radius():
    """Test composition with a rotation fixes |x|^k and moves coordinates."""
    a = [[Fraction(3, 5), Fraction(4, 5)], [Fraction(-4, 5), Fraction(3, 5)]]

    assert r(2, 5).compose_orthogonal(a) == r(2, 5)
    rotated = x(2, 0).compose_orthogonal(a)
    assert rotated.evaluate([0, 1]).even == Fraction(4, 5)


def test_second_derivatives_match_sympy():
    """Test mixed second derivatives against sympy.diff at a float point."""
    x0, x1 = sympy.symbols("x0 x1")
    radius = sympy.sqrt(x0**2 + x1**2)
    reference = x0**3 * radius**-3 + x0 * radius
    expr = x(2, 0) * x(2, 0) * x(2, 0) * r(2, -3) + x(2, 0) * r(2, 1)
    point = (0.7, -1.3)

    for a, b in [(0, 0), (0, 1), (1, 1)]:
        ours = expr.differentiate(a).differentiate(b).evaluate_numeric(point)
        symbols = (x0, x1)
        theirs = sympy.diff(reference, symbols[a], symbols[b])
        expected = float(theirs.subs({x0: point[0], x1: point[1]}))
        assert ours == pytest.approx(expected, rel=1e-12)


coefficients = st.integers(min_value=-5, max_value=5)
powers = st.integers(min_value=-4, max_value=4)


@settings(max_examples=30, deadline=None)
@given(a=coefficients, b=coefficients, j=powers, k=powers)
def test_mixed_partials_commute(a, b, j, k):
    """Test d0 d1 e = d1 d0 e on the symbolic class."""
    e = x(2, 0) * r(2, j) * a + x(2, 1) * x(2, 1) * r(2, k) * b

    assert e.differentiate(0).differentiate(1) == e.differentiate(1).differentiate(0)


@settings(max_examples=30, deadline=None)
@given(a=coefficients, b=coefficients, j=powers)
def test_differentiation_is_linear(a, b, j):
    """Test d(a u + b v) = a du + b dv."""
    u, v = x(3, 0) * r(3, j), x(3, 2) * r(3, -j)

    assert (u * a + v * b).differentiate(2) == u.differentiate(2) * a + v.differentiate(2) * b


@pytest.mark.parametrize("dimension,order", [(2, 2), (3, 3), (4, 2)])
def test_log_derivatives_are_homogeneous(dimension, order):
    """Test every component of grad^m log|x| is homogeneous of degree -m."""
    for key, entry in log_derivative_tensor(dimension, order).entries.items():
        if not entry.is_zero:
            assert entry.homogeneity_degree() == -order, key


@settings(max_examples=30, deadline=None)
@given(a=coefficients, b=coefficients, j=powers, k=powers)
def test_canonicalize_is_idempotent(a, b, j, k):
    """Test canonicalizing twice changes nothing."""
    e = x(3, 0) * x(3, 1) * r(3, j) * a + r(3, k) * b + x(3, 2) * r(3, 2)
    once = e.canonicalize()

    assert once.canonicalize().terms == once.terms


@pytest.mark.parametrize("axis", [0, 1, 2])
def test_derivative_matches_finite_difference(axis):
    """Test d_axis e against a central difference at a float point."""
    e = x(3, 0) * x(3, 1) * r(3, -3) + x(3, 2) * r(3, 1) + r(3, 2) * Fraction(1, 3)
    point = [0.6, -0.9, 1.2]
    h = 1e-5
    plus, minus = list(point), list(point)
    plus[axis] += h
    minus[axis] -= h
    central = (e.evaluate_numeric(plus) - e.evaluate_numeric(minus)) / (2 * h)

    assert e.differentiate(axis).evaluate_numeric(point) == pytest.approx(central, rel=1e-8)
