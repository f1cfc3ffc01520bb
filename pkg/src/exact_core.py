"""Exact rational polynomials and the radial symbolic expression class.

A ``RadialSymbolicExpr`` is a finite sum ``sum_j P_j(x) |x|^j`` on R^N minus the
origin, where every ``P_j`` is a polynomial with rational coefficients and ``j``
is any integer. The class is closed under partial differentiation, which is all
that ``log|x|`` ever needs: it enters only through its gradient ``x_i |x|^-2``.

Polynomials are sparse ``sympy`` ring elements over ``QQ``; public values are
``fractions.Fraction``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from sympy.polys.domains import QQ
from sympy.polys.rings import PolyElement, PolyRing, ring

from .errors import ZeroExpressionError, ZeroPointError

MAX_DIMENSION = 8

Exponents = Tuple[int, ...]
Scalar = Union[int, Fraction]


def to_fraction(value) -> Fraction:
    """Convert an int, Fraction or QQ element to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(int(QQ.numer(value)), int(QQ.denom(value)))


def to_qq(value):
    """Convert an int or Fraction to a QQ domain element (QQ elements pass through)."""
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    return value


@lru_cache(maxsize=None)
def polynomial_ring(dimension: int) -> PolyRing:
    """The ring QQ[x0, ..., x_{N-1}]."""
    if not 1 <= dimension <= MAX_DIMENSION:
        raise ValueError(f"dimension must lie in [1, {MAX_DIMENSION}], got {dimension}")
    names = ",".join(f"x{i}" for i in range(dimension))
    return ring(names, QQ)[0]


@lru_cache(maxsize=None)
def _radius_power(dimension: int, k: int) -> PolyElement:
    """(x0^2 + ... + x_{N-1}^2)^k for k >= 0."""
    R = polynomial_ring(dimension)
    if k == 0:
        return R.one
    if k == 1:
        return sum((g * g for g in R.gens), R.zero)
    return _radius_power(dimension, k - 1) * _radius_power(dimension, 1)


def _element_to_float(element: PolyElement, point: np.ndarray) -> float:
    if not element:
        return 0.0
    exps = np.array(list(element.keys()), dtype=float)
    coeffs = np.array([float(to_fraction(c)) for c in element.values()])
    return float(coeffs @ np.prod(point**exps, axis=1))


class MultivariatePolynomial:
    """Polynomial in x0..x_{N-1} with exact rational coefficients."""

    __slots__ = ("dimension", "element")

    def __init__(self, dimension: int, element: Optional[PolyElement] = None):
        R = polynomial_ring(dimension)
        self.dimension = dimension
        self.element = R.zero if element is None else element
        if self.element.ring != R:
            raise ValueError("polynomial does not belong to the ring of this dimension")

    @classmethod
    def from_terms(cls, dimension: int, terms: Mapping[Exponents, Scalar]):
        """Build from {exponent vector: coefficient}; zero coefficients are dropped."""
        data = {}
        for exponents, coeff in terms.items():
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != dimension or min(exponents, default=0) < 0:
                raise ValueError(f"bad exponent vector {exponents} for dimension {dimension}")
            if coeff:
                data[exponents] = to_qq(coeff)
        return cls(dimension, polynomial_ring(dimension).from_dict(data))

    @classmethod
    def constant(cls, dimension: int, value: Scalar):
        """The constant polynomial c."""
        R = polynomial_ring(dimension)
        return cls(dimension, R.ground_new(to_qq(value)))

    @classmethod
    def variable(cls, dimension: int, axis: int):
        """x_axis (0-based)."""
        return cls(dimension, polynomial_ring(dimension).gens[axis])

    @classmethod
    def radius_squared(cls, dimension: int):
        """|x|^2 = x0^2 + ... + x_{N-1}^2."""
        return cls(dimension, _radius_power(dimension, 1))

    @property
    def terms(self) -> Dict[Exponents, Fraction]:
        """Nonzero coefficients keyed by exponent vector."""
        return {tuple(m): to_fraction(c) for m, c in self.element.items()}

    @property
    def is_zero(self) -> bool:
        return not self.element

    def coefficient(self, exponents: Exponents) -> Fraction:
        """Coefficient of x^exponents (0 when absent)."""
        return to_fraction(self.element.get(tuple(exponents), QQ.zero))

    def total_degree(self) -> int:
        """Largest monomial degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.element.keys()), default=-1)

    def homogeneous_degree(self) -> Optional[int]:
        """Common degree of all monomials, or None (also for zero)."""
        degrees = {sum(m) for m in self.element.keys()}
        return degrees.pop() if len(degrees) == 1 else None

    def derivative(self, axis: int) -> "MultivariatePolynomial":
        """d/dx_axis."""
        return MultivariatePolynomial(
            self.dimension, self.element.diff(polynomial_ring(self.dimension).gens[axis])
        )

    def divide_by_radius_squared(self) -> Optional["MultivariatePolynomial"]:
        """Exact quotient by |x|^2, or None when |x|^2 does not divide."""
        quotient, remainder = self.element.div(_radius_power(self.dimension, 1))
        if remainder:
            return None
        return MultivariatePolynomial(self.dimension, quotient)

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        """Exact value at a rational point."""
        values = [Fraction(p) for p in point]
        total = Fraction(0)
        for monom, coeff in self.element.items():
            term = to_fraction(coeff)
            for v, e in zip(values, monom):
                if e:
                    term *= v**e
            total += term
        return total

    def evaluate_float(self, point: Sequence[float]) -> float:
        """Double-precision value at a float point."""
        return _element_to_float(self.element, np.asarray(point, dtype=float))

    def substitute_linear(self, matrix: Sequence[Sequence[Scalar]]) -> "MultivariatePolynomial":
        """P(A x) with y_j = sum_i a[j][i] x_i."""
        return MultivariatePolynomial(self.dimension, _substitute(self.element, matrix))

    def __add__(self, other):
        other = self._coerce(other)
        return MultivariatePolynomial(self.dimension, self.element + other.element)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return MultivariatePolynomial(self.dimension, self.element - other.element)

    def __neg__(self):
        return MultivariatePolynomial(self.dimension, -self.element)

    def __mul__(self, other):
        if isinstance(other, MultivariatePolynomial):
            return MultivariatePolynomial(self.dimension, self.element * other.element)
        return MultivariatePolynomial(self.dimension, self.element * to_qq(other))

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        return MultivariatePolynomial(self.dimension, self.element**exponent)

    def __eq__(self, other):
        if isinstance(other, MultivariatePolynomial):
            return self.dimension == other.dimension and self.element == other.element
        if isinstance(other, (int, Fraction)):
            return self.element == self._coerce(other).element
        return NotImplemented

    def __hash__(self):
        return hash((self.dimension, frozenset(self.element.items())))

    def __repr__(self):
        return f"MultivariatePolynomial({self.element})"

    def _coerce(self, other) -> "MultivariatePolynomial":
        if isinstance(other, MultivariatePolynomial):
            if other.dimension != self.dimension:
                raise ValueError("dimension mismatch")
            return other
        return MultivariatePolynomial.constant(self.dimension, other)


def _substitute(element: PolyElement, matrix: Sequence[Sequence[Scalar]]) -> PolyElement:
    R = element.ring
    n = R.ngens
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise ValueError(f"substitution matrix must be {n}x{n}")
    images = [
        sum((R.gens[i] * to_qq(matrix[j][i]) for i in range(n) if matrix[j][i]), R.zero)
        for j in range(n)
    ]
    result = R.zero
    for monom, coeff in element.items():
        term = R.ground_new(coeff)
        for image, e in zip(images, monom):
            if e:
                term *= image**e
        result += term
    return result


@dataclass(frozen=True)
class ExactValue:
    """Exact value ``even + odd * sqrt(radius_squared)`` of an expression at a point."""

    even: Fraction
    odd: Fraction
    radius_squared: Fraction

    def as_pair(self) -> Tuple[Fraction, Fraction]:
        return self.even, self.odd

    def __float__(self) -> float:
        return float(self.even) + float(self.odd) * math.sqrt(self.radius_squared)


PolyLike = Union[PolyElement, MultivariatePolynomial]


class RadialSymbolicExpr:
    """``sum_j P_j(x) |x|^j`` on R^N minus the origin.

    Values are immutable. Arithmetic merges equal radius powers; differentiation
    returns the canonical form, in which all even powers are collected into one
    polynomial times ``|x|^(2k)`` and all odd powers into one polynomial times
    ``|x|^(2k'+1)``, with no factor ``|x|^2`` left in either polynomial. The
    canonical form is unique, so an expression vanishes iff it has no terms.
    """

    __slots__ = ("dimension", "_terms", "_canonical")

    def __init__(self, dimension: int, terms: Optional[Mapping[int, PolyLike]] = None):
        R = polynomial_ring(dimension)
        merged: Dict[int, PolyElement] = {}
        for power, poly in (terms or {}).items():
            element = poly.element if isinstance(poly, MultivariatePolynomial) else poly
            if element.ring != R:
                raise ValueError("term polynomial does not belong to the ring of this dimension")
            if element:
                merged[int(power)] = element
        self.dimension = dimension
        self._terms = merged
        self._canonical = False

    @classmethod
    def zero(cls, dimension: int) -> "RadialSymbolicExpr":
        return cls._from_canonical(dimension, {})

    @classmethod
    def constant(cls, dimension: int, value: Scalar) -> "RadialSymbolicExpr":
        return cls(dimension, {0: polynomial_ring(dimension).ground_new(to_qq(value))})

    @classmethod
    def radius_power(cls, dimension: int, power: int) -> "RadialSymbolicExpr":
        return cls(dimension, {power: polynomial_ring(dimension).one})

    @classmethod
    def coordinate(cls, dimension: int, axis: int) -> "RadialSymbolicExpr":
        return cls(dimension, {0: polynomial_ring(dimension).gens[axis]})

    @classmethod
    def from_polynomial(
        cls, polynomial: MultivariatePolynomial, power: int = 0
    ) -> "RadialSymbolicExpr":
        return cls(polynomial.dimension, {power: polynomial.element})

    @classmethod
    def _from_canonical(cls, dimension: int, terms: Dict[int, PolyElement]):
        expr = cls(dimension, terms)
        expr._canonical = True
        return expr

    @property
    def terms(self) -> Dict[int, MultivariatePolynomial]:
        return {j: MultivariatePolynomial(self.dimension, p) for j, p in self._terms.items()}

    @property
    def is_zero(self) -> bool:
        return not self.canonicalize()._terms

    def canonicalize(self) -> "RadialSymbolicExpr":
        """Even/odd radius-parity normal form (idempotent)."""
        if self._canonical:
            return self
        N = self.dimension
        R = polynomial_ring(N)
        result: Dict[int, PolyElement] = {}
        for parity in (0, 1):
            group = {(j - parity) // 2: p for j, p in self._terms.items() if j % 2 == parity}
            if not group:
                continue
            base = min(group)
            merged = R.zero
            for k, p in group.items():
                merged += p * _radius_power(N, k - base)
            if not merged:
                continue
            exponent = base
            rho = _radius_power(N, 1)
            while True:
                quotient, remainder = merged.div(rho)
                if remainder:
                    break
                merged, exponent = quotient, exponent + 1
            result[2 * exponent + parity] = merged
        return RadialSymbolicExpr._from_canonical(N, result)

    def differentiate(self, axis: int) -> "RadialSymbolicExpr":
        """Exact partial derivative along ``axis`` (0-based), canonicalized.

        Term rule: d_i(P |x|^j) = (d_i P) |x|^j + j P x_i |x|^(j-2).
        """
        if not 0 <= axis < self.dimension:
            raise ValueError(f"axis must lie in [0, {self.dimension}), got {axis}")
        R = polynomial_ring(self.dimension)
        gen = R.gens[axis]
        out: Dict[int, PolyElement] = {}
        for j, p in self._terms.items():
            dp = p.diff(gen)
            if dp:
                out[j] = out.get(j, R.zero) + dp
            if j:
                out[j - 2] = out.get(j - 2, R.zero) + p * gen * j
        return RadialSymbolicExpr(self.dimension, out).canonicalize()

    def evaluate(self, point: Sequence[Scalar]) -> ExactValue:
        """Exact value at a rational point, split as ``a + b * |x|``."""
        values = [Fraction(p) for p in point]
        if len(values) != self.dimension:
            raise ValueError(f"point must have {self.dimension} coordinates")
        rho = sum(v * v for v in values)
        if rho == 0:
            raise ZeroPointError("radial expressions are undefined at the origin")
        even = Fraction(0)
        odd = Fraction(0)
        for j, p in self._terms.items():
            value = MultivariatePolynomial(self.dimension, p).evaluate(values)
            if j % 2 == 0:
                even += value * rho ** (j // 2)
            else:
                odd += value * rho ** ((j - 1) // 2)
        return ExactValue(even, odd, rho)

    def evaluate_numeric(self, point: Sequence[float]) -> float:
        x = np.asarray(point, dtype=float)
        if x.shape != (self.dimension,):
            raise ValueError(f"point must have {self.dimension} coordinates")
        r = float(np.sqrt(x @ x))
        if r == 0.0:
            raise ZeroPointError("radial expressions are undefined at the origin")
        return sum(_element_to_float(p, x) * r**j for j, p in self._terms.items())

    def homogeneity_degree(self) -> Optional[int]:
        """Common degree d of every monomial times radius power, or None."""
        canonical = self.canonicalize()
        if not canonical._terms:
            raise ZeroExpressionError("the zero expression has no homogeneity degree")
        degrees = {sum(m) + j for j, p in canonical._terms.items() for m in p.keys()}
        return degrees.pop() if len(degrees) == 1 else None

    def constant_value(self) -> Optional[Fraction]:
        """The value if the expression is a constant, else None."""
        canonical = self.canonicalize()
        if not canonical._terms:
            return Fraction(0)
        if set(canonical._terms) != {0}:
            return None
        p = canonical._terms[0]
        if p.keys() != {(0,) * self.dimension}:
            return None
        return to_fraction(p[(0,) * self.dimension])

    def multiply_radius(self, power: int) -> "RadialSymbolicExpr":
        """Multiply by |x|^power."""
        return RadialSymbolicExpr(
            self.dimension, {j + power: p for j, p in self._terms.items()}
        )

    def compose_orthogonal(self, matrix: Sequence[Sequence[Scalar]]) -> "RadialSymbolicExpr":
        """Expression of x -> e(A x) for an orthogonal A (so |Ax| = |x|)."""
        return RadialSymbolicExpr(
            self.dimension, {j: _substitute(p, matrix) for j, p in self._terms.items()}
        )

    def __add__(self, other):
        other = self._coerce(other)
        R = polynomial_ring(self.dimension)
        out = dict(self._terms)
        for j, p in other._terms.items():
            out[j] = out.get(j, R.zero) + p
        return RadialSymbolicExpr(self.dimension, out)

    __radd__ = __add__

    def __neg__(self):
        return RadialSymbolicExpr(self.dimension, {j: -p for j, p in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, RadialSymbolicExpr):
            q = to_qq(other)
            return RadialSymbolicExpr(self.dimension, {j: p * q for j, p in self._terms.items()})
        other = self._coerce(other)
        R = polynomial_ring(self.dimension)
        out: Dict[int, PolyElement] = {}
        for j, p in self._terms.items():
            for k, q in other._terms.items():
                out[j + k] = out.get(j + k, R.zero) + p * q
        return RadialSymbolicExpr(self.dimension, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RadialSymbolicExpr.constant(self.dimension, other)
        if not isinstance(other, RadialSymbolicExpr):
            return NotImplemented
        if other.dimension != self.dimension:
            return False
        return self.canonicalize()._terms == other.canonicalize()._terms

    def __hash__(self):
        canonical = self.canonicalize()
        terms = frozenset((j, frozenset(p.items())) for j, p in canonical._terms.items())
        return hash((self.dimension, terms))

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = [f"({p})*|x|^{j}" if j else f"({p})" for j, p in sorted(self._terms.items())]
        return " + ".join(parts)

    def _coerce(self, other) -> "RadialSymbolicExpr":
        if isinstance(other, RadialSymbolicExpr):
            if other.dimension != self.dimension:
                raise ValueError("dimension mismatch")
            return other
        if isinstance(other, MultivariatePolynomial):
            return RadialSymbolicExpr.from_polynomial(other)
        return RadialSymbolicExpr.constant(self.dimension, other)
