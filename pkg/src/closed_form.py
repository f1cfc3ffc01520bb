"""Closed-form constants: l_N^m from its combinatorial formula, sphere areas and K_N."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

import mpmath

from .errors import OracleMismatchError
from .tensor_calc import ell_symbolic

logger = logging.getLogger(__name__)

CLOSED_FORM = "closed-form"
SYMBOLIC_ORACLE = "symbolic-oracle"


@dataclass(frozen=True)
class EllValue:
    """l_N^m with the method that produced it."""

    dimension: int
    order: int
    value: Fraction
    method: str

    def __post_init__(self):
        if self.value <= 0:
            raise ValueError(f"l_{self.dimension}^{self.order} must be positive, got {self.value}")


@dataclass(frozen=True)
class SphereArea:
    """omega_m = coefficient * pi^pi_power, plus its high-precision value."""

    m: int
    coefficient: Fraction
    pi_power: int
    value: mpmath.mpf

    def describe(self) -> str:
        if self.pi_power == 0:
            return str(self.coefficient)
        pi = "pi" if self.pi_power == 1 else f"pi^{self.pi_power}"
        return pi if self.coefficient == 1 else f"{self.coefficient}*{pi}"


@dataclass(frozen=True)
class BestConstant:
    """K_N = (sqrt(l_N) * omega_{N-1})^-1."""

    dimension: int
    ell: Fraction
    sphere: SphereArea
    value: mpmath.mpf

    @property
    def description(self) -> str:
        return f"1/(sqrt({self.ell})*{self.sphere.describe()})"

    def recompute(self, dps: int = 60) -> mpmath.mpf:
        """K_N rebuilt from its exact parts (coefficient, pi power, l_N)."""
        with mpmath.workdps(dps):
            ell = mpmath.mpf(self.ell.numerator) / self.ell.denominator
            coef = self.sphere.coefficient
            coefficient = mpmath.mpf(coef.numerator) / coef.denominator
            return 1 / (mpmath.sqrt(ell) * coefficient * mpmath.pi**self.sphere.pi_power)


def pochhammer(nu: Fraction, k: int) -> Fraction:
    """Falling factorial nu (nu - 1) ... (nu - k + 1); 1 for k = 0."""
    if k < 0:
        raise ValueError("k must be non-negative")
    result = Fraction(1)
    for j in range(k):
        result *= Fraction(nu) - j
    return result


def ell_closed_form(dimension: int, order: int) -> EllValue:
    """Exact l_N^m from the double-sum formula (squared inner sum, falling factorials)."""
    if dimension < 1 or order < 1:
        raise ValueError("need N >= 1 and m >= 1")
    m = order
    total = Fraction(0)
    for l in range(m // 2 + 1):
        inner = Fraction(0)
        for n in range((m + 1) // 2, m - l + 1):
            inner += (
                Fraction(2) ** (2 * n - m + l)
                * Fraction((-1) ** n, 2 * n)
                * math.comb(n, m - n)
                * math.comb(m - n, l)
            )
        weight = (
            math.factorial(m - 2 * l)
            * math.factorial(l)
            * pochhammer(Fraction(dimension - 3, 2) + l, l)
        )
        total += weight * inner * inner
    return EllValue(dimension, order, math.factorial(m) * total, CLOSED_FORM)


def ell_oracle(dimension: int, order: int) -> EllValue:
    """l_N^m by symbolic differentiation of log|x|."""
    return EllValue(dimension, order, ell_symbolic(dimension, order), SYMBOLIC_ORACLE)


def sphere_area_exact(m: int) -> Tuple[Fraction, int]:
    """omega_m = coefficient * pi^k with rational coefficient (Gamma at half-integers)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if m % 2:
        # Gamma(k) = (k-1)!
        k = (m + 1) // 2
        coefficient, pi_power = Fraction(2, math.factorial(k - 1)), k
    else:
        # Gamma(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)
        n = m // 2
        coefficient = Fraction(2 * 4**n * math.factorial(n), math.factorial(2 * n))
        pi_power = n
    return coefficient, pi_power


def sphere_area(m: int, dps: int = 60) -> SphereArea:
    """Surface area of the unit sphere S^m in R^(m+1): 2 pi^((m+1)/2) / Gamma((m+1)/2)."""
    coefficient, pi_power = sphere_area_exact(m)
    with mpmath.workdps(dps):
        half = mpmath.mpf(m + 1) / 2
        value = 2 * mpmath.pi**half / mpmath.gamma(half)
    return SphereArea(m, coefficient, pi_power, value)


def best_constant(dimension: int, dps: int = 60, check_oracle: bool = True) -> BestConstant:
    """K_N with l_N from the closed form, cross-checked against the symbolic oracle."""
    if dimension < 1:
        raise ValueError("N must be at least 1")
    ell = ell_closed_form(dimension, dimension).value
    if check_oracle:
        symbolic = ell_symbolic(dimension, dimension)
        if symbolic != ell:
            raise OracleMismatchError(
                f"l_{dimension}: closed form gives {ell}, symbolic computation gives {symbolic}"
            )
    sphere = sphere_area(dimension - 1, dps)
    with mpmath.workdps(dps):
        value = 1 / (mpmath.sqrt(mpmath.mpf(ell.numerator) / ell.denominator) * sphere.value)
    logger.debug("K_%d = %s", dimension, mpmath.nstr(value, 15))
    return BestConstant(dimension, ell, sphere, value)


EllRow = Tuple[int, int, EllValue, bool]


def ell_table(max_dimension: int, with_oracle: bool = True) -> List[EllRow]:
    """Rows (N, m, closed-form value, agrees-with-oracle) for 1 <= m <= N <= max_dimension."""
    rows = []
    for dimension in range(1, max_dimension + 1):
        for order in range(1, dimension + 1):
            closed = ell_closed_form(dimension, order)
            agree = ell_symbolic(dimension, order) == closed.value if with_oracle else True
            rows.append((dimension, order, closed, agree))
    return rows


def kn_table(max_dimension: int, dps: int = 60, check_oracle: bool = True) -> List[BestConstant]:
    """K_1, ..., K_{max_dimension} in order."""
    return [best_constant(n, dps, check_oracle) for n in range(1, max_dimension + 1)]
