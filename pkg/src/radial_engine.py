"""Radial calculus in the variable s = |x|^2 / 2.

For a radial u, every mixed partial is sum_i u^(m-i)(s) P_{m-2i}(x) with universal
integer polynomials P (the chain-rule table). Profiles deliver truncated Taylor
expansions (jets) in s, so high-order s-derivatives come from exact recurrences
instead of finite differences.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, fields
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from .closed_form import ell_closed_form, sphere_area
from .config import PrecisionConfig, QuadratureConfig
from .errors import JetError
from .exact_core import MultivariatePolynomial, RadialSymbolicExpr, polynomial_ring
from .quadrature import (
    QuadratureResult,
    geometric_breakpoints,
    integrate_adaptive,
    integrate_piecewise,
)
from .tensor_calc import DerivativeTensor, Key, frobenius_norm_sq, sorted_keys

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction, mpmath.mpf]


def _mpf(value: Number) -> mpmath.mpf:
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


class Jet:
    """Truncated Taylor series c_0 + c_1 h + ... + c_K h^K around ``base``.

    Coefficients are mpmath floats at the caller's working precision. All jets
    combined in one computation share the base point of the independent variable
    and the order K.
    """

    __slots__ = ("base", "coeffs")

    def __init__(self, base: Number, coeffs: Sequence[Number]):
        if not len(coeffs):
            raise JetError("a jet needs at least one coefficient")
        self.base = _mpf(base)
        self.coeffs = tuple(_mpf(c) for c in coeffs)

    @classmethod
    def variable(cls, base: Number, order: int) -> "Jet":
        return cls(base, ([base, 1] + [0] * order)[: order + 1])

    @classmethod
    def constant(cls, value: Number, base: Number, order: int) -> "Jet":
        return cls(base, [value] + [0] * order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> mpmath.mpf:
        return self.coeffs[0]

    def derivative(self, k: int) -> mpmath.mpf:
        return self.coeffs[k] * math.factorial(k)

    def _like(self, coeffs: Sequence) -> "Jet":
        return Jet(self.base, coeffs)

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order or other.base != self.base:
                raise JetError("jets must share base point and order")
            return other
        return Jet.constant(other, self.base, self.order)

    def __add__(self, other):
        other = self._coerce(other)
        return self._like([a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return self._like([-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            factor = _mpf(other)
            return self._like([a * factor for a in self.coeffs])
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        return self._like(
            [mpmath.fsum(a[j] * b[k - j] for j in range(k + 1)) for k in range(len(a))]
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1 / _mpf(other))
        other = self._coerce(other)
        b = other.coeffs
        if b[0] == 0:
            raise JetError("division by a jet with zero constant term")
        q: List[mpmath.mpf] = []
        for k, a_k in enumerate(self.coeffs):
            q.append((a_k - mpmath.fsum(b[j] * q[k - j] for j in range(1, k + 1))) / b[0])
        return self._like(q)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def reciprocal(self) -> "Jet":
        return 1 / self

    def exp(self) -> "Jet":
        a = self.coeffs
        b = [mpmath.exp(a[0])]
        for k in range(1, len(a)):
            b.append(mpmath.fsum(j * a[j] * b[k - j] for j in range(1, k + 1)) / k)
        return self._like(b)

    def log(self) -> "Jet":
        a = self.coeffs
        if a[0] <= 0:
            raise JetError("log of a jet with non-positive constant term")
        b = [mpmath.log(a[0])]
        for k in range(1, len(a)):
            b.append((a[k] - mpmath.fsum(j * b[j] * a[k - j] for j in range(1, k)) / k) / a[0])
        return self._like(b)

    def sqrt(self) -> "Jet":
        a = self.coeffs
        if a[0] <= 0:
            raise JetError("sqrt of a jet with non-positive constant term")
        b = [mpmath.sqrt(a[0])]
        for k in range(1, len(a)):
            b.append((a[k] - mpmath.fsum(b[j] * b[k - j] for j in range(1, k))) / (2 * b[0]))
        return self._like(b)

    def compose(self, outer: "Jet") -> "Jet":
        """g(self) where ``outer`` holds the Taylor coefficients of g at self.value."""
        if outer.base != self.value or outer.order != self.order:
            raise JetError("outer jet must be expanded at the inner value with the same order")
        shift = self - self.value
        result = Jet.constant(outer.coeffs[-1], self.base, self.order)
        for c in reversed(outer.coeffs[:-1]):
            result = result * shift + c
        return result

    def integrate(self, constant: Number) -> "Jet":
        """Antiderivative with the given value at the base point (order kept)."""
        return self._like([constant] + [c / (k + 1) for k, c in enumerate(self.coeffs[:-1])])

    def __repr__(self):
        coeffs = ", ".join(mpmath.nstr(c, 8) for c in self.coeffs)
        return f"Jet(base={mpmath.nstr(self.base, 8)}; {coeffs})"


_JET_OPS: Dict[str, Callable[..., Jet]] = {
    "add": lambda a, b: a + b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "reciprocal": lambda a: a.reciprocal(),
    "exp": lambda a: a.exp(),
    "log": lambda a: a.log(),
    "compose": lambda outer, inner: inner.compose(outer),
}


def jet_arith(op: str, *operands: Jet) -> Jet:
    """Apply one of add | mul | div | reciprocal | exp | log | compose to jets."""
    try:
        return _JET_OPS[op](*operands)
    except KeyError:
        raise ValueError(f"unknown jet operation {op!r}; expected one of {sorted(_JET_OPS)}")


def _psi(x: Jet) -> Jet:
    if x.value <= 0:
        return Jet.constant(0, x.base, x.order)
    return (-1 / x).exp()


def smooth_step(t: Jet) -> Jet:
    """phi(t) = psi(2t-1) / (psi(2t-1) + psi(2-2t)): 0 on [0, 1/2], 1 on [1, inf)."""
    if t.value <= 0.5:
        return Jet.constant(0, t.base, t.order)
    if t.value >= 1:
        return Jet.constant(1, t.base, t.order)
    rising, falling = _psi(2 * t - 1), _psi(2 - 2 * t)
    return rising / (rising + falling)


def smooth_step_value(t: float) -> float:
    if t <= 0.5:
        return 0.0
    if t >= 1.0:
        return 1.0
    rising, falling = math.exp(-1.0 / (2 * t - 1)), math.exp(-1.0 / (2 - 2 * t))
    return rising / (rising + falling)


def smooth_cutoff(t: float, delta: float, order: int) -> Jet:
    """Jet of phi(t / delta) in the variable t."""
    if t < 0 or delta <= 0:
        raise ValueError("need t >= 0 and delta > 0")
    return smooth_step(Jet.variable(t, order) / delta)


@dataclass(frozen=True)
class ChainRuleTable:
    """P^(alpha)_{m-2i} for every sorted key alpha; ``polynomials[key][i]`` is P_{m-2i}."""

    dimension: int
    order: int
    polynomials: Dict[Key, Tuple[MultivariatePolynomial, ...]] = field(repr=False)

    def for_multi_index(self, alpha: Sequence[int]) -> Tuple[MultivariatePolynomial, ...]:
        """Look up by exponent vector (alpha_0, ..., alpha_{N-1}), |alpha| = m."""
        if len(alpha) != self.dimension or sum(alpha) != self.order:
            raise ValueError(f"alpha must have {self.dimension} entries summing to {self.order}")
        key = tuple(axis for axis, count in enumerate(alpha) for _ in range(count))
        return self.polynomials[key]

    @cached_property
    def axis_coefficients(self) -> Dict[Key, Tuple[Fraction, ...]]:
        """Coefficient of x0^(m-2i) in each P_{m-2i}: the table at x = r e_0, r = 1."""
        m = self.order
        result = {}
        for key, polys in self.polynomials.items():
            result[key] = tuple(
                p.coefficient((m - 2 * i,) + (0,) * (self.dimension - 1))
                for i, p in enumerate(polys)
            )
        return result


@lru_cache(maxsize=None)
def chain_rule_table(dimension: int, order: int) -> ChainRuleTable:
    """Build the table by induction: d_j [u^(k) P] = u^(k+1) x_j P + u^(k) d_j P."""
    if order < 1:
        raise ValueError("order must be at least 1")
    R = polynomial_ring(dimension)
    level = {(j,): [R.gens[j]] for j in range(dimension)}
    for m in range(2, order + 1):
        nxt = {}
        for key in sorted_keys(dimension, m):
            axis, gen = key[-1], R.gens[key[-1]]
            polys = [R.zero] * (m // 2 + 1)
            for i, p in enumerate(level[key[:-1]]):
                polys[i] += gen * p
                dp = p.diff(gen)
                if dp:
                    polys[i + 1] += dp
            nxt[key] = polys
        level = nxt
    return ChainRuleTable(
        dimension,
        order,
        {k: tuple(MultivariatePolynomial(dimension, p) for p in v) for k, v in level.items()},
    )


class RadialProfile(ABC):
    """Radial function u(x) = U(s), s = |x|^2/2, evaluated through jets in s."""

    @abstractmethod
    def jet(self, s: Jet) -> Jet:
        """U applied to a jet of s."""

    @abstractmethod
    def value_at_origin(self) -> float:
        """u(0)."""

    @property
    def name(self) -> str:
        """Class name with the field values, e.g. ``BumpProfile(radius=0.5)``."""
        params = ", ".join(
            f"{f.name}={_format_parameter(getattr(self, f.name))}" for f in fields(self)
        )
        return f"{type(self).__name__}({params})"

    @property
    def support_radius(self) -> Optional[float]:
        """Radius of a ball containing the support (None if not compactly supported)."""
        return None

    def seams(self) -> Tuple[float, ...]:
        """Radii where the profile switches formula (quadrature breakpoints)."""
        return ()

    def s_jet(self, r: float, order: int) -> Jet:
        """Jet of the profile in s at s = r^2/2."""
        if r <= 0:
            raise ValueError(f"radius must be positive, got {r}")
        radius = _mpf(r)
        return self.jet(Jet.variable(radius * radius / 2, order))

    def value(self, r: float) -> float:
        if r == 0:
            return self.value_at_origin()
        return float(self.s_jet(r, 0).value)

    def breakpoints(self) -> List[float]:
        outer = self.support_radius
        if outer is None:
            raise ValueError(f"{self.name} is not compactly supported")
        return [0.0] + [p for p in self.seams() if 0 < p < outer] + [outer]


def _format_parameter(value) -> str:
    if isinstance(value, tuple):
        return "(" + ", ".join(_format_parameter(v) for v in value) + ")"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def _radius(s: Jet) -> Jet:
    return (2 * s).sqrt()


@dataclass(frozen=True)
class LogProfile(RadialProfile):
    """sign * log|x| = (sign/2) log(2s)."""

    sign: int = 1

    def jet(self, s: Jet) -> Jet:
        return (2 * s).log() * Fraction(self.sign, 2)

    def value_at_origin(self) -> float:
        raise ValueError("log|x| is unbounded at the origin")


@dataclass(frozen=True)
class PolynomialProfile(RadialProfile):
    """U(s) = sum_k c_k s^k with rational coefficients."""

    coefficients: Tuple[Fraction, ...]

    def jet(self, s: Jet) -> Jet:
        result = Jet.constant(0, s.base, s.order)
        for c in reversed(self.coefficients):
            result = result * s + _mpf(Fraction(c))
        return result

    def value_at_origin(self) -> float:
        return float(self.coefficients[0]) if self.coefficients else 0.0

    def s_derivative_expression(self, dimension: int, j: int) -> RadialSymbolicExpr:
        """U^(j)(|x|^2/2) as an exact expression."""
        total = RadialSymbolicExpr.zero(dimension)
        for k, c in enumerate(self.coefficients):
            if k >= j and c:
                falling = math.factorial(k) // math.factorial(k - j)
                coeff = Fraction(c) * falling / 2 ** (k - j)
                total = total + RadialSymbolicExpr.radius_power(dimension, 2 * (k - j)) * coeff
        return total.canonicalize()

    def expression(self, dimension: int) -> RadialSymbolicExpr:
        return self.s_derivative_expression(dimension, 0)


@dataclass(frozen=True)
class BumpProfile(RadialProfile):
    """Mollifier exp(1 - 1/(1 - r^2/R^2)) inside B_R, 0 outside; u(0) = 1."""

    radius: float = 1.0

    def jet(self, s: Jet) -> Jet:
        q = 1 - s * (2 / _mpf(self.radius) ** 2)
        if q.value <= 0:
            return Jet.constant(0, s.base, s.order)
        return (1 - 1 / q).exp()

    def value_at_origin(self) -> float:
        return 1.0

    @property
    def support_radius(self) -> float:
        return self.radius


@dataclass(frozen=True)
class PlateauProfile(RadialProfile):
    """1 - phi(r/R): equal to 1 on B_{R/2}, 0 outside B_R."""

    radius: float = 1.0

    def jet(self, s: Jet) -> Jet:
        return 1 - smooth_step(_radius(s) / self.radius)

    def value_at_origin(self) -> float:
        return 1.0

    @property
    def support_radius(self) -> float:
        return self.radius

    def seams(self) -> Tuple[float, ...]:
        return (self.radius / 2,)


@dataclass(frozen=True)
class ShellProfile(RadialProfile):
    """phi(r/inner) (1 - phi(r/outer)): vanishes on B_{inner/2}."""

    inner: float = 0.5
    outer: float = 2.0

    def __post_init__(self):
        if not 0 < self.inner < self.outer:
            raise ValueError("need 0 < inner < outer")

    def jet(self, s: Jet) -> Jet:
        r = _radius(s)
        return smooth_step(r / self.inner) * (1 - smooth_step(r / self.outer))

    def value_at_origin(self) -> float:
        return 0.0

    @property
    def support_radius(self) -> float:
        return self.outer

    def seams(self) -> Tuple[float, ...]:
        return (self.inner / 2, self.inner, self.outer / 2)


@dataclass(frozen=True)
class GaussianCutoffProfile(RadialProfile):
    """exp(-|x|^2 / (2 w^2)) (1 - phi(r/R))."""

    width: float = 0.5
    radius: float = 2.0

    def jet(self, s: Jet) -> Jet:
        gauss = (s * (-1 / _mpf(self.width) ** 2)).exp()
        return gauss * (1 - smooth_step(_radius(s) / self.radius))

    def value_at_origin(self) -> float:
        return 1.0

    @property
    def support_radius(self) -> float:
        return self.radius

    def seams(self) -> Tuple[float, ...]:
        return (self.radius / 2,)


@dataclass(frozen=True)
class ExponentialProfile(RadialProfile):
    """exp(-sqrt(|x|^2 + delta^2)), optionally truncated by 1 - phi(r/T).

    With delta = 0 this is e^{-|x|}; without truncation integrals stop at
    ``tail_radius`` where the profile is below double precision.
    """

    smoothing: float = 0.0
    truncation: Optional[float] = None
    tail_radius: float = 40.0

    def jet(self, s: Jet) -> Jet:
        result = (-(2 * s + _mpf(self.smoothing) ** 2).sqrt()).exp()
        if self.truncation is not None:
            result = result * (1 - smooth_step(_radius(s) / self.truncation))
        return result

    def value_at_origin(self) -> float:
        return math.exp(-self.smoothing)

    @property
    def support_radius(self) -> float:
        return self.truncation if self.truncation is not None else self.tail_radius

    def seams(self) -> Tuple[float, ...]:
        return (self.truncation / 2,) if self.truncation is not None else ()


@dataclass(frozen=True)
class DilatedProfile(RadialProfile):
    """v(lambda x) for a base profile v."""

    base: RadialProfile
    scale: float

    def jet(self, s: Jet) -> Jet:
        return self.base.jet(s * _mpf(self.scale) ** 2)

    def value_at_origin(self) -> float:
        return self.base.value_at_origin()

    @property
    def name(self) -> str:
        return f"{self.base.name}(x*{self.scale:g})"

    @property
    def support_radius(self) -> Optional[float]:
        outer = self.base.support_radius
        return None if outer is None else outer / self.scale

    def seams(self) -> Tuple[float, ...]:
        return tuple(p / self.scale for p in self.base.seams())


@dataclass(frozen=True)
class SumProfile(RadialProfile):
    """Linear combination sum_k w_k v_k."""

    parts: Tuple[Tuple[float, RadialProfile], ...]

    def jet(self, s: Jet) -> Jet:
        total = Jet.constant(0, s.base, s.order)
        for weight, profile in self.parts:
            total = total + profile.jet(s) * weight
        return total

    def value_at_origin(self) -> float:
        return sum(w * p.value_at_origin() for w, p in self.parts)

    @property
    def name(self) -> str:
        return " + ".join(f"{w:g}*{p.name}" for w, p in self.parts)

    @property
    def support_radius(self) -> Optional[float]:
        radii = [p.support_radius for _, p in self.parts]
        return None if any(r is None for r in radii) else max(radii)

    def seams(self) -> Tuple[float, ...]:
        return tuple(sorted({x for _, p in self.parts for x in p.seams()}))


@lru_cache(maxsize=4096)
def transition_integral(lower: float) -> float:
    """int_lower^1 phi(t)/t dt for lower in [1/2, 1]."""
    if lower >= 1.0:
        return 0.0
    lower = max(lower, 0.5)
    return integrate_adaptive(lambda t: smooth_step_value(t) / t, lower, 1.0, tol=1e-14).value


@dataclass(frozen=True)
class ExtremalProfile(RadialProfile):
    """u_eps = zeta(|x|) f_eps(|x|) with f_eps(t) = -log eps - int_eps^t phi(tau/eps)/tau dtau.

    zeta(r) = 1 - phi(r/2) equals 1 on B_1 and 0 outside B_2. On B_{eps/2} the
    profile is the constant log(1/eps) + int_{1/2}^1 phi(t)/t dt.
    """

    eps: float

    def __post_init__(self):
        if not 0 < self.eps < 0.25:
            raise ValueError(f"eps must lie in (0, 1/4), got {self.eps}")

    def _f_value(self, r: mpmath.mpf) -> mpmath.mpf:
        if r >= self.eps:
            return -mpmath.log(r)
        return -mpmath.log(_mpf(self.eps)) + transition_integral(float(r) / self.eps)

    def jet(self, s: Jet) -> Jet:
        r = _radius(s)
        # df/ds = f'(t) dt/ds = -phi(t/eps)/t^2 with t^2 = 2s
        slope = -smooth_step(r / self.eps) / (2 * s)
        f = slope.integrate(self._f_value(r.value))
        zeta = 1 - smooth_step(_radius(s) / 2)
        return zeta * f

    def value_at_origin(self) -> float:
        return -math.log(self.eps) + transition_integral(0.5)

    @property
    def name(self) -> str:
        return f"u_eps(eps={self.eps:g})"

    @property
    def support_radius(self) -> float:
        return 2.0

    def seams(self) -> Tuple[float, ...]:
        return (self.eps / 2, self.eps, 1.0)


def extremal_profile(eps: float) -> ExtremalProfile:
    """u_eps with the outer cutoff fixed at radius 2."""
    return ExtremalProfile(eps)


def _default_dps(dimension: int) -> int:
    return PrecisionConfig.from_config().jet_dps_for(dimension)


def radial_tensor(
    profile: RadialProfile,
    dimension: int,
    r: float,
    order: Optional[int] = None,
    direction: Optional[Sequence[float]] = None,
    dps: Optional[int] = None,
) -> DerivativeTensor:
    """Float tensor grad^m u at r * direction (default direction e_0)."""
    m = order or dimension
    table = chain_rule_table(dimension, m)
    with mpmath.workdps(dps or _default_dps(dimension)):
        jet = profile.s_jet(r, m + 1)
        derivs = [jet.derivative(k) for k in range(m + 1)]
        entries = {}
        if direction is None:
            radius = _mpf(r)
            for key, coeffs in table.axis_coefficients.items():
                entries[key] = float(
                    mpmath.fsum(
                        derivs[m - i] * _mpf(c) * radius ** (m - 2 * i)
                        for i, c in enumerate(coeffs)
                        if c
                    )
                )
        else:
            unit = np.asarray(direction, dtype=float)
            point = r * unit / np.linalg.norm(unit)
            for key, polys in table.polynomials.items():
                entries[key] = float(
                    mpmath.fsum(
                        derivs[m - i] * p.evaluate_float(point)
                        for i, p in enumerate(polys)
                        if not p.is_zero
                    )
                )
    return DerivativeTensor(dimension, m, entries)


def radial_grad_norm(
    profile: RadialProfile,
    dimension: int,
    r: float,
    order: Optional[int] = None,
    direction: Optional[Sequence[float]] = None,
    dps: Optional[int] = None,
) -> float:
    """|grad^m u|(r); radial, so the direction only matters for cross-checks."""
    return math.sqrt(frobenius_norm_sq(radial_tensor(profile, dimension, r, order, direction, dps)))


def radial_tensor_entries(
    profile: RadialProfile,
    dimension: int,
    order: int,
    point: Sequence[float],
    dps: Optional[int] = None,
) -> DerivativeTensor:
    """Float tensor grad^m u at an arbitrary nonzero point."""
    vector = np.asarray(point, dtype=float)
    r = float(np.linalg.norm(vector))
    if r == 0.0:
        raise ValueError("point must be nonzero")
    return radial_tensor(profile, dimension, r, order, direction=vector, dps=dps)


def log_derivative_ratio(k: int, s: float, dps: int = 30) -> float:
    """(d/ds)^(k+1) log|x| / (d/ds)^k log|x| in the s variable; equals -k/s."""
    if k < 1 or s <= 0:
        raise ValueError("need k >= 1 and s > 0")
    with mpmath.workdps(dps):
        jet = LogProfile().jet(Jet.variable(s, k + 1))
        return float(jet.derivative(k + 1) / jet.derivative(k))


def assemble_tensor_exact(
    profile: PolynomialProfile, dimension: int, order: int
) -> DerivativeTensor:
    """grad^m u as exact expressions from the chain-rule table and exact s-derivatives."""
    table = chain_rule_table(dimension, order)
    lowest = order - order // 2
    derivs = {k: profile.s_derivative_expression(dimension, k) for k in range(lowest, order + 1)}
    entries = {}
    for key, polys in table.polynomials.items():
        total = RadialSymbolicExpr.zero(dimension)
        for i, p in enumerate(polys):
            if not p.is_zero:
                total = total + derivs[order - i] * RadialSymbolicExpr.from_polynomial(p)
        entries[key] = total.canonicalize()
    return DerivativeTensor(dimension, order, entries)


@dataclass(frozen=True)
class ExtremalRatio:
    """int |grad^N u_eps| against u_eps(0) and the predicted limit sqrt(l_N) omega_{N-1}."""

    dimension: int
    eps: float
    numerator: QuadratureResult
    denominator: float
    limit: float

    @property
    def ratio(self) -> float:
        return self.numerator.value / self.denominator

    @property
    def ratio_error(self) -> float:
        return self.numerator.error_estimate / self.denominator


def extremal_ratio(
    dimension: int, eps: float, tol: Optional[float] = None, dps: Optional[int] = None
) -> ExtremalRatio:
    """Quadrature of omega_{N-1} int_0^2 |grad^N u_eps|(r) r^{N-1} dr, split at the seams."""
    profile = extremal_profile(eps)
    dps = dps or _default_dps(dimension)
    quadrature = QuadratureConfig.from_config()
    if tol is None:
        tol = quadrature.tolerance_for(dimension)
    omega = float(sphere_area(dimension - 1).value)

    def integrand(r: float) -> float:
        return radial_grad_norm(profile, dimension, r, dps=dps) * r ** (dimension - 1)

    points = [0.0, eps / 2] + geometric_breakpoints(eps, 1.0) + [2.0]
    integral = integrate_piecewise(integrand, points, tol, quadrature.limit).scaled(omega)
    limit = math.sqrt(ell_closed_form(dimension, dimension).value) * omega
    result = ExtremalRatio(dimension, eps, integral, profile.value_at_origin(), limit)
    logger.info(
        "N=%d eps=%g: ratio %.10f (limit %.10f, %d evaluations)",
        dimension,
        eps,
        result.ratio,
        limit,
        integral.evaluations,
    )
    return result


def linear_intercept(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Two-point linear extrapolation to x = 0 using the two smallest x."""
    if len(xs) != len(ys) or len(xs) < 2:
        raise ValueError("need at least two (x, y) pairs")
    (x1, y1), (x2, y2) = sorted(zip(xs, ys))[:2]
    if x1 == x2:
        raise ValueError("extrapolation points must differ")
    _, intercept = np.polyfit([x1, x2], [y1, y2], 1)
    return float(intercept)


def extrapolate_limit(
    eps_values: Sequence[float],
    ratios: Sequence[float],
    variable: str = "log",
    origin_values: Optional[Sequence[float]] = None,
) -> float:
    """Extrapolate eps -> 0 against x = 1/log(1/eps) ("log") or x = 1/u_eps(0) ("value").

    The ratio is affine in 1/u_eps(0), so "value" is exact up to quadrature error.
    """
    if variable == "log":
        xs = [1 / math.log(1 / eps) for eps in eps_values]
    elif variable == "value":
        if origin_values is None:
            origin_values = [extremal_profile(eps).value_at_origin() for eps in eps_values]
        xs = [1 / v for v in origin_values]
    else:
        raise ValueError(f"unknown extrapolation variable {variable!r}")
    return linear_intercept(xs, ratios)


def extremal_sweep(
    dimension: int,
    eps_values: Sequence[float],
    tol: Optional[float] = None,
    dps: Optional[int] = None,
) -> List[ExtremalRatio]:
    """extremal_ratio for each eps, in the given order."""
    return [extremal_ratio(dimension, eps, tol, dps) for eps in eps_values]


@dataclass(frozen=True)
class ExtremalProperties:
    """Measured constants behind the four defining properties of u_eps."""

    dimension: int
    eps: float
    origin_offset: float
    log_deviation: float
    inner_scaled: Tuple[float, ...]
    outer_bounds: Tuple[float, ...]


def extremal_properties(
    dimension: int, eps: float, samples: int = 32, dps: Optional[int] = None
) -> ExtremalProperties:
    """u_eps(0) - log(1/eps), sup |u_eps + log r| on [eps, 1], eps^k sup_{B_eps}|grad^k u_eps|
    and sup_{|x| >= 1}|grad^k u_eps| for k = 1..N, sampled on grids."""
    profile = extremal_profile(eps)
    middle = np.geomspace(eps, 1.0, samples)
    inner = np.linspace(eps / samples, eps, samples)
    outer = np.linspace(1.0, 2.0, samples)
    inner_scaled, outer_bounds = [], []
    for k in range(1, dimension + 1):
        inner_scaled.append(
            max(eps**k * radial_grad_norm(profile, dimension, r, k, dps=dps) for r in inner)
        )
        outer_bounds.append(max(radial_grad_norm(profile, dimension, r, k, dps=dps) for r in outer))
    return ExtremalProperties(
        dimension,
        eps,
        origin_offset=profile.value_at_origin() - math.log(1 / eps),
        log_deviation=max(abs(profile.value(r) + math.log(r)) for r in middle),
        inner_scaled=tuple(inner_scaled),
        outer_bounds=tuple(outer_bounds),
    )
