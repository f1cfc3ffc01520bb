"""Numerical certificates on radial test functions.

Three checks, each reduced to a 1-D radial integral:

- the weak identity  int |x|^N (grad^N v).(grad^N log|x|) dx = -l_N omega_{N-1} v(0)
- the embedding inequality  |v(0)| <= K_N int |grad^N v|
- equality in dimension one for v = e^{-|x|}
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence

import numpy as np

from .closed_form import best_constant, ell_closed_form, sphere_area
from .config import QuadratureConfig
from .errors import CertificateError, InequalityViolationError
from .quadrature import (  # noqa: F401  (re-exported primitives)
    QuadratureResult,
    geometric_breakpoints,
    integrate_adaptive,
    integrate_piecewise,
)
from .radial_engine import (
    BumpProfile,
    DilatedProfile,
    ExponentialProfile,
    GaussianCutoffProfile,
    PlateauProfile,
    RadialProfile,
    ShellProfile,
    SumProfile,
    radial_grad_norm,
    radial_tensor,
)
from .tensor_calc import DerivativeTensor, contract, frobenius_norm_sq, log_derivative_tensor

logger = logging.getLogger(__name__)

# panels wider than this ratio get geometric refinement (1/r-type integrands)
PANEL_RATIO = 10.0


def _tolerance(dimension: int, tol: Optional[float]) -> float:
    return tol if tol is not None else QuadratureConfig.from_config().tolerance_for(dimension)


def _panel_limit() -> int:
    return QuadratureConfig.from_config().limit


def integration_panels(profile: RadialProfile) -> List[float]:
    """Seams of the profile, with wide panels split geometrically."""
    points = profile.breakpoints()
    panels = [points[0]]
    for lo, hi in zip(points[:-1], points[1:]):
        if lo > 0 and hi / lo > PANEL_RATIO:
            panels.extend(geometric_breakpoints(lo, hi, PANEL_RATIO)[1:])
        else:
            panels.append(hi)
    return panels


@lru_cache(maxsize=None)
def _kernel_on_axis(dimension: int) -> DerivativeTensor:
    axis = [0.0] * dimension
    axis[0] = 1.0
    return log_derivative_tensor(dimension, dimension).evaluate(axis)


def log_kernel(dimension: int, direction: Optional[Sequence[float]] = None) -> DerivativeTensor:
    """|x|^N grad^N log|x| on the unit vector ``direction`` (degree 0, so constant on rays)."""
    if direction is None:
        return _kernel_on_axis(dimension)
    unit = np.asarray(direction, dtype=float)
    return log_derivative_tensor(dimension, dimension).evaluate(unit / np.linalg.norm(unit))


def pairing_density(
    profile: RadialProfile,
    dimension: int,
    r: float,
    direction: Optional[Sequence[float]] = None,
    dps: Optional[int] = None,
) -> float:
    """g(r) = r^N (grad^N v).(grad^N log|x|) at r * direction."""
    tensor = radial_tensor(profile, dimension, r, direction=direction, dps=dps)
    return contract(log_kernel(dimension, direction), tensor)


def direction_independence_error(
    profile: RadialProfile,
    dimension: int,
    radii: Sequence[float],
    rng: np.random.Generator,
    directions: int = 20,
    dps: Optional[int] = None,
) -> float:
    """Largest gap between g on the axis and g along random directions.

    Gaps are measured relative to the Cauchy-Schwarz bound sqrt(l_N) |grad^N v|.
    """
    root_ell = math.sqrt(ell_closed_form(dimension, dimension).value)
    worst = 0.0
    for r in radii:
        on_axis = pairing_density(profile, dimension, r, dps=dps)
        tensor = radial_tensor(profile, dimension, r, dps=dps)
        bound = root_ell * math.sqrt(frobenius_norm_sq(tensor))
        for _ in range(directions):
            direction = rng.standard_normal(dimension)
            value = pairing_density(profile, dimension, r, direction, dps)
            worst = max(worst, abs(value - on_axis) / max(bound, abs(on_axis), 1e-300))
    return worst


def cauchy_schwarz_check(
    profile: RadialProfile, dimension: int, radii: Sequence[float], dps: Optional[int] = None
) -> float:
    """
    Verify |g(r)| <= sqrt(l_N) |grad^N v|(r) at every sampled radius.

    Returns:
        The largest ratio |g| / (sqrt(l_N) |grad^N v|) seen

    Raises:
        CertificateError: if the ratio exceeds 1 beyond rounding
    """
    root_ell = math.sqrt(ell_closed_form(dimension, dimension).value)
    worst = 0.0
    for r in radii:
        tensor = radial_tensor(profile, dimension, r, dps=dps)
        norm = math.sqrt(frobenius_norm_sq(tensor))
        if norm == 0.0:
            continue
        ratio = abs(contract(_kernel_on_axis(dimension), tensor)) / (root_ell * norm)
        worst = max(worst, ratio)
    if worst > 1 + 1e-9:
        raise CertificateError(f"pointwise Cauchy-Schwarz bound exceeded: ratio {worst:.12f}")
    return worst


@dataclass(frozen=True)
class WeakIdentityReport:
    """Both sides of the weak identity for one test profile.

    The relative error is taken against l_N omega_{N-1} max(1, |v(0)|), so profiles
    vanishing near the origin are judged on an absolute scale.
    """

    dimension: int
    profile: str
    lhs: QuadratureResult
    rhs: float
    relative_error: float

    def passed(self, threshold: float = 1e-6) -> bool:
        return self.lhs.converged and self.relative_error <= threshold


def weak_identity_check(
    dimension: int,
    profile: RadialProfile,
    tol: Optional[float] = None,
    dps: Optional[int] = None,
) -> WeakIdentityReport:
    """Pair a compactly supported radial profile with the kernel |x|^N grad^N log|x|."""
    if profile.support_radius is None:
        raise ValueError(f"{profile.name} must be compactly supported")
    tol = _tolerance(dimension, tol)
    omega = float(sphere_area(dimension - 1).value)
    ell = float(ell_closed_form(dimension, dimension).value)

    def integrand(r: float) -> float:
        return pairing_density(profile, dimension, r, dps=dps) * r ** (dimension - 1)

    lhs = integrate_piecewise(
        integrand, integration_panels(profile), tol, _panel_limit()
    ).scaled(omega)
    v0 = profile.value_at_origin()
    rhs = -ell * omega * v0
    scale = ell * omega * max(1.0, abs(v0))
    report = WeakIdentityReport(dimension, profile.name, lhs, rhs, abs(lhs.value - rhs) / scale)
    logger.info(
        "weak identity N=%d %s: lhs %.12g rhs %.12g (rel. err %.2e)",
        dimension,
        profile.name,
        lhs.value,
        rhs,
        report.relative_error,
    )
    return report


@dataclass(frozen=True)
class EmbeddingReport:
    """|v(0)| against K_N int |grad^N v|; margin = (rhs - lhs) / rhs."""

    dimension: int
    profile: str
    lhs: float
    integral: QuadratureResult
    constant: float
    rhs: float
    margin: float

    @property
    def margin_error(self) -> float:
        """Quadrature error bar on the margin."""
        return self.constant * self.integral.error_estimate / self.rhs

    def strictly_positive(self, tol: float = 0.0) -> bool:
        """Margin above zero by more than its error bar plus ``tol``."""
        return self.margin > self.margin_error + tol


def _check_peak(profile: RadialProfile, samples: int) -> float:
    peak = abs(profile.value_at_origin())
    outer = profile.support_radius
    for r in np.linspace(outer / samples, outer, samples):
        if abs(profile.value(float(r))) > peak * (1 + 1e-12):
            raise ValueError(f"{profile.name} does not attain max |v| at the origin (r={r:g})")
    return peak


def gradient_mass(
    profile: RadialProfile,
    dimension: int,
    tol: Optional[float] = None,
    dps: Optional[int] = None,
) -> QuadratureResult:
    """int_{R^N} |grad^N v| = omega_{N-1} int_0^R |grad^N v|(r) r^{N-1} dr."""
    omega = float(sphere_area(dimension - 1).value)

    def integrand(r: float) -> float:
        return radial_grad_norm(profile, dimension, r, dps=dps) * r ** (dimension - 1)

    return integrate_piecewise(
        integrand, integration_panels(profile), _tolerance(dimension, tol), _panel_limit()
    ).scaled(omega)


def embedding_inequality_check(
    dimension: int,
    profile: RadialProfile,
    tol: Optional[float] = None,
    dps: Optional[int] = None,
    peak_samples: int = 64,
) -> EmbeddingReport:
    """
    Check |v(0)| <= K_N int |grad^N v| for a profile peaked at the origin.

    Raises:
        ValueError: if the profile is not compactly supported or not peaked at 0
        InequalityViolationError: if the inequality fails beyond quadrature slack
    """
    if profile.support_radius is None:
        raise ValueError(f"{profile.name} must be compactly supported")
    lhs = _check_peak(profile, peak_samples)
    integral = gradient_mass(profile, dimension, tol, dps)
    constant = float(best_constant(dimension, check_oracle=False).value)
    rhs = constant * integral.value
    slack = constant * integral.error_estimate + _tolerance(dimension, tol)
    if lhs > rhs + slack:
        raise InequalityViolationError(
            f"N={dimension} {profile.name}: |v(0)| = {lhs:.12g} exceeds "
            f"K_N int|grad^N v| = {rhs:.12g}"
        )
    margin = (rhs - lhs) / rhs
    logger.info("inequality N=%d %s: margin %.6g", dimension, profile.name, margin)
    return EmbeddingReport(dimension, profile.name, lhs, integral, constant, rhs, margin)


def equality_case_check(
    profile: Optional[RadialProfile] = None, tol: Optional[float] = None
) -> EmbeddingReport:
    """Dimension one: v(0) = (1/2) int |v'| for any radially decreasing v, e.g. e^{-|x|}."""
    return embedding_inequality_check(1, profile or ExponentialProfile(), tol)


def dilation_invariance_gap(
    dimension: int,
    profile: RadialProfile,
    scale: float,
    tol: Optional[float] = None,
    dps: Optional[int] = None,
    base: Optional[WeakIdentityReport] = None,
) -> float:
    """Gap between the weak-identity pairings of v and v(scale x), relative to l_N omega_{N-1}.

    ``base`` reuses an existing report for v.
    """
    if base is None:
        base = weak_identity_check(dimension, profile, tol, dps)
    dilated = weak_identity_check(dimension, DilatedProfile(profile, scale), tol, dps)
    scale_ref = float(ell_closed_form(dimension, dimension).value) * float(
        sphere_area(dimension - 1).value
    )
    return abs(base.lhs.value - dilated.lhs.value) / scale_ref


def seminorm_dilation_gap(
    dimension: int,
    profile: RadialProfile,
    scale: float,
    tol: Optional[float] = None,
    dps: Optional[int] = None,
    base: Optional[QuadratureResult] = None,
) -> float:
    """Relative gap between int |grad^N v| and int |grad^N v(scale x)|."""
    if base is None:
        base = gradient_mass(profile, dimension, tol, dps)
    dilated = gradient_mass(DilatedProfile(profile, scale), dimension, tol, dps)
    return abs(base.value - dilated.value) / abs(base.value)


def profile_corpus(peaked_only: bool = False) -> List[RadialProfile]:
    """Compactly supported smooth test profiles; ``peaked_only`` keeps those with max |v| at 0."""
    corpus: List[RadialProfile] = [
        BumpProfile(1.0),
        GaussianCutoffProfile(1.0, 1.5),
        PlateauProfile(1.0),
        GaussianCutoffProfile(0.5, 2.0),
        DilatedProfile(ExponentialProfile(smoothing=0.2, truncation=4.0), 2.0),
        SumProfile(((1.0, BumpProfile(1.0)), (0.5, PlateauProfile(2.0)))),
        ExponentialProfile(smoothing=0.5, truncation=6.0),
        DilatedProfile(GaussianCutoffProfile(1.0, 3.0), 0.5),
        SumProfile(((1.0, BumpProfile(1.5)), (0.25, GaussianCutoffProfile(0.3, 1.0)))),
    ]
    if not peaked_only:
        corpus.append(ShellProfile(0.5, 2.0))
    return corpus
