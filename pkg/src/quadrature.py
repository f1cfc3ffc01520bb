"""Adaptive 1-D quadrature on top of QUADPACK (Gauss-Kronrod with embedded error)."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy.integrate import quad

from .errors import QuadratureError

logger = logging.getLogger(__name__)

DEFAULT_LIMIT = 400


@dataclass(frozen=True)
class QuadratureResult:
    """Value, error estimate and evaluation count of an adaptive integral."""

    value: float
    error_estimate: float
    evaluations: int
    converged: bool

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.evaluations + other.evaluations,
            self.converged and other.converged,
        )

    def scaled(self, factor: float) -> "QuadratureResult":
        return QuadratureResult(
            self.value * factor,
            self.error_estimate * abs(factor),
            self.evaluations,
            self.converged,
        )


def integrate_adaptive(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float,
    limit: int = DEFAULT_LIMIT,
    raise_on_failure: bool = True,
) -> QuadratureResult:
    """
    Integrate f over [a, b] by adaptive bisection with the 21-point Kronrod rule.

    Stops once the embedded error estimate is at most tol * max(1, |value|).

    Raises:
        QuadratureError: if QUADPACK reports non-convergence and raise_on_failure is set
    """
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    output = quad(f, a, b, epsabs=tol, epsrel=tol, limit=limit, full_output=1)
    value, error, info = output[0], output[1], output[2]
    converged = len(output) == 3 and error <= tol * max(1.0, abs(value))
    result = QuadratureResult(float(value), float(error), int(info["neval"]), converged)
    if not converged:
        message = output[3] if len(output) > 3 else "error estimate above tolerance"
        logger.warning("quadrature on [%g, %g] did not converge: %s", a, b, message)
        if raise_on_failure:
            raise QuadratureError(
                f"integral on [{a}, {b}] did not reach tol={tol:g} "
                f"(estimate {error:.3e} after {result.evaluations} evaluations)"
            )
    return result


def integrate_piecewise(
    f: Callable[[float], float],
    breakpoints: Sequence[float],
    tol: float,
    limit: int = DEFAULT_LIMIT,
    raise_on_failure: bool = True,
) -> QuadratureResult:
    """Integrate over consecutive panels [b_k, b_{k+1}] and fsum the pieces."""
    points = sorted(set(float(p) for p in breakpoints))
    if len(points) < 2:
        raise ValueError("need at least two distinct breakpoints")
    pieces = [
        integrate_adaptive(f, lo, hi, tol, limit, raise_on_failure)
        for lo, hi in zip(points[:-1], points[1:])
    ]
    return QuadratureResult(
        math.fsum(p.value for p in pieces),
        math.fsum(p.error_estimate for p in pieces),
        sum(p.evaluations for p in pieces),
        all(p.converged for p in pieces),
    )


def geometric_breakpoints(lo: float, hi: float, ratio: float = 10.0) -> list:
    """lo, lo*ratio, lo*ratio^2, ... up to hi (for integrands scaling like 1/r)."""
    points = [lo]
    while points[-1] * ratio < hi:
        points.append(points[-1] * ratio)
    points.append(hi)
    return points
