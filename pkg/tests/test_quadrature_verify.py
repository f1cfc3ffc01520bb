"""Tests for adaptive quadrature and the numerical certificates."""

import math

import numpy as np
import pytest

from src.errors import CertificateError, QuadratureError
from src.quadrature_verify import (
    QuadratureResult,
    cauchy_schwarz_check,
    dilation_invariance_gap,
    direction_independence_error,
    embedding_inequality_check,
    equality_case_check,
    geometric_breakpoints,
    gradient_mass,
    integrate_adaptive,
    integrate_piecewise,
    integration_panels,
    log_kernel,
    pairing_density,
    profile_corpus,
    seminorm_dilation_gap,
    weak_identity_check,
)
from src.radial_engine import (
    BumpProfile,
    ExponentialProfile,
    GaussianCutoffProfile,
    LogProfile,
    PlateauProfile,
    ShellProfile,
    extremal_profile,
)

# Quadrature


def test_integrate_polynomial():
    """Test int_0^1 r dr = 1/2."""
    result = integrate_adaptive(lambda r: r, 0.0, 1.0, 1e-12)

    assert result.value == pytest.approx(0.5, abs=1e-14)
    assert result.converged
    assert result.error_estimate <= 1e-12


def test_integrate_one_over_r():
    """Test int_eps^1 dr/r = log(1/eps) with geometric panels."""
    eps = 1e-3
    result = integrate_piecewise(lambda r: 1 / r, geometric_breakpoints(eps, 1.0), 1e-12)

    assert result.value == pytest.approx(math.log(1 / eps), rel=1e-12)


def test_integrate_truncated_exponential():
    """Test int_0^40 e^-r r dr = 1 up to the truncated tail."""
    result = integrate_adaptive(lambda r: math.exp(-r) * r, 0.0, 40.0, 1e-12)

    assert result.value == pytest.approx(1.0, abs=1e-12)


def test_integrate_rejects_empty_interval():
    """Test a < b is required."""
    with pytest.raises(ValueError):
        integrate_adaptive(lambda r: r, 1.0, 1.0, 1e-10)


def test_non_convergence_raises():
    """Test an iteration cap too small for the integrand raises QuadratureError."""
    with pytest.raises(QuadratureError):
        integrate_adaptive(lambda r: math.sin(1 / r), 1e-6, 1.0, 1e-12, limit=2)


def test_non_convergence_can_be_reported():
    """Test raise_on_failure=False returns the unconverged estimate."""
    result = integrate_adaptive(
        lambda r: math.sin(1 / r), 1e-6, 1.0, 1e-12, limit=2, raise_on_failure=False
    )

    assert not result.converged


def test_quadrature_result_arithmetic():
    """Test sums and scaling of results."""
    a = QuadratureResult(1.0, 1e-12, 21, True)
    b = QuadratureResult(2.0, 2e-12, 42, False)

    total = a + b
    assert (total.value, total.evaluations, total.converged) == (3.0, 63, False)
    assert a.scaled(-2.0).error_estimate == pytest.approx(2e-12)


def test_geometric_breakpoints():
    """Test decade panels end exactly at the upper limit."""
    assert geometric_breakpoints(1e-3, 1.0) == pytest.approx([1e-3, 1e-2, 1e-1, 1.0])


def test_integration_panels_refine_wide_panels():
    """Test seams are kept and wide panels split geometrically."""
    panels = integration_panels(extremal_profile(1e-3))

    assert panels[:3] == pytest.approx([0.0, 5e-4, 1e-3])
    assert any(p == pytest.approx(1e-2) for p in panels)
    assert panels[-2:] == [1.0, 2.0]


# Weak identity


def test_log_kernel_norm():
    """Test |x|^N |grad^N log|x|| = sqrt(l_N) on the sphere."""
    kernel = log_kernel(3)
    norm = math.sqrt(sum(kernel.multiplicities()[k] * v * v for k, v in kernel.entries.items()))

    assert norm == pytest.approx(math.sqrt(28))


def test_weak_identity_bump_dimension_two():
    """Test the N = 2 pairing of a bump with v(0) = 1 gives -4 pi."""
    report = weak_identity_check(2, BumpProfile(1.0))

    assert report.rhs == pytest.approx(-4 * math.pi)
    assert report.lhs.value == pytest.approx(-4 * math.pi, rel=1e-6)
    assert report.passed()


@pytest.mark.parametrize("dimension", [2, 3])
def test_weak_identity_corpus(dimension):
    """Test the weak identity on every corpus profile."""
    for profile in profile_corpus()[:4]:
        report = weak_identity_check(dimension, profile)
        assert report.relative_error <= 1e-6, profile.name


@pytest.mark.slow
@pytest.mark.parametrize("dimension", [2, 3])
def test_weak_identity_full_corpus(dimension):
    """Test the weak identity on the full corpus."""
    for profile in profile_corpus():
        assert weak_identity_check(dimension, profile).passed(), profile.name


def test_weak_identity_dimension_one():
    """Test int sign(x) v'(x) dx = -2 v(0)."""
    report = weak_identity_check(1, GaussianCutoffProfile(0.5, 2.0))

    assert report.lhs.value == pytest.approx(-2.0, rel=1e-8)


def test_weak_identity_vanishes_away_from_origin():
    """Test a profile vanishing near 0 pairs to zero."""
    report = weak_identity_check(2, ShellProfile(0.5, 2.0))

    assert report.rhs == 0.0
    assert abs(report.lhs.value) <= 1e-6 * 4 * math.pi


def test_weak_identity_dilation_invariance():
    """Test v and v(2x) give the same pairing."""
    assert dilation_invariance_gap(2, BumpProfile(1.0), 2.0) <= 1e-8


def test_weak_identity_requires_compact_support():
    """Test unbounded supports are refused."""
    with pytest.raises(ValueError):
        weak_identity_check(2, LogProfile())


def test_pairing_is_direction_free(rng):
    """Test g(r) at r e_0 equals g along random directions."""
    profile = GaussianCutoffProfile(0.5, 2.0)
    error = direction_independence_error(profile, 3, [0.4, 1.1, 1.7], rng, directions=5)

    assert error <= 1e-9


def test_pairing_density_of_log():
    """Test g = l_N r^-N when v is log|x| itself."""
    for dimension, ell in ((2, 2), (3, 28)):
        value = pairing_density(LogProfile(), dimension, 0.9, dps=20)
        assert value == pytest.approx(ell / 0.9**dimension, rel=1e-12)


def test_cauchy_schwarz_pointwise():
    """Test |g| <= sqrt(l_N) |grad^N v| on sampled radii."""
    radii = np.linspace(0.05, 1.95, 12)
    for profile in (BumpProfile(1.0), GaussianCutoffProfile(0.5, 2.0), PlateauProfile(1.0)):
        assert cauchy_schwarz_check(profile, 2, radii) <= 1 + 1e-12


def test_cauchy_schwarz_detects_violation(mocker):
    """Test a kernel with the wrong normalization trips the check."""
    mocker.patch("src.quadrature_verify.ell_closed_form").return_value.value = 0.01

    with pytest.raises(CertificateError):
        cauchy_schwarz_check(BumpProfile(1.0), 2, [0.9])


# Embedding inequality


def test_equality_case_dimension_one():
    """Test v(0) = (1/2) int |v'| for v = e^{-|x|}."""
    report = equality_case_check()

    assert report.constant == pytest.approx(0.5)
    assert abs(report.margin) <= 1e-8


def test_equality_case_mollified_exponential():
    """Test equality for the untruncated mollified exponential when N = 1."""
    report = equality_case_check(ExponentialProfile(smoothing=0.1, truncation=None))

    assert abs(report.margin) <= 1e-6


def test_gradient_mass_of_exponential():
    """Test int_R |d/dx e^{-|x|}| = 2."""
    assert gradient_mass(ExponentialProfile(), 1).value == pytest.approx(2.0, abs=1e-8)


def test_equality_case_any_decreasing_profile():
    """Test equality holds for every radially decreasing profile when N = 1."""
    report = equality_case_check(BumpProfile(1.0))

    assert abs(report.margin) <= 1e-8


def test_inequality_strict_dimension_two():
    """Test margins clear their quadrature error bars for N = 2."""
    for profile in profile_corpus(peaked_only=True)[:4]:
        report = embedding_inequality_check(2, profile)
        assert report.strictly_positive(), profile.name


@pytest.mark.slow
def test_inequality_strict_dimension_three_full_corpus():
    """Test every peaked corpus profile has a strictly positive margin for N = 3."""
    for profile in profile_corpus(peaked_only=True):
        report = embedding_inequality_check(3, profile)
        assert report.strictly_positive(), profile.name


def test_margin_error_scales_quadrature_error():
    """Test the margin error bar is K_N times the integral error over the bound."""
    report = embedding_inequality_check(2, BumpProfile(1.0))

    expected = report.constant * report.integral.error_estimate / report.rhs
    assert report.margin_error == pytest.approx(expected)
    assert report.margin > report.margin_error


def test_inequality_extremal_margin_small():
    """Test u_eps at eps = 1e-3 nearly attains the constant for N = 2."""
    report = embedding_inequality_check(2, extremal_profile(1e-3))

    assert 0 < report.margin < 0.3


def test_inequality_requires_peak_at_origin():
    """Test profiles not maximal at 0 are refused."""
    with pytest.raises(ValueError):
        embedding_inequality_check(2, ShellProfile(0.5, 2.0))


def test_seminorm_dilation_invariance():
    """Test int |grad^N v(lambda x)| = int |grad^N v| in dimension N."""
    assert seminorm_dilation_gap(2, GaussianCutoffProfile(0.5, 2.0), 3.0) <= 1e-8


def test_profile_corpus_contents():
    """Test the corpus has ten profiles, nine of them peaked at 0."""
    assert len(profile_corpus()) == 10
    assert len(profile_corpus(peaked_only=True)) == 9
    assert all(p.support_radius is not None for p in profile_corpus())
    assert ExponentialProfile().support_radius == 40.0


def test_profile_corpus_names_are_distinct():
    """Test every corpus profile is a different function with its own name."""
    names = [p.name for p in profile_corpus()]

    assert len(set(names)) == len(names) == 10


def test_dilation_gaps_reuse_base():
    """Test passing the undilated result gives the same gap as recomputing it."""
    profile = BumpProfile(1.0)
    report = weak_identity_check(2, profile)
    mass = gradient_mass(profile, 2)

    assert dilation_invariance_gap(2, profile, 2.0, base=report) == pytest.approx(
        dilation_invariance_gap(2, profile, 2.0), abs=1e-12
    )
    assert seminorm_dilation_gap(2, profile, 2.0, base=mass) == pytest.approx(
        seminorm_dilation_gap(2, profile, 2.0), abs=1e-12
    )
