"""Exception hierarchy shared by the library and the command line."""


class SobolevError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SobolevError, ValueError):
    """Invalid run configuration (CLI exit code 2)."""


class ZeroPointError(SobolevError, ValueError):
    """A radial expression was evaluated at the origin."""


class ZeroExpressionError(SobolevError, ValueError):
    """An operation that needs a nonzero expression received zero."""


class ShapeMismatchError(SobolevError, ValueError):
    """Two tensors (or a tensor and a matrix) have incompatible shapes."""


class NonOrthogonalError(SobolevError, ValueError):
    """A matrix failed the A^T A = I check."""


class JetError(SobolevError, ArithmeticError):
    """Invalid truncated Taylor arithmetic (zero divisor, log of non-positive value)."""


class QuadratureError(SobolevError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""


class CertificateError(SobolevError, AssertionError):
    """A mathematical certificate failed (CLI exit code 1)."""


class NonConstantError(CertificateError):
    """|x|^{2m} |grad^m log|x||^2 did not reduce to a constant."""


class OracleMismatchError(CertificateError):
    """The closed form and the symbolic computation of ell disagree."""


class InequalityViolationError(CertificateError):
    """A profile violated the embedding inequality beyond quadrature slack."""
