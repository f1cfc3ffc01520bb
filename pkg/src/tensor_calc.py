"""Symmetric derivative tensors, orthogonal transformations and the log|x| certificates.

Tensors of mixed partials are stored by sorted multi-index (a multiset of axes);
each key stands for all ``m!/(k_1!...k_N!)`` equal partials it represents.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import NonConstantError, NonOrthogonalError, ShapeMismatchError
from .exact_core import MultivariatePolynomial, RadialSymbolicExpr, polynomial_ring

logger = logging.getLogger(__name__)

Key = Tuple[int, ...]
Entry = Union[RadialSymbolicExpr, float]
Seed = Union[RadialSymbolicExpr, Sequence[RadialSymbolicExpr]]

# (a, b, c) with a^2 + b^2 = c^2
PYTHAGOREAN_TRIPLES = ((3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25), (20, 21, 29), (12, 35, 37))


@lru_cache(maxsize=None)
def sorted_keys(dimension: int, order: int) -> Tuple[Key, ...]:
    """All sorted multi-indices of size ``order`` over ``range(dimension)``."""
    return tuple(itertools.combinations_with_replacement(range(dimension), order))


@lru_cache(maxsize=None)
def multiplicity(key: Key) -> int:
    """Number of index tuples represented by a sorted key: m!/(k_1!...k_N!)."""
    count = math.factorial(len(key))
    for _, group in itertools.groupby(key):
        count //= math.factorial(len(list(group)))
    return count


class DerivativeTensor:
    """Order-m symmetric tensor of mixed partials in dimension N."""

    __slots__ = ("dimension", "order", "entries")

    def __init__(self, dimension: int, order: int, entries: Dict[Key, Entry]):
        keys = sorted_keys(dimension, order)
        if len(entries) != len(keys) or any(k not in entries for k in keys):
            raise ShapeMismatchError(
                f"expected the {len(keys)} sorted keys of an order-{order} tensor in "
                f"dimension {dimension}"
            )
        self.dimension = dimension
        self.order = order
        self.entries = entries

    def __getitem__(self, index: Sequence[int]) -> Entry:
        return self.entries[tuple(sorted(index))]

    @property
    def is_symbolic(self) -> bool:
        return any(isinstance(e, RadialSymbolicExpr) for e in self.entries.values())

    def multiplicities(self) -> Dict[Key, int]:
        return {k: multiplicity(k) for k in self.entries}

    def evaluate(self, point: Sequence[float]) -> "DerivativeTensor":
        """Float tensor at a point (entries already numeric pass through)."""
        return DerivativeTensor(
            self.dimension,
            self.order,
            {
                k: e.evaluate_numeric(point) if isinstance(e, RadialSymbolicExpr) else float(e)
                for k, e in self.entries.items()
            },
        )

    def __eq__(self, other):
        if not isinstance(other, DerivativeTensor):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and self.order == other.order
            and all(self.entries[k] == other.entries[k] for k in self.entries)
        )

    __hash__ = None

    def __repr__(self):
        return f"DerivativeTensor(N={self.dimension}, m={self.order}, keys={len(self.entries)})"


def log_gradient(dimension: int) -> List[RadialSymbolicExpr]:
    """Gradient of log|x|: x_i |x|^-2."""
    return [
        RadialSymbolicExpr.from_polynomial(MultivariatePolynomial.variable(dimension, i), -2)
        for i in range(dimension)
    ]


def derivative_tensor(seed: Seed, order: int) -> DerivativeTensor:
    """Exact tensor of order-m mixed partials.

    ``seed`` is either an expression u of the symbolic class or the gradient of a
    function outside it (log|x| is passed through ``log_gradient``). Only sorted
    representatives are differentiated: entry(key) = d_{key[-1]} entry(key[:-1]).
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    if isinstance(seed, RadialSymbolicExpr):
        dimension = seed.dimension
        first = [seed.differentiate(i) for i in range(dimension)]
    else:
        first = [e.canonicalize() for e in seed]
        dimension = len(first)
    level: Dict[Key, RadialSymbolicExpr] = {(i,): first[i] for i in range(dimension)}
    for m in range(2, order + 1):
        level = {key: level[key[:-1]].differentiate(key[-1]) for key in sorted_keys(dimension, m)}
    return DerivativeTensor(dimension, order, level)


@lru_cache(maxsize=None)
def log_derivative_tensor(dimension: int, order: int) -> DerivativeTensor:
    """grad^m log|x| (cached; tensors are never mutated)."""
    return derivative_tensor(log_gradient(dimension), order)


def _weighted_sum(tensor: DerivativeTensor, values: Dict[Key, Entry]) -> Entry:
    if tensor.is_symbolic:
        total = RadialSymbolicExpr.zero(tensor.dimension)
        for k, v in values.items():
            total = total + v * multiplicity(k)
        return total.canonicalize()
    return math.fsum(multiplicity(k) * v for k, v in values.items())


def frobenius_norm_sq(tensor: DerivativeTensor) -> Entry:
    """Sum of squares over all N^m index tuples, via multiplicities."""
    return _weighted_sum(tensor, {k: e * e for k, e in tensor.entries.items()})


def contract(tensor: DerivativeTensor, other: DerivativeTensor) -> Entry:
    """Full contraction sum_{i_1..i_m} T_i S_i."""
    if tensor.dimension != other.dimension or tensor.order != other.order:
        raise ShapeMismatchError(
            f"cannot contract (N={tensor.dimension}, m={tensor.order}) with "
            f"(N={other.dimension}, m={other.order})"
        )
    products = {k: tensor.entries[k] * other.entries[k] for k in tensor.entries}
    if other.is_symbolic and not tensor.is_symbolic:
        return _weighted_sum(other, products)
    return _weighted_sum(tensor, products)


@dataclass(frozen=True)
class OrthogonalMatrix:
    """A in O(N); ``rows[j][i]`` is a_{j,i}. Exact when built from Fractions."""

    rows: Tuple[Tuple[Union[Fraction, float], ...], ...]

    FLOAT_TOLERANCE = 1e-12

    def __post_init__(self):
        n = len(self.rows)
        if any(len(row) != n for row in self.rows):
            raise ShapeMismatchError("orthogonal matrix must be square")
        if self.exact:
            gram = [
                [sum(self.rows[k][i] * self.rows[k][j] for k in range(n)) for j in range(n)]
                for i in range(n)
            ]
            if any(gram[i][j] != (1 if i == j else 0) for i in range(n) for j in range(n)):
                raise NonOrthogonalError("A^T A differs from the identity")
        else:
            a = self.as_array()
            residual = float(np.max(np.abs(a.T @ a - np.eye(n))))
            if residual > self.FLOAT_TOLERANCE:
                raise NonOrthogonalError(f"A^T A residual {residual:.3e} exceeds tolerance")

    @property
    def dimension(self) -> int:
        return len(self.rows)

    @property
    def exact(self) -> bool:
        return all(isinstance(a, (int, Fraction)) for row in self.rows for a in row)

    @classmethod
    def identity(cls, dimension: int) -> "OrthogonalMatrix":
        return cls(
            tuple(
                tuple(Fraction(int(i == j)) for j in range(dimension)) for i in range(dimension)
            )
        )

    @classmethod
    def from_array(cls, array: np.ndarray) -> "OrthogonalMatrix":
        return cls(tuple(tuple(float(a) for a in row) for row in np.asarray(array)))

    def as_array(self) -> np.ndarray:
        return np.array([[float(a) for a in row] for row in self.rows])

    def __matmul__(self, other: "OrthogonalMatrix") -> "OrthogonalMatrix":
        n = self.dimension
        return OrthogonalMatrix(
            tuple(
                tuple(sum(self.rows[i][k] * other.rows[k][j] for k in range(n)) for j in range(n))
                for i in range(n)
            )
        )


def rational_orthogonal_matrix(
    dimension: int, rng: np.random.Generator, rotations: Optional[int] = None
) -> OrthogonalMatrix:
    """Exact rotation composed of Pythagorean-triple Givens rotations in random planes."""
    matrix = OrthogonalMatrix.identity(dimension)
    if dimension == 1:
        return OrthogonalMatrix(((Fraction(int(rng.choice([-1, 1]))),),))
    for _ in range(rotations if rotations is not None else 2 * dimension):
        i, j = sorted(int(v) for v in rng.choice(dimension, size=2, replace=False))
        a, b, c = PYTHAGOREAN_TRIPLES[int(rng.integers(len(PYTHAGOREAN_TRIPLES)))]
        cos, sin = Fraction(a, c), Fraction(b, c) * int(rng.choice([-1, 1]))
        rows = [list(row) for row in OrthogonalMatrix.identity(dimension).rows]
        rows[i][i], rows[i][j], rows[j][i], rows[j][j] = cos, -sin, sin, cos
        matrix = OrthogonalMatrix(tuple(tuple(row) for row in rows)) @ matrix
    return matrix


def random_orthogonal_matrix(dimension: int, rng: np.random.Generator) -> OrthogonalMatrix:
    """Haar-distributed A from the QR factorization of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((dimension, dimension)))
    q = q * np.sign(np.diag(r))
    return OrthogonalMatrix.from_array(q)


def _transform_coefficients(
    matrix: OrthogonalMatrix, order: int
) -> Dict[Key, Dict[Key, Union[Fraction, float]]]:
    """For each output key I: {sorted J: sum over tuples j ~ J of prod_s a_{j_s, I_s}}."""
    n = matrix.dimension
    table: Dict[Key, Dict[Key, Union[Fraction, float]]] = {}
    for out_key in sorted_keys(n, order):
        coeffs: Dict[Key, Union[Fraction, float]] = {}
        for j in itertools.product(range(n), repeat=order):
            term = 1
            for js, i_s in zip(j, out_key):
                term = term * matrix.rows[js][i_s]
                if not term:
                    break
            if term:
                key = tuple(sorted(j))
                coeffs[key] = coeffs.get(key, 0) + term
        table[out_key] = {k: c for k, c in coeffs.items() if c}
    return table


def orthogonal_transform(tensor: DerivativeTensor, matrix: OrthogonalMatrix) -> DerivativeTensor:
    """Mixed partials of u_A(x) = u(Ax) from those of u.

    Symbolic entries (functions of y) are composed with y = A x. Numeric entries
    are taken to be already evaluated at y = A x.
    """
    if matrix.dimension != tensor.dimension:
        raise ShapeMismatchError(
            f"matrix dimension {matrix.dimension} != tensor dimension {tensor.dimension}"
        )
    symbolic = tensor.is_symbolic
    if symbolic and not matrix.exact:
        raise NonOrthogonalError("symbolic tensors need an exact rational orthogonal matrix")
    rows = matrix.rows
    source = (
        {k: e.compose_orthogonal(rows) for k, e in tensor.entries.items()}
        if symbolic
        else tensor.entries
    )
    entries: Dict[Key, Entry] = {}
    for out_key, coeffs in _transform_coefficients(matrix, tensor.order).items():
        if symbolic:
            total = RadialSymbolicExpr.zero(tensor.dimension)
            for k, c in coeffs.items():
                total = total + source[k] * c
            entries[out_key] = total.canonicalize()
        else:
            entries[out_key] = math.fsum(float(c) * source[k] for k, c in coeffs.items())
    return DerivativeTensor(tensor.dimension, tensor.order, entries)


def evaluate_tensor(tensor: DerivativeTensor, point: Sequence[float]) -> DerivativeTensor:
    """Float entries of a symbolic tensor at a point away from the origin."""
    return tensor.evaluate(point)


def transform_numeric(tensor: DerivativeTensor, matrix: OrthogonalMatrix) -> DerivativeTensor:
    """Float counterpart of orthogonal_transform; entries must already sit at y = A x."""
    if tensor.is_symbolic:
        raise ValueError("transform_numeric expects a tensor with float entries")
    return orthogonal_transform(tensor, matrix)


def laplacian(expr: RadialSymbolicExpr) -> RadialSymbolicExpr:
    """Sum of the pure second partials."""
    total = RadialSymbolicExpr.zero(expr.dimension)
    for i in range(expr.dimension):
        total = total + expr.differentiate(i).differentiate(i)
    return total.canonicalize()


def laplacian_check(dimension: int) -> bool:
    """grad^2 log|x| . grad^2(|x|^2/2) equals sum_i d_i d_i log|x| = (N-2)|x|^-2."""
    half_square = RadialSymbolicExpr.radius_power(dimension, 2) * Fraction(1, 2)
    paired = contract(log_derivative_tensor(dimension, 2), derivative_tensor(half_square, 2))
    gradient = log_gradient(dimension)
    divergence = RadialSymbolicExpr.zero(dimension)
    for i in range(dimension):
        divergence = divergence + gradient[i].differentiate(i)
    expected = RadialSymbolicExpr.radius_power(dimension, -2) * (dimension - 2)
    return paired == divergence == expected


def ell_symbolic(dimension: int, order: int) -> Fraction:
    """l_N^m = |x|^{2m} |grad^m log|x||^2, which must reduce to a constant."""
    norm_sq = frobenius_norm_sq(log_derivative_tensor(dimension, order))
    scaled = norm_sq.multiply_radius(2 * order).canonicalize()
    value = scaled.constant_value()
    if value is None:
        raise NonConstantError(
            f"|x|^{2 * order}|grad^{order} log|x||^2 is not constant for N={dimension}: {scaled}"
        )
    logger.debug("ell_symbolic(N=%d, m=%d) = %s", dimension, order, value)
    return value


def operator_L_apply(dimension: int) -> RadialSymbolicExpr:
    """F = (-1)^N sum_i d^N_i (|x|^N d^N_i log|x|) on R^N minus the origin."""
    tensor = log_derivative_tensor(dimension, dimension)
    total = RadialSymbolicExpr.zero(dimension)
    for key, entry in tensor.entries.items():
        weighted = entry.multiply_radius(dimension)
        for axis in key:
            weighted = weighted.differentiate(axis)
        total = total + weighted * multiplicity(key)
    result = (total * (-1) ** dimension).canonicalize()
    logger.info("operator F for N=%d: %s", dimension, "zero" if result.is_zero else result)
    return result


def invariance_inputs(dimension: int) -> List[Tuple[str, Seed]]:
    """Named inputs of the symbolic class for the invariance suite."""
    x = [RadialSymbolicExpr.coordinate(dimension, i) for i in range(dimension)]

    def r(power: int) -> RadialSymbolicExpr:
        return RadialSymbolicExpr.radius_power(dimension, power)

    inputs: List[Tuple[str, Seed]] = [
        ("log|x|", log_gradient(dimension)),
        ("|x|^4 - 3|x|^2", r(4) - r(2) * 3),
        ("x0^3 |x|^-3 + x0 |x|", x[0] * x[0] * x[0] * r(-3) + x[0] * r(1)),
    ]
    if dimension >= 2:
        inputs.append(("x0 x1 |x| + x1^2 |x|^-2", x[0] * x[1] * r(1) + x[1] * x[1] * r(-2)))
    return inputs


def exact_invariance_holds(tensor: DerivativeTensor, matrix: OrthogonalMatrix) -> bool:
    """|grad^m u_A|^2(x) == |grad^m u|^2(Ax) as an exact symbolic identity."""
    rotated = orthogonal_transform(tensor, matrix)
    lhs = frobenius_norm_sq(rotated)
    rhs = frobenius_norm_sq(tensor).compose_orthogonal(matrix.rows)
    return lhs == rhs


def numeric_invariance_error(
    tensor: DerivativeTensor, matrix: OrthogonalMatrix, point: Sequence[float]
) -> float:
    """Relative gap between |grad^m u_A(x)| and |grad^m u|(Ax) at a float point."""
    y = matrix.as_array() @ np.asarray(point, dtype=float)
    at_y = tensor.evaluate(y)
    lhs = math.sqrt(frobenius_norm_sq(orthogonal_transform(at_y, matrix)))
    rhs = math.sqrt(frobenius_norm_sq(at_y))
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)


def numeric_contraction_error(
    tensor: DerivativeTensor,
    other: DerivativeTensor,
    matrix: OrthogonalMatrix,
    point: Sequence[float],
) -> float:
    """Relative gap of the polarized law: <T_A, S_A>(x) against <T, S>(Ax)."""
    y = matrix.as_array() @ np.asarray(point, dtype=float)
    t_y, s_y = tensor.evaluate(y), other.evaluate(y)
    lhs = contract(orthogonal_transform(t_y, matrix), orthogonal_transform(s_y, matrix))
    rhs = contract(t_y, s_y)
    scale = math.sqrt(frobenius_norm_sq(t_y) * frobenius_norm_sq(s_y))
    return abs(lhs - rhs) / max(scale, 1e-300)
