"""
Arithmetic of the Hurwitz algebras R, C, H and O.

An element is a coordinate vector over the standard basis f_1 = 1, f_2, ..., f_d.
The multiplication table comes from Cayley-Dickson doubling

    (a, b)(c, d) = (ac - conj(d) b, da + b conj(c))

applied R -> C -> H -> O. With this table f_2 f_3 = f_4, f_2 f_7 = -f_8 and
f_3 f_7 = -f_5 in O.

Coordinates are either ``fractions.Fraction`` (exact backend) or ``float``;
every scalar operation accepts both. Batched float products over numpy arrays
of shape (..., d) are provided for the samplers.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from conelab.models import (
    Algebra,
    AlgebraMismatchError,
    DomainError,
    ScalarPayload,
    ShapeError,
    format_number,
    parse_number,
)

Scalar = Fraction | float


def _cayley_dickson(x: Sequence[int], y: Sequence[int]) -> list[int]:
    if len(x) == 1:
        return [x[0] * y[0]]
    h = len(x) // 2
    a, b, c, d = x[:h], x[h:], y[:h], y[h:]

    def conj(z: Sequence[int]) -> list[int]:
        return [z[0], *(-t for t in z[1:])]

    def add(p: Sequence[int], q: Sequence[int], sign: int = 1) -> list[int]:
        return [s + sign * t for s, t in zip(p, q, strict=True)]

    first = add(_cayley_dickson(a, c), _cayley_dickson(conj(d), b), -1)
    second = add(_cayley_dickson(d, a), _cayley_dickson(b, conj(c)))
    return first + second


@lru_cache(maxsize=None)
def structure_tensor(algebra: Algebra) -> np.ndarray:
    """Integer array T with f_i f_j = sum_k T[i, j, k] f_k (0-based indices)."""
    d = algebra.dim
    table = np.zeros((d, d, d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            ei = [int(k == i) for k in range(d)]
            ej = [int(k == j) for k in range(d)]
            table[i, j] = _cayley_dickson(ei, ej)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def _sign_table(algebra: Algebra) -> tuple[tuple[tuple[int, int], ...], ...]:
    # Basis products are signed basis elements.
    tensor = structure_tensor(algebra)
    rows = []
    for i in range(algebra.dim):
        row = []
        for j in range(algebra.dim):
            (k,) = np.flatnonzero(tensor[i, j])
            row.append((int(k), int(tensor[i, j, k])))
        rows.append(tuple(row))
    return tuple(rows)


def _is_exact_value(value: object) -> bool:
    return isinstance(value, (Fraction, int)) and not isinstance(value, bool)


def _coerce(values: Iterable[Scalar | int], exact: bool) -> tuple[Scalar, ...]:
    if exact:
        return tuple(Fraction(v) for v in values)
    return tuple(float(v) for v in values)


@dataclass(frozen=True, slots=True)
class HurwitzScalar:
    """An element of R, C, H or O."""

    algebra: Algebra
    coeffs: tuple[Scalar, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.algebra.dim:
            raise ShapeError(
                f"{self.algebra.value} elements have {self.algebra.dim} coordinates, "
                f"got {len(self.coeffs)}"
            )

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_coeffs(
        cls, algebra: Algebra, coeffs: Iterable[Scalar | int], exact: bool | None = None
    ) -> HurwitzScalar:
        values = list(coeffs)
        if exact is None:
            exact = all(_is_exact_value(v) for v in values)
        return cls(algebra, _coerce(values, exact))

    @classmethod
    def zero(cls, algebra: Algebra, exact: bool = True) -> HurwitzScalar:
        return cls(algebra, _coerce([0] * algebra.dim, exact))

    @classmethod
    def real(cls, algebra: Algebra, value: Scalar | int, exact: bool | None = None) -> HurwitzScalar:
        return cls.from_coeffs(algebra, [value] + [0] * (algebra.dim - 1), exact)

    @classmethod
    def one(cls, algebra: Algebra, exact: bool = True) -> HurwitzScalar:
        return cls.real(algebra, 1, exact)

    @classmethod
    def unit(cls, algebra: Algebra, k: int, exact: bool = True) -> HurwitzScalar:
        """The basis element f_k, 1-based as in f_1 = 1."""
        if not 1 <= k <= algebra.dim:
            raise DomainError(f"f_{k} does not exist in {algebra.value}")
        return cls.from_coeffs(algebra, [int(i == k - 1) for i in range(algebra.dim)], exact)

    # -- backend ----------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs)

    def to_float(self) -> HurwitzScalar:
        return HurwitzScalar(self.algebra, _coerce(self.coeffs, False))

    def to_exact(self) -> HurwitzScalar:
        return HurwitzScalar(self.algebra, _coerce(self.coeffs, True))

    def as_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    # -- arithmetic -------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_real(self) -> bool:
        return not any(self.coeffs[1:])

    def __add__(self, other: HurwitzScalar) -> HurwitzScalar:
        _check_same(self, other)
        return HurwitzScalar.from_coeffs(
            self.algebra,
            [a + b for a, b in zip(self.coeffs, other.coeffs, strict=True)],
            self.is_exact and other.is_exact,
        )

    def __sub__(self, other: HurwitzScalar) -> HurwitzScalar:
        return self + (-other)

    def __neg__(self) -> HurwitzScalar:
        return HurwitzScalar(self.algebra, tuple(-c for c in self.coeffs))

    def __mul__(self, other: HurwitzScalar | Scalar | int) -> HurwitzScalar:
        if isinstance(other, HurwitzScalar):
            return mul(self, other)
        exact = self.is_exact and _is_exact_value(other)
        return HurwitzScalar.from_coeffs(self.algebra, [c * other for c in self.coeffs], exact)

    def __rmul__(self, other: Scalar | int) -> HurwitzScalar:
        return self * other

    def __truediv__(self, other: Scalar | int) -> HurwitzScalar:
        if other == 0:
            raise DomainError("division by zero")
        if self.is_exact and _is_exact_value(other):
            return self * (1 / Fraction(other))
        return self * (1.0 / float(other))

    def conj(self) -> HurwitzScalar:
        return conj(self)

    def re(self) -> Scalar:
        return self.coeffs[0]

    def norm2(self) -> Scalar:
        return sum((c * c for c in self.coeffs), Fraction(0) if self.is_exact else 0.0)

    def norm(self) -> float:
        return math.sqrt(float(self.norm2()))

    def inverse(self) -> HurwitzScalar:
        return inverse(self)

    def to_payload(self) -> ScalarPayload:
        return ScalarPayload(algebra=self.algebra, coeffs=[format_number(c) for c in self.coeffs])

    @classmethod
    def from_payload(cls, payload: ScalarPayload) -> HurwitzScalar:
        return cls.from_coeffs(payload.algebra, [parse_number(c) for c in payload.coeffs])

    def __repr__(self) -> str:
        terms = [f"{format_number(c)}*f{k + 1}" for k, c in enumerate(self.coeffs) if c]
        return f"{self.algebra.value}({' + '.join(terms) or '0'})"


def _check_same(x: HurwitzScalar, y: HurwitzScalar) -> None:
    if x.algebra is not y.algebra:
        raise AlgebraMismatchError(
            f"cannot combine {x.algebra.value} and {y.algebra.value} elements"
        )


def mul(x: HurwitzScalar, y: HurwitzScalar) -> HurwitzScalar:
    """Product under the Cayley-Dickson table."""
    _check_same(x, y)
    table = _sign_table(x.algebra)
    out: list[Scalar | int] = [0] * x.algebra.dim
    for i, a in enumerate(x.coeffs):
        if not a:
            continue
        row = table[i]
        for j, b in enumerate(y.coeffs):
            if not b:
                continue
            k, sign = row[j]
            out[k] += sign * a * b
    return HurwitzScalar.from_coeffs(x.algebra, out, x.is_exact and y.is_exact)


def conj(x: HurwitzScalar) -> HurwitzScalar:
    """Conjugate: negate every imaginary coordinate.

    Args:
        x: Scalar of any algebra, exact or float.

    Returns:
        conj(x) in the same algebra, with the same exactness.
    """
    return HurwitzScalar(x.algebra, (x.coeffs[0], *(-c for c in x.coeffs[1:])))


def re(x: HurwitzScalar) -> Scalar:
    """Real part.

    Args:
        x: Scalar of any algebra.

    Returns:
        The coefficient of 1, a Fraction when x is exact.
    """
    return x.coeffs[0]


def norm(x: HurwitzScalar) -> float:
    return x.norm()


def inner(x: HurwitzScalar, y: HurwitzScalar) -> Scalar:
    """<x, y> = Re(x conj(y)), the Euclidean inner product of coordinates."""
    _check_same(x, y)
    return re(mul(x, conj(y)))


def inverse(x: HurwitzScalar) -> HurwitzScalar:
    """Two-sided inverse conj(x) / |x|^2, valid in every Hurwitz algebra.

    Args:
        x: Nonzero scalar.

    Returns:
        The inverse, exact when x is exact.

    Raises:
        DomainError: x is zero.
    """
    n2 = x.norm2()
    if n2 == 0:
        raise DomainError("zero has no inverse")
    return conj(x) / n2


def commutator(x: HurwitzScalar, y: HurwitzScalar) -> HurwitzScalar:
    return mul(x, y) - mul(y, x)


def associator(x: HurwitzScalar, y: HurwitzScalar, z: HurwitzScalar) -> HurwitzScalar:
    return mul(mul(x, y), z) - mul(x, mul(y, z))


def basis_units(algebra: Algebra, exact: bool = True) -> list[HurwitzScalar]:
    return [HurwitzScalar.unit(algebra, k, exact) for k in range(1, algebra.dim + 1)]


# -- batched float arithmetic ---------------------------------------------


@lru_cache(maxsize=None)
def _float_tensor(algebra: Algebra) -> np.ndarray:
    tensor = structure_tensor(algebra).astype(float)
    tensor.setflags(write=False)
    return tensor


def mul_batch(a: np.ndarray, b: np.ndarray, algebra: Algebra) -> np.ndarray:
    """Elementwise product of arrays of shape (..., d); leading axes broadcast."""
    a, b = np.broadcast_arrays(a, b)
    return np.einsum("...i,...j,ijk->...k", a, b, _float_tensor(algebra), optimize=True)


def conj_batch(a: np.ndarray) -> np.ndarray:
    out = -a
    out[..., 0] = a[..., 0]
    return out


def re_mul_batch(a: np.ndarray, b: np.ndarray, algebra: Algebra) -> np.ndarray:
    """Re(ab) for arrays of shape (..., d) without forming the full product."""
    a, b = np.broadcast_arrays(a, b)
    return np.einsum("...i,...j,ij->...", a, b, _float_tensor(algebra)[:, :, 0], optimize=True)


# -- derivations ----------------------------------------------------------


def _generator_apply(a: HurwitzScalar, b: HurwitzScalar, x: HurwitzScalar) -> HurwitzScalar:
    # D_{a,b}(x) = [[a,b],x] - 3((ab)x - a(bx))
    return commutator(commutator(a, b), x) - 3 * associator(a, b, x)


@dataclass(frozen=True, slots=True)
class OctonionDerivation:
    """A derivation of O (or of H) written as a sum of generators D_{a,b}.

    Quaternion generators reduce to inner derivations x -> [[a,b], x] since
    the associator vanishes; R and C have no nonzero derivations.
    """

    generators: tuple[tuple[HurwitzScalar, HurwitzScalar], ...] = ()
    algebra: Algebra = Algebra.O

    def __post_init__(self) -> None:
        if self.algebra not in (Algebra.H, Algebra.O):
            raise DomainError(f"derivations are only modelled for H and O, not {self.algebra.value}")
        for a, b in self.generators:
            if a.algebra is not self.algebra or b.algebra is not self.algebra:
                raise AlgebraMismatchError("derivation generators must match the algebra tag")

    @classmethod
    def generator(cls, a: HurwitzScalar, b: HurwitzScalar) -> OctonionDerivation:
        _check_same(a, b)
        return cls(((a, b),), a.algebra)

    @classmethod
    def standard_basis(cls, algebra: Algebra = Algebra.O) -> list[OctonionDerivation]:
        """D_{f_i, f_j} for 2 <= i < j <= d; these span the derivation algebra."""
        units = basis_units(algebra)
        return [
            cls.generator(units[i], units[j])
            for i in range(1, algebra.dim)
            for j in range(i + 1, algebra.dim)
        ]

    def __call__(self, x: HurwitzScalar) -> HurwitzScalar:
        return derivation_apply(self, x)

    def scaled(self, factor: Scalar | int) -> OctonionDerivation:
        return OctonionDerivation(tuple((a * factor, b) for a, b in self.generators), self.algebra)

    def __add__(self, other: OctonionDerivation) -> OctonionDerivation:
        if other.algebra is not self.algebra:
            raise AlgebraMismatchError("cannot add derivations of different algebras")
        return OctonionDerivation(self.generators + other.generators, self.algebra)

    def matrix(self) -> np.ndarray:
        """Real d x d matrix whose column k holds D(f_{k+1})."""
        columns = [derivation_apply(self, f).as_array() for f in basis_units(self.algebra)]
        return np.column_stack(columns)


def derivation_apply(derivation: OctonionDerivation, x: HurwitzScalar) -> HurwitzScalar:
    if x.algebra is not derivation.algebra:
        raise AlgebraMismatchError(
            f"derivation of {derivation.algebra.value} applied to a {x.algebra.value} element"
        )
    total = HurwitzScalar.zero(x.algebra, x.is_exact)
    for a, b in derivation.generators:
        total = total + _generator_apply(a, b, x)
    return total
