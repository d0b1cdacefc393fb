"""
The Jordan algebra H_n(D) of hermitian matrices over a Hurwitz algebra.

Provides the matrix and vector value types, the Jordan product and trace form,
rank-one elements uu*, cone membership through the characteristic polynomial,
and the samplers of orthogonal primitive idempotents used by the checkers.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np

from conelab.hurwitz import (
    HurwitzScalar,
    Scalar,
    basis_units,
    conj,
    conj_batch,
    mul,
    mul_batch,
)
from conelab.models import (
    Algebra,
    AlgebraMismatchError,
    DomainError,
    MatrixPayload,
    ShapeError,
    VectorPayload,
)

if TYPE_CHECKING:
    from conelab.linmap import ConeMap

logger = logging.getLogger(__name__)

Entries = tuple[tuple[HurwitzScalar, ...], ...]


def _check_algebra_size(algebra: Algebra, n: int) -> None:
    if n < 1:
        raise ShapeError(f"matrix size must be positive, got {n}")
    if algebra is Algebra.O and n > 3:
        raise DomainError(f"H_n(O) is a Jordan algebra only for n <= 3, got n={n}")


@dataclass(frozen=True, slots=True)
class ConeVector:
    """A column vector in D^n."""

    algebra: Algebra
    components: tuple[HurwitzScalar, ...]

    @property
    def n(self) -> int:
        return len(self.components)

    @classmethod
    def from_coeffs(
        cls, algebra: Algebra, rows: Iterable[Iterable[Scalar | int]], exact: bool | None = None
    ) -> ConeVector:
        return cls(algebra, tuple(HurwitzScalar.from_coeffs(algebra, r, exact) for r in rows))

    @classmethod
    def from_reals(cls, algebra: Algebra, values: Iterable[Scalar | int]) -> ConeVector:
        return cls(algebra, tuple(HurwitzScalar.real(algebra, v) for v in values))

    @classmethod
    def from_array(cls, algebra: Algebra, array: np.ndarray) -> ConeVector:
        return cls(
            algebra, tuple(HurwitzScalar.from_coeffs(algebra, row, False) for row in array)
        )

    @classmethod
    def basis(cls, algebra: Algebra, n: int, index: int, exact: bool = True) -> ConeVector:
        """The unit vector e_{index+1}."""
        if not 0 <= index < n:
            raise ShapeError(f"basis index {index} out of range for n={n}")
        return cls(
            algebra,
            tuple(HurwitzScalar.real(algebra, int(i == index), exact) for i in range(n)),
        )

    @property
    def is_exact(self) -> bool:
        return all(c.is_exact for c in self.components)

    def to_float(self) -> ConeVector:
        return ConeVector(self.algebra, tuple(c.to_float() for c in self.components))

    def to_exact(self) -> ConeVector:
        return ConeVector(self.algebra, tuple(c.to_exact() for c in self.components))

    def as_array(self) -> np.ndarray:
        return np.array([c.as_array() for c in self.components])

    def norm2(self) -> Scalar:
        total: Scalar = Fraction(0) if self.is_exact else 0.0
        for c in self.components:
            total += c.norm2()
        return total

    def has_real_first(self) -> bool:
        return self.components[0].is_real()

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __add__(self, other: ConeVector) -> ConeVector:
        _check_vectors(self, other)
        return ConeVector(
            self.algebra,
            tuple(a + b for a, b in zip(self.components, other.components, strict=True)),
        )

    def __sub__(self, other: ConeVector) -> ConeVector:
        return self + other.scaled_real(-1)

    def scaled_real(self, factor: Scalar | int) -> ConeVector:
        return ConeVector(self.algebra, tuple(c * factor for c in self.components))

    def right_mul(self, y: HurwitzScalar) -> ConeVector:
        """The vector u y with components u_l y."""
        return ConeVector(self.algebra, tuple(mul(c, y) for c in self.components))

    def to_payload(self) -> VectorPayload:
        return VectorPayload(
            algebra=self.algebra, components=[c.to_payload() for c in self.components]
        )

    @classmethod
    def from_payload(cls, payload: VectorPayload) -> ConeVector:
        return cls(
            payload.algebra, tuple(HurwitzScalar.from_payload(c) for c in payload.components)
        )


def _check_vectors(u: ConeVector, v: ConeVector) -> None:
    if u.algebra is not v.algebra:
        raise AlgebraMismatchError(f"{u.algebra.value} vector combined with {v.algebra.value}")
    if u.n != v.n:
        raise ShapeError(f"vector sizes differ: {u.n} and {v.n}")


def adjoint_dot(u: ConeVector, v: ConeVector) -> HurwitzScalar:
    """u*v = sum of conj(u_l) v_l."""
    _check_vectors(u, v)
    total = HurwitzScalar.zero(u.algebra, u.is_exact and v.is_exact)
    for a, b in zip(u.components, v.components, strict=True):
        total = total + mul(conj(a), b)
    return total


@dataclass(frozen=True, slots=True)
class HermitianMatrix:
    """An element of H_n(D). Build through the classmethods, which hermitize."""

    algebra: Algebra
    n: int
    entries: Entries

    # -- construction -----------------------------------------------------

    @classmethod
    def _from_upper(cls, algebra: Algebra, n: int, get: Callable[[int, int], HurwitzScalar]) -> HermitianMatrix:
        rows: list[list[HurwitzScalar]] = [[None] * n for _ in range(n)]  # type: ignore[list-item]
        for l in range(n):  # noqa: E741
            diag = get(l, l)
            rows[l][l] = HurwitzScalar.real(algebra, diag.re(), diag.is_exact)
            for m in range(l + 1, n):
                x = get(l, m)
                rows[l][m] = x
                rows[m][l] = conj(x)
        return cls(algebra, n, tuple(tuple(r) for r in rows))

    @classmethod
    def from_entries(
        cls, algebra: Algebra, entries: Sequence[Sequence[HurwitzScalar]], tol: float = 0.0
    ) -> HermitianMatrix:
        """Validate symmetry and wrap; ``tol`` applies to float entries."""
        n = len(entries)
        _check_algebra_size(algebra, n)
        if any(len(row) != n for row in entries):
            raise ShapeError("entries must form a square array")
        for l in range(n):  # noqa: E741
            for m in range(l, n):
                a, b = entries[l][m], entries[m][l]
                if a.algebra is not algebra or b.algebra is not algebra:
                    raise AlgebraMismatchError(f"entry ({l},{m}) is not in {algebra.value}")
                diff = a - conj(b)
                if max(abs(float(c)) for c in diff.coeffs) > tol:
                    raise DomainError(f"matrix is not hermitian at ({l},{m})")
        return cls._from_upper(algebra, n, lambda l, m: entries[l][m])

    @classmethod
    def zeros(cls, algebra: Algebra, n: int, exact: bool = True) -> HermitianMatrix:
        _check_algebra_size(algebra, n)
        zero = HurwitzScalar.zero(algebra, exact)
        return cls(algebra, n, tuple(tuple(zero for _ in range(n)) for _ in range(n)))

    @classmethod
    def diag(cls, algebra: Algebra, values: Sequence[Scalar | int]) -> HermitianMatrix:
        n = len(values)
        _check_algebra_size(algebra, n)
        exact = all(isinstance(v, (int, Fraction)) for v in values)
        zero = HurwitzScalar.zero(algebra, exact)
        return cls._from_upper(
            algebra, n, lambda l, m: HurwitzScalar.real(algebra, values[l], exact) if l == m else zero
        )

    @classmethod
    def identity(cls, algebra: Algebra, n: int, exact: bool = True) -> HermitianMatrix:
        return cls.diag(algebra, [Fraction(1) if exact else 1.0] * n)

    @classmethod
    def unit_matrix(
        cls, algebra: Algebra, n: int, l: int, m: int, x: HurwitzScalar | None = None  # noqa: E741
    ) -> HermitianMatrix:
        """E_lm x + E_ml conj(x) for l != m, or x E_ll with x real for l == m."""
        x = x if x is not None else HurwitzScalar.one(algebra)
        zero = HurwitzScalar.zero(algebra, x.is_exact)
        if l == m:
            return cls._from_upper(algebra, n, lambda a, b: x if a == b == l else zero)
        lo, hi = min(l, m), max(l, m)
        val = x if l < m else conj(x)
        return cls._from_upper(algebra, n, lambda a, b: val if (a, b) == (lo, hi) else zero)

    @classmethod
    def from_array(cls, algebra: Algebra, array: np.ndarray) -> HermitianMatrix:
        n = array.shape[0]
        return cls._from_upper(
            algebra, n, lambda l, m: HurwitzScalar.from_coeffs(algebra, array[l, m], False)
        )

    # -- access -----------------------------------------------------------

    def entry(self, l: int, m: int) -> HurwitzScalar:  # noqa: E741
        return self.entries[l][m]

    @property
    def is_exact(self) -> bool:
        return all(x.is_exact for row in self.entries for x in row)

    def to_float(self) -> HermitianMatrix:
        return HermitianMatrix(
            self.algebra, self.n, tuple(tuple(x.to_float() for x in r) for r in self.entries)
        )

    def to_exact(self) -> HermitianMatrix:
        return HermitianMatrix(
            self.algebra, self.n, tuple(tuple(x.to_exact() for x in r) for r in self.entries)
        )

    def as_array(self) -> np.ndarray:
        """Float array of shape (n, n, d)."""
        return np.array([[x.as_array() for x in row] for row in self.entries])

    def trace(self) -> Scalar:
        return sum((self.entries[l][l].re() for l in range(self.n)), Fraction(0) if self.is_exact else 0.0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HermitianMatrix):
            return NotImplemented
        return self.algebra is other.algebra and self.n == other.n and all(
            a.coeffs == b.coeffs
            for ra, rb in zip(self.entries, other.entries, strict=True)
            for a, b in zip(ra, rb, strict=True)
        )

    def __hash__(self) -> int:
        return hash((self.algebra, self.n, tuple(x.coeffs for r in self.entries for x in r)))

    def allclose(self, other: HermitianMatrix, atol: float = 1e-9) -> bool:
        _check_matrices(self, other)
        return bool(np.allclose(self.as_array(), other.as_array(), atol=atol))

    # -- linear structure -------------------------------------------------

    def __add__(self, other: HermitianMatrix) -> HermitianMatrix:
        _check_matrices(self, other)
        return self._from_upper(
            self.algebra, self.n, lambda l, m: self.entries[l][m] + other.entries[l][m]
        )

    def __sub__(self, other: HermitianMatrix) -> HermitianMatrix:
        return self + other.scaled(-1)

    def scaled(self, factor: Scalar | int) -> HermitianMatrix:
        return HermitianMatrix(
            self.algebra, self.n, tuple(tuple(x * factor for x in r) for r in self.entries)
        )

    def __mul__(self, factor: Scalar | int) -> HermitianMatrix:
        return self.scaled(factor)

    __rmul__ = __mul__

    def jordan_power(self, k: int) -> HermitianMatrix:
        if k < 1:
            raise DomainError(f"jordan_power needs k >= 1, got {k}")
        power = self
        for _ in range(k - 1):
            power = jordan_product(self, power)
        return power

    def apply(self, v: ConeVector) -> ConeVector:
        """The matrix-vector product Xv."""
        if v.algebra is not self.algebra or v.n != self.n:
            raise ShapeError("vector does not match the matrix")
        exact = self.is_exact and v.is_exact
        out = []
        for row in self.entries:
            acc = HurwitzScalar.zero(self.algebra, exact)
            for x, c in zip(row, v.components, strict=True):
                acc = acc + mul(x, c)
            out.append(acc)
        return ConeVector(self.algebra, tuple(out))

    def to_payload(self) -> MatrixPayload:
        return MatrixPayload(
            algebra=self.algebra,
            n=self.n,
            entries=[[x.to_payload() for x in row] for row in self.entries],
        )

    @classmethod
    def from_payload(cls, payload: MatrixPayload, tol: float = 1e-12) -> HermitianMatrix:
        entries = [[HurwitzScalar.from_payload(x) for x in row] for row in payload.entries]
        return cls.from_entries(payload.algebra, entries, tol)


def _check_matrices(x: HermitianMatrix, y: HermitianMatrix) -> None:
    if x.algebra is not y.algebra:
        raise AlgebraMismatchError(f"{x.algebra.value} matrix combined with {y.algebra.value}")
    if x.n != y.n:
        raise ShapeError(f"matrix sizes differ: {x.n} and {y.n}")


def matmul(x: HermitianMatrix, y: HermitianMatrix) -> list[list[HurwitzScalar]]:
    """Plain matrix product; not hermitian in general, so returned as raw entries."""
    _check_matrices(x, y)
    exact = x.is_exact and y.is_exact
    n = x.n
    out = []
    for l in range(n):  # noqa: E741
        row = []
        for m in range(n):
            acc = HurwitzScalar.zero(x.algebra, exact)
            for k in range(n):
                acc = acc + mul(x.entries[l][k], y.entries[k][m])
            row.append(acc)
        out.append(row)
    return out


def jordan_product(x: HermitianMatrix, y: HermitianMatrix) -> HermitianMatrix:
    """X o Y = (XY + YX) / 2."""
    _check_matrices(x, y)
    exact = x.is_exact and y.is_exact
    half: Scalar = Fraction(1, 2) if exact else 0.5

    def entry(l: int, m: int) -> HurwitzScalar:  # noqa: E741
        acc = HurwitzScalar.zero(x.algebra, exact)
        for k in range(x.n):
            acc = acc + mul(x.entries[l][k], y.entries[k][m]) + mul(y.entries[l][k], x.entries[k][m])
        return acc * half

    return HermitianMatrix._from_upper(x.algebra, x.n, entry)


def trace_inner(x: HermitianMatrix, y: HermitianMatrix) -> Scalar:
    """<X, Y> = Tr(X o Y) = sum of Re(X_lm Y_ml)."""
    _check_matrices(x, y)
    total: Scalar = Fraction(0) if x.is_exact and y.is_exact else 0.0
    for l in range(x.n):  # noqa: E741
        for m in range(x.n):
            total += mul(x.entries[l][m], y.entries[m][l]).re()
    return total


def rank_one(u: ConeVector, raw: bool = False) -> HermitianMatrix:
    """uu*; octonion vectors need a real first component unless ``raw``."""
    _check_algebra_size(u.algebra, u.n)
    if u.algebra is Algebra.O and not raw and not u.has_real_first():
        raise DomainError("octonion vectors must have a real first component")
    comps = u.components
    return HermitianMatrix._from_upper(u.algebra, u.n, lambda l, m: mul(comps[l], conj(comps[m])))


def sandwich(v: ConeVector, x: HermitianMatrix, w: ConeVector) -> HurwitzScalar:
    """v*(Xw)."""
    return adjoint_dot(v, x.apply(w))


def l_op(x: HermitianMatrix) -> ConeMap:
    """The multiplication operator L(X): Y -> X o Y."""
    from conelab.linmap import from_function

    return from_function(lambda y: jordan_product(x, y), x.n, x.algebra, label="L")


def quadratic_rep(x: HermitianMatrix) -> ConeMap:
    """P(X) = 2 L(X)^2 - L(X^2)."""
    from conelab.linmap import from_function

    x2 = jordan_product(x, x)

    def action(y: HermitianMatrix) -> HermitianMatrix:
        return jordan_product(x, jordan_product(x, y)).scaled(2) - jordan_product(x2, y)

    return from_function(action, x.n, x.algebra, label="P")


# -- spectrum --------------------------------------------------------------


def power_traces(x: HermitianMatrix) -> list[Scalar]:
    """Tr(X^k) for k = 1..n with Jordan powers."""
    traces = []
    power = x
    for k in range(1, x.n + 1):
        if k > 1:
            power = jordan_product(x, power)
        traces.append(power.trace())
    return traces


def elementary_symmetric(x: HermitianMatrix) -> list[Scalar]:
    """e_0..e_n of the eigenvalues via Newton's identities."""
    p = power_traces(x)
    exact = x.is_exact
    e: list[Scalar] = [Fraction(1) if exact else 1.0]
    for k in range(1, x.n + 1):
        acc: Scalar = Fraction(0) if exact else 0.0
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * p[i - 1]
        e.append(acc / k)
    return e


def char_poly(x: HermitianMatrix) -> list[Scalar]:
    """Coefficients of det(t - X), highest degree first."""
    return [(-1) ** k * ek for k, ek in enumerate(elementary_symmetric(x))]


def eigenvalues(x: HermitianMatrix) -> np.ndarray:
    """Sorted float eigenvalues.

    R and C go straight to ``eigvalsh``, H through its 2n x 2n complex
    embedding, O through the roots of the characteristic polynomial.
    """
    arr = x.as_array()
    if x.algebra in (Algebra.R, Algebra.C):
        z = arr[..., 0] + (1j * arr[..., 1] if x.algebra is Algebra.C else 0)
        return np.linalg.eigvalsh(z)
    if x.algebra is Algebra.H:
        z1 = arr[..., 0] + 1j * arr[..., 1]
        z2 = arr[..., 2] + 1j * arr[..., 3]
        embedded = np.block([[z1, z2], [-z2.conj(), z1.conj()]])
        return np.sort(np.linalg.eigvalsh(embedded))[::2]
    roots = np.roots([float(c) for c in char_poly(x.to_float())])
    return np.sort(roots.real)


def min_eigenvalue(x: HermitianMatrix) -> float:
    return float(eigenvalues(x)[0])


def cone_member(x: HermitianMatrix, eps: float = 1e-9) -> bool:
    """True iff every Jordan eigenvalue is nonnegative (>= -eps for floats).

    The eigenvalues are real, so they are all nonnegative exactly when the
    characteristic polynomial alternates in sign, i.e. every e_k >= 0.
    """
    e = elementary_symmetric(x)
    if x.is_exact:
        return all(ek >= 0 for ek in e)
    scale = max(1.0, math.sqrt(max(float(trace_inner(x, x)), 0.0)))
    return all(
        float(ek) >= -eps * math.comb(x.n, k) * scale ** (k - 1)
        for k, ek in enumerate(e)
        if k > 0
    )


# -- orthogonality ---------------------------------------------------------


def orthogonal_pair_classify(u: ConeVector, v: ConeVector, eps: float = 1e-9) -> int | None:
    """Which of the three orthogonality patterns for O^3 the pair (u, v) follows.

    1: u_2 = u_3 = 0 and v_1 = 0; 2: u_2 = 0, u_3 != 0; 3: u_2 != 0.
    Returns None when <uu*, vv*> != 0.
    """
    _check_vectors(u, v)
    if u.algebra is not Algebra.O or u.n != 3:
        raise DomainError("orthogonality cases are defined for O^3")
    if u.is_zero() or v.is_zero():
        raise DomainError("orthogonality cases need nonzero vectors")
    if not (u.has_real_first() and v.has_real_first()):
        raise DomainError("octonion vectors must have a real first component")
    value = trace_inner(rank_one(u), rank_one(v))
    if (value != 0) if u.is_exact and v.is_exact else abs(float(value)) > eps:
        return None
    u2, u3 = u.components[1], u.components[2]
    if not u2.is_zero():
        return 3
    return 1 if u3.is_zero() else 2


def line_family_admissible(
    u: ConeVector, v: ConeVector, extra: Sequence[HurwitzScalar] = ()
) -> bool:
    """Whether (v + uy)(v + uy)* is a multiple of a primitive idempotent.

    Tested in exact arithmetic for y over the basis units, a few mixed
    rational elements and ``extra``.
    """
    _check_vectors(u, v)
    u, v = u.to_exact(), v.to_exact()
    algebra = u.algebra
    units = basis_units(algebra)
    trials = list(units)
    if algebra.dim > 1:
        trials.append(units[0] + units[1])
        trials.append(units[1] * 2 - units[-1])
        trials.append(units[-1] * Fraction(1, 3) + units[0] * Fraction(-1, 2))
    trials.extend(y.to_exact() for y in extra)
    for y in trials:
        w = rank_one(v + u.right_mul(y), raw=True)
        if jordan_product(w, w) != w.scaled(w.trace()):
            logger.debug(f"line family fails at y={y!r}")
            return False
    return True


# -- sampling --------------------------------------------------------------


def _normalize(batch: np.ndarray) -> np.ndarray:
    norms = np.sqrt(np.sum(batch**2, axis=(-2, -1), keepdims=True))
    return batch / norms


def random_unit_vectors(
    rng: np.random.Generator, count: int, n: int, algebra: Algebra
) -> np.ndarray:
    """Gaussian unit vectors of shape (count, n, d); first components real for O."""
    batch = rng.standard_normal((count, n, algebra.dim))
    if algebra is Algebra.O:
        batch[:, 0, 1:] = 0.0
    return _normalize(batch)


def _octonion_pairs(rng: np.random.Generator, count: int) -> tuple[np.ndarray, np.ndarray]:
    algebra = Algebra.O
    kind = rng.random(count)
    u = random_unit_vectors(rng, count, 3, algebra)
    v1 = rng.standard_normal(count)
    free = rng.standard_normal((count, 2, 8))
    u1 = u[:, 0, 0]
    u2, u3 = u[:, 1], u[:, 2]

    # case 3: v_2 = -u_1 v_1 conj(u_2)^-1 - (conj(u_2)^-1 conj(u_3)) v_3
    w = u2 / np.sum(u2**2, axis=-1, keepdims=True)
    v3 = free[:, 1]
    v2 = -(u1 * v1)[:, None] * w - mul_batch(mul_batch(w, conj_batch(u3), algebra), v3, algebra)
    v_case3 = np.stack([np.zeros((count, 8)), v2, v3], axis=1)
    v_case3[:, 0, 0] = v1

    # case 2: u_2 = 0 and v_3 = -u_1 v_1 conj(u_3)^-1
    u_case2 = u.copy()
    u_case2[:, 1] = 0.0
    u_case2 = _normalize(u_case2)
    c1, c3 = u_case2[:, 0, 0], u_case2[:, 2]
    v_case2 = np.stack([np.zeros((count, 8)), free[:, 0], np.zeros((count, 8))], axis=1)
    v_case2[:, 0, 0] = v1
    v_case2[:, 2] = -(c1 * v1)[:, None] * c3 / np.sum(c3**2, axis=-1, keepdims=True)

    # case 1: u = (+-1, 0, 0) and v_1 = 0
    u_case1 = np.zeros_like(u)
    u_case1[:, 0, 0] = np.where(u1 < 0, -1.0, 1.0)
    v_case1 = np.stack([np.zeros((count, 8)), free[:, 0], free[:, 1]], axis=1)

    pick1 = (kind < 0.1)[:, None, None]
    pick2 = ((kind >= 0.1) & (kind < 0.2))[:, None, None]
    u_out = np.where(pick1, u_case1, np.where(pick2, u_case2, u))
    v_out = np.where(pick1, v_case1, np.where(pick2, v_case2, v_case3))
    return u_out, _normalize(v_out)


def sample_orthogonal_pairs(
    n: int, algebra: Algebra, count: int, seed: int, chunk: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Unit pairs (u, v) with <uu*, vv*> = 0 as arrays of shape (count, n, d).

    Deterministic in (seed, chunk), so chunks can be drawn by parallel workers.
    """
    _check_algebra_size(algebra, n)
    if algebra is Algebra.O and n != 3:
        raise DomainError("octonion sampling is defined for n = 3")
    rng = np.random.default_rng([seed, chunk])
    if algebra is Algebra.O:
        return _octonion_pairs(rng, count)
    u = random_unit_vectors(rng, count, n, algebra)
    v = rng.standard_normal((count, n, algebra.dim))
    overlap = np.sum(mul_batch(conj_batch(u), v, algebra), axis=1)
    v = v - mul_batch(u, overlap[:, None, :], algebra)
    return u, _normalize(v)


def sample_orthogonal_pair(n: int, algebra: Algebra, seed: int) -> tuple[ConeVector, ConeVector]:
    u, v = sample_orthogonal_pairs(n, algebra, 1, seed)
    return ConeVector.from_array(algebra, u[0]), ConeVector.from_array(algebra, v[0])
