"""
Linear maps on H_n(D).

A ``ConeMap`` stores its real matrix in the orthonormal basis

    E_ll (l = 1..n), then (E_lm f_k + E_ml conj(f_k)) / sqrt(2) for l < m, k = 1..d

and may carry the exact action it was built from. The sampled checkers for
cross-positivity, positivity and Lie-algebra membership all evaluate
<A(uu*), vv*> = coords(vv*) . M . coords(uu*) over batches of unit pairs.
"""

from __future__ import annotations

import logging
import math
import re
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from conelab.hurwitz import (
    HurwitzScalar,
    OctonionDerivation,
    conj,
    conj_batch,
    derivation_apply,
    mul,
    mul_batch,
    structure_tensor,
)
from conelab.jordan import (
    ConeVector,
    HermitianMatrix,
    jordan_product,
    random_unit_vectors,
    sample_orthogonal_pairs,
)
from conelab.models import (
    Algebra,
    AlgebraMismatchError,
    CheckReport,
    ConeMapPayload,
    DomainError,
    NumericalError,
    ShapeError,
    WitnessPair,
)
from conelab.utils.parallel import min_reduce

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)

Action = Callable[[HermitianMatrix], HermitianMatrix]
SquareMatrix = Sequence[Sequence[HurwitzScalar]]


def dimension(n: int, algebra: Algebra) -> int:
    return n + algebra.dim * n * (n - 1) // 2


def _offdiag_pairs(n: int) -> list[tuple[int, int]]:
    return [(l, m) for l in range(n) for m in range(l + 1, n)]  # noqa: E741


def basis(n: int, algebra: Algebra) -> list[HermitianMatrix]:
    """The orthonormal coordinate basis of H_n(D), as float matrices."""
    out = [HermitianMatrix.unit_matrix(algebra, n, l, l, HurwitzScalar.one(algebra, False)) for l in range(n)]  # noqa: E741
    for l, m in _offdiag_pairs(n):  # noqa: E741
        for k in range(1, algebra.dim + 1):
            f = HurwitzScalar.unit(algebra, k, exact=False) / SQRT2
            out.append(HermitianMatrix.unit_matrix(algebra, n, l, m, f))
    return out


def coords_from_array(array: np.ndarray) -> np.ndarray:
    """Coordinates of hermitian arrays of shape (..., n, n, d)."""
    n = array.shape[-3]
    diag = np.stack([array[..., l, l, 0] for l in range(n)], axis=-1)  # noqa: E741
    pairs = _offdiag_pairs(n)
    if not pairs:
        return diag
    off = np.concatenate([SQRT2 * array[..., l, m, :] for l, m in pairs], axis=-1)  # noqa: E741
    return np.concatenate([diag, off], axis=-1)


def array_from_coords(coords: np.ndarray, n: int, algebra: Algebra) -> np.ndarray:
    d = algebra.dim
    if coords.shape[-1] != dimension(n, algebra):
        raise ShapeError(f"expected {dimension(n, algebra)} coordinates, got {coords.shape[-1]}")
    out = np.zeros((*coords.shape[:-1], n, n, d))
    for l in range(n):  # noqa: E741
        out[..., l, l, 0] = coords[..., l]
    for idx, (l, m) in enumerate(_offdiag_pairs(n)):  # noqa: E741
        block = coords[..., n + idx * d : n + (idx + 1) * d] / SQRT2
        out[..., l, m, :] = block
        out[..., m, l, :] = conj_batch(block)
    return out


def to_coords(x: HermitianMatrix) -> np.ndarray:
    return coords_from_array(x.as_array())


def from_coords(coords: np.ndarray, n: int, algebra: Algebra) -> HermitianMatrix:
    return HermitianMatrix.from_array(algebra, array_from_coords(np.asarray(coords, float), n, algebra))


def rank_one_coords(u: np.ndarray, algebra: Algebra) -> np.ndarray:
    """Coordinates of uu* for vectors of shape (..., n, d)."""
    outer = mul_batch(u[..., :, None, :], conj_batch(u)[..., None, :, :], algebra)
    return coords_from_array(outer)


def jordan_product_array(x: np.ndarray, y: np.ndarray, algebra: Algebra) -> np.ndarray:
    """Float Jordan product of (n, n, d) arrays."""
    tensor = structure_tensor(algebra).astype(float)
    xy = np.einsum("lki,kmj,ijc->lmc", x, y, tensor)
    yx = np.einsum("lki,kmj,ijc->lmc", y, x, tensor)
    return (xy + yx) / 2


@dataclass(frozen=True, eq=False)
class ConeMap:
    """A linear operator on H_n(D)."""

    algebra: Algebra
    n: int
    matrix: np.ndarray
    label: str | None = None
    action: Action | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        size = dimension(self.n, self.algebra)
        if self.matrix.shape != (size, size):
            raise ShapeError(f"operator matrix must be {size}x{size}, got {self.matrix.shape}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, n: int, algebra: Algebra) -> ConeMap:
        return cls(algebra, n, np.eye(dimension(n, algebra)), "id", lambda x: x)

    @classmethod
    def zero(cls, n: int, algebra: Algebra) -> ConeMap:
        size = dimension(n, algebra)
        return cls(algebra, n, np.zeros((size, size)), "0", lambda x: x.scaled(0))

    def apply(self, x: HermitianMatrix) -> HermitianMatrix:
        """A(X); exact inputs go through the exact action when one is attached."""
        if x.algebra is not self.algebra or x.n != self.n:
            raise ShapeError(f"map on H_{self.n}({self.algebra.value}) applied to H_{x.n}({x.algebra.value})")
        if self.action is not None and x.is_exact:
            return self.action(x)
        return from_coords(self.matrix @ to_coords(x), self.n, self.algebra)

    __call__ = apply

    def _check(self, other: ConeMap) -> None:
        if other.algebra is not self.algebra or other.n != self.n:
            raise AlgebraMismatchError("maps act on different spaces")

    def compose(self, other: ConeMap) -> ConeMap:
        """self after other."""
        self._check(other)
        action = None
        if self.action is not None and other.action is not None:
            first, second = other.action, self.action
            action = lambda x: second(first(x))  # noqa: E731
        return ConeMap(self.algebra, self.n, self.matrix @ other.matrix, None, action)

    def __add__(self, other: ConeMap) -> ConeMap:
        self._check(other)
        action = None
        if self.action is not None and other.action is not None:
            a, b = self.action, other.action
            action = lambda x: a(x) + b(x)  # noqa: E731
        return ConeMap(self.algebra, self.n, self.matrix + other.matrix, None, action)

    def scaled(self, factor: Fraction | float | int) -> ConeMap:
        action = None
        if self.action is not None:
            a = self.action
            action = lambda x: a(x).scaled(factor)  # noqa: E731
        return ConeMap(self.algebra, self.n, float(factor) * self.matrix, self.label, action)

    def __sub__(self, other: ConeMap) -> ConeMap:
        return self + other.scaled(-1)

    def adjoint(self) -> ConeMap:
        return ConeMap(self.algebra, self.n, self.matrix.T.copy(), None, None)

    def to_payload(self) -> ConeMapPayload:
        return ConeMapPayload(
            algebra=self.algebra,
            n=self.n,
            dim=self.dim,
            label=self.label,
            matrix=self.matrix.tolist(),
        )

    @classmethod
    def from_payload(cls, payload: ConeMapPayload) -> ConeMap:
        return cls(payload.algebra, payload.n, np.array(payload.matrix, dtype=float), payload.label)


def from_function(f: Action, n: int, algebra: Algebra, label: str | None = None) -> ConeMap:
    """Tabulate a linear map of hermitian matrices; ``f`` stays attached as the exact action."""
    columns = [to_coords(f(b)) for b in basis(n, algebra)]
    return ConeMap(algebra, n, np.column_stack(columns), label, f)


def expm(a: ConeMap, t: float = 1.0) -> ConeMap:
    """e^{tA} by scaling-and-squaring Pade (scipy).

    Raises:
        NumericalError: tA or its exponential is not finite.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        scaled = t * a.matrix
        result = scipy.linalg.expm(scaled) if np.all(np.isfinite(scaled)) else scaled
    if not np.all(np.isfinite(result)):
        logger.error(f"expm overflow at t={t}")
        raise NumericalError(f"matrix exponential overflowed at t={t}")
    label = f"exp({t}*{a.label})" if a.label else None
    return ConeMap(a.algebra, a.n, result, label)


# -- Lie algebra elements --------------------------------------------------


def _square_matrix(h: SquareMatrix) -> tuple[Algebra, int]:
    n = len(h)
    if n == 0 or any(len(row) != n for row in h):
        raise ShapeError("H must be a nonempty square matrix")
    algebra = h[0][0].algebra
    if any(x.algebra is not algebra for row in h for x in row):
        raise AlgebraMismatchError("entries of H carry different algebra tags")
    return algebra, n


def left_multiply(h: SquareMatrix, x: HermitianMatrix) -> list[list[HurwitzScalar]]:
    """HX for a general square H."""
    exact = x.is_exact and all(e.is_exact for row in h for e in row)
    n = x.n
    out = []
    for l in range(n):  # noqa: E741
        row = []
        for m in range(n):
            acc = HurwitzScalar.zero(x.algebra, exact)
            for k in range(n):
                acc = acc + mul(h[l][k], x.entries[k][m])
            row.append(acc)
        out.append(row)
    return out


def derivation_lift_action(derivation: OctonionDerivation) -> Action:
    def action(x: HermitianMatrix) -> HermitianMatrix:
        return HermitianMatrix._from_upper(
            x.algebra, x.n, lambda l, m: derivation_apply(derivation, x.entries[l][m])
        )

    return action


def derivation_lift(derivation: OctonionDerivation, n: int) -> ConeMap:
    """A_D: X -> [D(X_lm)], a derivation of H_n(D)."""
    return from_function(derivation_lift_action(derivation), n, derivation.algebra, label="A_D")


def lie_action(h: SquareMatrix, derivation: OctonionDerivation | None = None) -> Action:
    algebra, n = _square_matrix(h)
    if derivation is not None and derivation.algebra is not algebra:
        raise AlgebraMismatchError("derivation and H live over different algebras")
    lift = derivation_lift_action(derivation) if derivation is not None else None

    def action(x: HermitianMatrix) -> HermitianMatrix:
        hx = left_multiply(h, x)
        # HX + XH* = HX + (HX)*
        out = HermitianMatrix._from_upper(algebra, n, lambda l, m: hx[l][m] + conj(hx[m][l]))
        return out + lift(x) if lift is not None else out

    return action


def lie_map(h: SquareMatrix, derivation: OctonionDerivation | None = None) -> ConeMap:
    """X -> HX + XH* (+ A_D(X)), an element of the Lie algebra of the cone."""
    algebra, n = _square_matrix(h)
    if algebra is Algebra.O:
        trace = sum((h[l][l] for l in range(1, n)), h[0][0])  # noqa: E741
        if not trace.is_real():
            raise DomainError("octonion H must have a real trace")
    if derivation is not None and algebra not in (Algebra.H, Algebra.O):
        raise DomainError(f"derivation terms are not used over {algebra.value}")
    return from_function(lie_action(h, derivation), n, algebra, label="lie")


def random_lie_matrix(n: int, algebra: Algebra, rng: np.random.Generator, scale: int = 3) -> list[list[HurwitzScalar]]:
    """A random integer H, trace made real for octonions."""
    h = [
        [HurwitzScalar.from_coeffs(algebra, rng.integers(-scale, scale + 1, algebra.dim).tolist()) for _ in range(n)]
        for _ in range(n)
    ]
    if algebra is Algebra.O:
        imag = sum((h[l][l] for l in range(n)), HurwitzScalar.zero(algebra))  # noqa: E741
        h[0][0] = h[0][0] - HurwitzScalar.from_coeffs(algebra, [0, *imag.coeffs[1:]])
    return h


def commutator_map(y: HermitianMatrix, z: HermitianMatrix) -> ConeMap:
    """[L(y), L(z)]."""
    from conelab.jordan import l_op

    ly, lz = l_op(y), l_op(z)
    return ly.compose(lz) - lz.compose(ly)


# -- sampled checkers ------------------------------------------------------


def pair_values(a: ConeMap, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """<A(uu*), vv*> for batches of vectors of shape (count, n, d)."""
    cu = rank_one_coords(u, a.algebra)
    cv = rank_one_coords(v, a.algebra)
    return np.einsum("si,ij,sj->s", cv, a.matrix, cu)


def _witness(a: ConeMap, u: np.ndarray, v: np.ndarray, value: float) -> WitnessPair:
    return WitnessPair(
        u=ConeVector.from_array(a.algebra, u).to_payload(),
        v=ConeVector.from_array(a.algebra, v).to_payload(),
        value=float(value),
    )


def _params(a: ConeMap, seed: int, eps: float) -> dict[str, object]:
    return {"n": a.n, "algebra": a.algebra.value, "seed": seed, "eps": eps, "map": a.label}


def check_sv_condition(
    a: ConeMap, samples: int, seed: int, eps: float = 1e-9, threads: int | None = None
) -> CheckReport:
    """Sampled cross-positivity: <A(uu*), vv*> >= -eps on orthogonal idempotent pairs."""

    def work(chunk: int, count: int) -> tuple[float, tuple[np.ndarray, np.ndarray]]:
        u, v = sample_orthogonal_pairs(a.n, a.algebra, count, seed, chunk)
        values = pair_values(a, u, v)
        i = int(np.argmin(values))
        return float(values[i]), (u[i], v[i])

    min_value, pair = min_reduce(work, samples, threads=threads)
    passed = min_value >= -eps
    logger.info(f"SV check on {a.label or 'map'}: min={min_value:.3e} over {samples} pairs")
    return CheckReport(
        check="sv_condition",
        params=_params(a, seed, eps),
        samples=samples,
        min_value=min_value,
        witness=None if passed or pair is None else _witness(a, *pair, min_value),
        passed=passed,
    )


def check_lie_condition(
    a: ConeMap, samples: int, seed: int, eps: float = 1e-9, threads: int | None = None
) -> CheckReport:
    """Sampled Lie-algebra test: <A(uu*), vv*> = 0 on orthogonal idempotent pairs.

    ``min_value`` holds the signed value of the sample farthest from zero.
    """

    def work(chunk: int, count: int) -> tuple[float, tuple[np.ndarray, np.ndarray, float]]:
        u, v = sample_orthogonal_pairs(a.n, a.algebra, count, seed, chunk)
        values = pair_values(a, u, v)
        i = int(np.argmax(np.abs(values)))
        return -abs(float(values[i])), (u[i], v[i], float(values[i]))

    key, found = min_reduce(work, samples, threads=threads)
    worst = found[2] if found is not None else 0.0
    passed = -key <= eps
    logger.info(f"Lie check on {a.label or 'map'}: max |value|={-key:.3e} over {samples} pairs")
    return CheckReport(
        check="lie_condition",
        params=_params(a, seed, eps),
        samples=samples,
        min_value=worst,
        witness=None if passed or found is None else _witness(a, found[0], found[1], worst),
        passed=passed,
        details={"max_abs": -key},
    )


def check_positive(
    a: ConeMap, samples: int, seed: int, eps: float = 1e-9, threads: int | None = None
) -> CheckReport:
    """Sampled positivity: <A(uu*), ww*> >= -eps on arbitrary unit pairs."""

    def work(chunk: int, count: int) -> tuple[float, tuple[np.ndarray, np.ndarray]]:
        rng = np.random.default_rng([seed, chunk, 1])
        u = random_unit_vectors(rng, count, a.n, a.algebra)
        w = random_unit_vectors(rng, count, a.n, a.algebra)
        values = pair_values(a, u, w)
        i = int(np.argmin(values))
        return float(values[i]), (u[i], w[i])

    min_value, pair = min_reduce(work, samples, threads=threads)
    passed = min_value >= -eps
    return CheckReport(
        check="positivity",
        params=_params(a, seed, eps),
        samples=samples,
        min_value=min_value,
        witness=None if passed or pair is None else _witness(a, *pair, min_value),
        passed=passed,
    )


# -- derivation algebras ---------------------------------------------------

_SPACE = re.compile(r"^H(\d+)([RCHO])$")


def _space_tensor(space: str) -> np.ndarray:
    if space in {a.value for a in Algebra}:
        return structure_tensor(Algebra(space)).astype(float)
    match = _SPACE.match(space)
    if match is None:
        raise DomainError(f"unknown space {space!r}; use R, C, H, O or H<n><R|C|H|O>")
    n, algebra = int(match.group(1)), Algebra(match.group(2))
    if algebra is Algebra.O and n > 3:
        raise DomainError(f"H_{n}(O) is not a Jordan algebra")
    arrays = [b.as_array() for b in basis(n, algebra)]
    size = len(arrays)
    tensor = np.zeros((size, size, size))
    for i in range(size):
        for j in range(i, size):
            coords = coords_from_array(jordan_product_array(arrays[i], arrays[j], algebra))
            tensor[i, j] = tensor[j, i] = coords
    return tensor


def derivation_dimension(space: str) -> int:
    """Dimension of the derivation algebra of R, C, H, O or H_n(D).

    Solves D(e_i e_j) = D(e_i) e_j + e_i D(e_j) for the N x N matrix of D;
    the Gram matrix of the system is accumulated row block by row block.
    """
    tensor = _space_tensor(space)
    size = tensor.shape[0]
    eye = np.eye(size)
    gram = np.zeros((size * size, size * size))
    for i in range(size):
        block = np.einsum("ak,jb->jkab", eye, tensor[i])
        block -= np.einsum("ajk,b->jkab", tensor, eye[i])
        block -= np.einsum("bj,ak->jkab", eye, tensor[i])
        rows = block.reshape(size * size, size * size)
        gram += rows.T @ rows
    rank = int(np.linalg.matrix_rank(gram))
    logger.debug(f"derivation system for {space}: {size * size} unknowns, rank {rank}")
    return size * size - rank
