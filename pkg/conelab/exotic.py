"""
The exotic cross-positive generator B on H_n(D).

    B(X)_11 = x_22 - x_11
    B(X)_ll = (n-1)^2 (x_{l+1,l+1} - x_ll)       for 2 <= l <= n-1
    B(X)_nn = (n-1)^2 (x_11 - x_nn)
    B(X)_1m = -p x_1m,  B(X)_lm = -q x_lm (2 <= l < m)

with p = (n-2)(n^2-n-1)/2 and q = (n-1)(n^2-n-1). Besides construction this
module verifies cross-positivity, either by sampling orthogonal pairs or by
checking the determinant reduction through Y_u, and runs semigroup orbits.
Indices in code are 0-based.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
import sympy

from conelab.hurwitz import HurwitzScalar, Scalar
from conelab.jordan import (
    ConeVector,
    HermitianMatrix,
    cone_member,
    min_eigenvalue,
    rank_one,
    sample_orthogonal_pairs,
    sandwich,
)
from conelab.linmap import (
    ConeMap,
    check_positive,
    check_sv_condition,
    expm,
    from_function,
    pair_values,
)
from conelab.models import (
    Algebra,
    CheckMode,
    CheckReport,
    DomainError,
    OrbitPoint,
    OrbitReport,
)

logger = logging.getLogger(__name__)

BOUNDARY_FLOOR = 1e-6


@dataclass(frozen=True)
class ExoticGenerator:
    n: int
    algebra: Algebra = Algebra.R

    def __post_init__(self) -> None:
        if self.n < 3:
            raise DomainError(f"the exotic generator needs n >= 3, got {self.n}")
        if self.algebra is Algebra.O and self.n != 3:
            raise DomainError("the octonion generator exists only for n = 3")

    @property
    def k(self) -> int:
        return self.n * self.n - self.n - 1

    @property
    def p(self) -> Fraction:
        return Fraction((self.n - 2) * self.k, 2)

    @property
    def q(self) -> Fraction:
        return Fraction((self.n - 1) * self.k)

    @property
    def r(self) -> int:
        return self.n * (self.n - 1) * (self.n - 3)

    @property
    def s(self) -> int:
        return self.n * (self.n - 1)

    @property
    def t(self) -> int:
        return (self.n - 1) ** 2

    def apply(self, x: HermitianMatrix) -> HermitianMatrix:
        if x.n != self.n or x.algebra is not self.algebra:
            raise DomainError(f"B acts on H_{self.n}({self.algebra.value})")
        n, t = self.n, self.t
        exact = x.is_exact
        p = self.p if exact else float(self.p)
        q = self.q if exact else float(self.q)
        d = [x.entries[l][l].re() for l in range(n)]  # noqa: E741

        def entry(l: int, m: int) -> HurwitzScalar:  # noqa: E741
            if l == m:
                if l == 0:
                    value = d[1] - d[0]
                elif l == n - 1:
                    value = t * (d[0] - d[n - 1])
                else:
                    value = t * (d[l + 1] - d[l])
                return HurwitzScalar.real(self.algebra, value, exact)
            return x.entries[l][m] * (-(p if l == 0 else q))

        return HermitianMatrix._from_upper(self.algebra, n, entry)

    __call__ = apply

    @cached_property
    def cone_map(self) -> ConeMap:
        return from_function(self.apply, self.n, self.algebra, label=f"B[n={self.n},{self.algebra.value}]")


def build(n: int, algebra: Algebra = Algebra.R) -> ExoticGenerator:
    """Build the exotic generator B for H_n over ``algebra``.

    Args:
        n: Matrix size, at least 3.
        algebra: Scalar algebra; O admits only n = 3.

    Returns:
        The generator with its constants p, q, r, s, t fixed by n.

    Raises:
        DomainError: n < 3, or O with n != 3.
    """
    b = ExoticGenerator(n, algebra)
    logger.debug(f"built B for n={n}, {algebra.value}: p={b.p}, q={b.q}")
    return b


def as_cone_map(b: ExoticGenerator) -> ConeMap:
    return b.cone_map


# -- quadratic form --------------------------------------------------------


def quadratic_form(b: ExoticGenerator, u: ConeVector, v: ConeVector, simplified: bool = False) -> Scalar:
    """Re(v*B(uu*)v).

    The simplified expression assumes v*u = 0 over an associative algebra:
    |u_2|^2|v_1|^2 - s|u_1|^2|v_1|^2 + n(n-1)(n-2) sum |u_l|^2|v_l|^2
    + t sum |u_{l+1}|^2|v_l|^2, the sums running over l >= 2.
    """
    if not simplified:
        return sandwich(v, b.apply(rank_one(u)), v).re()
    if not b.algebra.is_associative:
        raise DomainError("the simplified form holds for associative algebras only")
    n = b.n
    wu = [c.norm2() for c in u.components]
    wv = [c.norm2() for c in v.components]
    value = wu[1] * wv[0] - b.s * wu[0] * wv[0]
    for l in range(1, n):  # noqa: E741
        value += n * (n - 1) * (n - 2) * wu[l] * wv[l] + b.t * wu[(l + 1) % n] * wv[l]
    return value


# -- determinant reduction -------------------------------------------------


def det_pattern(a: Sequence[Scalar], b: Scalar) -> Scalar:
    """det of the matrix with diagonal a and every off-diagonal entry b."""
    shifted = [x - b for x in a]
    total = math.prod(shifted)
    for i in range(len(shifted)):
        total += b * math.prod(shifted[:i] + shifted[i + 1 :])
    return total


def _weights(u: ConeVector | Sequence[Scalar], floor: float) -> list[Scalar]:
    w = [c.norm2() for c in u.components] if isinstance(u, ConeVector) else list(u)
    if any(x == 0 or float(x) < floor * floor for x in w):
        raise DomainError("Y_u needs every component of u to be nonzero")
    return w


def reduce_yu(b: ExoticGenerator, u: ConeVector | Sequence[Scalar], floor: float = 0.0) -> list[list[Scalar]]:
    """The real (n-1)x(n-1) matrix Y_u; ``u`` may also be the list of |u_l|^2."""
    w = _weights(u, floor)
    n = b.n
    ratio = w[1] / w[0]
    rows = []
    for i, l in enumerate(range(1, n)):  # noqa: E741
        row = [ratio - b.s] * (n - 1)
        row[i] = ratio + b.r + b.t * w[(l + 1) % n] / w[l]
        rows.append(row)
    return rows


def structured_bound_matrix(n: int) -> sympy.Matrix:
    """(n-2)I - ee* on R^{n-2}."""
    size = n - 2
    return sympy.eye(size) * size - sympy.ones(size, size)


def ha_condition(a: Scalar, c: Sequence[Scalar]) -> bool:
    """Whether sum 1/(a + c_l alpha_l) <= 1 holds for every alpha > 0 with prod alpha = 1.

    The criterion is a >= n-1 and (c_1...c_n)^(1/n) >= n-a.
    """
    n = len(c)
    if a <= 0 or any(x <= 0 for x in c):
        raise DomainError("ha_condition needs positive a and c")
    if a < n - 1:
        return False
    gap = n - a
    if gap <= 0:
        return True
    return math.prod(c) >= gap**n


def ha_inequality(a: Scalar, c: Sequence[Scalar], alpha: Sequence[Scalar]) -> Scalar:
    """Left-hand side sum 1/(a + c_l alpha_l) of the harmonic-mean bound.

    Args:
        a: Positive shift.
        c: Positive weights.
        alpha: Positive point, same length as c.

    Returns:
        The sum, exact when every input is exact.

    Raises:
        DomainError: lengths differ or some input is not positive.
    """
    if len(c) != len(alpha):
        raise DomainError("c and alpha must have the same length")
    if a <= 0 or any(x <= 0 for x in c) or any(x <= 0 for x in alpha):
        raise DomainError("ha_inequality needs positive inputs")
    return sum(1 / (a + cl * al) for cl, al in zip(c, alpha, strict=True))


@dataclass(frozen=True)
class ZSubstitution:
    z: float
    x: list[float]
    a: float | None
    c: float | None

    @property
    def trivial(self) -> bool:
        """z^(n-1) >= n(n-1): Y_u is a positive diagonal plus a nonnegative rank one."""
        return self.a is None


def z_substitution(b: ExoticGenerator, u: ConeVector | Sequence[Scalar]) -> ZSubstitution:
    w = [float(x) for x in _weights(u, 0.0)]
    n = b.n
    z = (w[1] / w[0]) ** (1 / (n - 1))
    x = [z * w[(l + 1) % n] / w[l] for l in range(1, n)]  # noqa: E741
    gap = b.s - z ** (n - 1)
    if gap <= 0:
        return ZSubstitution(z, x, None, None)
    return ZSubstitution(z, x, n * (n - 1) * (n - 2) / gap, b.t / (z * gap))


@dataclass(frozen=True)
class FactorizationCheck:
    n: int
    grid_min: float
    identity_holds: bool
    vanishes_at_one: bool
    factor_increasing: bool

    @property
    def passed(self) -> bool:
        return self.grid_min >= 0 and self.identity_holds and self.vanishes_at_one and self.factor_increasing


def factorization_check(n: int, grid: np.ndarray | None = None) -> FactorizationCheck:
    """(z-1)(z^{n-1}+...+z+1-n) >= 0 on a grid, plus the exact facts behind its sign."""
    z = sympy.symbols("z", positive=True)
    factor = sum(z**k for k in range(n)) - n
    identity = sympy.expand((z - 1) * factor - (n - 1 - n * z + z**n)) == 0
    vanishes = factor.subs(z, 1) == 0
    # every term of the derivative is positive for z > 0
    increasing = all(coeff > 0 for coeff in sympy.Poly(sympy.diff(factor, z), z).all_coeffs())
    if grid is None:
        grid = np.linspace(1e-4, 4.0, 10_000)
    values = (grid - 1) * (sum(grid**k for k in range(n)) - n)
    return FactorizationCheck(n, float(values.min()), bool(identity), bool(vanishes), bool(increasing))


def _yu_batch(b: ExoticGenerator, w: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    n = b.n
    ratio = w[:, 1] / w[:, 0]
    nxt = np.roll(w, -1, axis=1)[:, 1:]
    diag = ratio[:, None] + b.r + b.t * nxt / w[:, 1:]
    off = ratio - b.s
    eye = np.eye(n - 1)
    y = off[:, None, None] * (1 - eye) + diag[:, :, None] * eye
    shifted = diag - off[:, None]
    pattern = np.prod(shifted, axis=1) + off * sum(
        np.prod(np.delete(shifted, i, axis=1), axis=1) for i in range(n - 1)
    )
    brute = np.linalg.det(y)
    # relative to the Hadamard bound on |det|
    hadamard = np.prod(np.linalg.norm(y, axis=2), axis=1)
    rel = float(np.max(np.abs(pattern - brute) / hadamard))
    return y, pattern, rel


def _exact_associative(b: ExoticGenerator, budget: int, seed: int, eps: float) -> CheckReport:
    n = b.n
    bound = structured_bound_matrix(n)
    bound_eigs = {int(k): int(v) for k, v in bound.eigenvals().items()}
    bound_ok = all(k >= 0 for k in bound_eigs)

    rng = np.random.default_rng([seed, 2])
    w = np.sum(rng.standard_normal((budget, n, b.algebra.dim)) ** 2, axis=2)
    keep = np.all(w >= BOUNDARY_FLOOR**2, axis=1)
    w = w[keep]
    y, pattern, rel = _yu_batch(b, w)
    scale = np.max(np.abs(y), axis=(1, 2))
    min_eig = np.linalg.eigvalsh(y)[:, 0] / scale
    psd = min_eig >= -eps
    det_ok = pattern >= -eps * scale ** (n - 1)
    agree = bool(np.all(psd == det_ok))

    worst_sum = 0.0
    criterion_ok = True
    for row in w:
        sub = z_substitution(b, list(row))
        if sub.trivial:
            continue
        criterion_ok &= ha_condition(sub.a * (1 + 1e-9), [sub.c * (1 + 1e-9)] * (n - 1))
        worst_sum = max(worst_sum, float(ha_inequality(sub.a, [sub.c] * (n - 1), sub.x)))

    fact = factorization_check(n)
    passed = bound_ok and bool(np.all(psd)) and agree and rel <= 1e-10 and criterion_ok and fact.passed and worst_sum <= 1 + eps
    logger.info(f"exact reduction for n={n}: {len(w)} points, min scaled eigenvalue {min_eig.min():.3e}")
    return CheckReport(
        check="cross_positive_exact",
        params={"n": n, "algebra": b.algebra.value, "seed": seed, "eps": eps},
        samples=len(w),
        min_value=float(min_eig.min()) if len(w) else 0.0,
        passed=passed,
        details={
            "boundary_floor": BOUNDARY_FLOOR,
            "excluded_near_boundary": int(budget - len(w)),
            "bound_matrix_eigenvalues": bound_eigs,
            "det_pattern_max_rel_error": rel,
            "psd_matches_det_sign": agree,
            "ha_criterion_holds": criterion_ok,
            "max_ha_sum": worst_sum,
            "factorization_grid_min": fact.grid_min,
            "factorization_identity": fact.identity_holds,
        },
    )


# -- octonion case analysis ------------------------------------------------


def octonion_case_value(u: np.ndarray, v: np.ndarray, case: int) -> float:
    """Closed form of Re(v*B(uu*)v) for n = 3 over O in each orthogonality case."""
    u1, v1 = u[0, 0], v[0, 0]
    c = np.sum(u[2] ** 2)
    if case == 1:
        return float(4 * u1**2 * np.sum(v[2] ** 2))
    if case == 2:
        return float(4 * c * np.sum(v[1] ** 2) + 4 * u1**4 * v1**2 / c)
    if case == 3:
        alpha, beta, gamma = _case3_coefficients(u, v[2])
        return float(alpha * v1**2 + beta * v1 + gamma)
    raise DomainError(f"unknown orthogonality case {case}")


def _case3_coefficients(u: np.ndarray, v3: np.ndarray) -> tuple[float, float, float]:
    u1 = u[0, 0]
    a, c = np.sum(u[1] ** 2), np.sum(u[2] ** 2)
    re = float(np.dot(u[2], v3))
    alpha = 4 * u1**2 * c / a + a
    beta = 4 * u1 * (2 * c / a + 3) * re
    gamma = 4 * (u1**2 + c**2 / a + 3 * c) * np.sum(v3**2)
    return float(alpha), float(beta), float(gamma)


def case3_discriminant(u: np.ndarray, v3: np.ndarray) -> dict[str, float]:
    """Discriminant of the case-3 quadratic in v_1, its upper bound and the AM-GM split."""
    alpha, beta, gamma = _case3_coefficients(u, v3)
    big_u, a, c = u[0, 0] ** 2, np.sum(u[1] ** 2), np.sum(u[2] ** 2)
    d = 4 * big_u**2 * c / a + 3 * a * c + big_u * a + c**2 - 9 * big_u * c
    square = 3 * c * (big_u / math.sqrt(a) - math.sqrt(a)) ** 2
    am_gm = big_u**2 * c / a + big_u * a + c**2 - 3 * big_u * c
    return {
        "discriminant": beta**2 - 4 * alpha * gamma,
        "bound": float(-16 * np.sum(v3**2) * d),
        "square_term": float(square),
        "am_gm_term": float(am_gm),
    }


def _classify_float(u: np.ndarray, tol: float = 1e-12) -> int:
    if np.sum(u[1] ** 2) > tol:
        return 3
    return 2 if np.sum(u[2] ** 2) > tol else 1


def octonion_case_report(samples: int, seed: int, eps: float = 1e-9) -> CheckReport:
    b = build(3, Algebra.O)
    u, v = sample_orthogonal_pairs(3, Algebra.O, samples, seed)
    direct = pair_values(b.cone_map, u, v)
    errors = {1: 0.0, 2: 0.0, 3: 0.0}
    counts = {1: 0, 2: 0, 3: 0}
    disc_margin = -math.inf
    split_min = math.inf
    for ui, vi, value in zip(u, v, direct, strict=True):
        case = _classify_float(ui)
        counts[case] += 1
        closed = octonion_case_value(ui, vi, case)
        errors[case] = max(errors[case], abs(closed - value) / max(1.0, abs(value)))
        if case == 3:
            disc = case3_discriminant(ui, vi[2])
            scale = max(1.0, abs(disc["bound"]))
            disc_margin = max(disc_margin, (disc["discriminant"] - disc["bound"]) / scale)
            split_min = min(split_min, disc["am_gm_term"], disc["square_term"])
    tol = 1e-8
    passed = (
        float(direct.min()) >= -eps
        and max(errors.values()) <= tol
        and disc_margin <= tol
        and split_min >= -tol
    )
    return CheckReport(
        check="cross_positive_exact",
        params={"n": 3, "algebra": "O", "seed": seed, "eps": eps},
        samples=samples,
        min_value=float(direct.min()),
        passed=passed,
        details={
            "case_counts": {str(k): v for k, v in counts.items()},
            "closed_form_max_rel_error": {str(k): v for k, v in errors.items()},
            "discriminant_minus_bound_max_rel": disc_margin if counts[3] else None,
            "am_gm_terms_min": split_min if counts[3] else None,
        },
    )


def verify_cross_positive(
    b: ExoticGenerator,
    mode: CheckMode = CheckMode.SAMPLED,
    budget: int = 100_000,
    seed: int = 0,
    eps: float = 1e-9,
    threads: int | None = None,
) -> CheckReport:
    if mode is CheckMode.SAMPLED:
        report = check_sv_condition(b.cone_map, budget, seed, eps, threads)
        return report.model_copy(update={"check": "cross_positive_sampled"})
    if mode is CheckMode.POSITIVE:
        return check_positive(b.cone_map, budget, seed, eps, threads)
    if b.algebra is Algebra.O:
        return octonion_case_report(budget, seed, eps)
    return _exact_associative(b, budget, seed, eps)


# -- semigroup -------------------------------------------------------------


def semigroup_orbit(
    b: ExoticGenerator | ConeMap, x0: HermitianMatrix, t_grid: Sequence[float], eps: float = 1e-8
) -> OrbitReport:
    """e^{tB} X0 along ``t_grid`` with eigenvalue and cone-membership readings."""
    generator = b.cone_map if isinstance(b, ExoticGenerator) else b
    if not cone_member(x0, eps):
        raise DomainError("the starting point is not in the cone")
    if any(t < 0 for t in t_grid) or any(t2 <= t1 for t1, t2 in zip(t_grid, t_grid[1:], strict=False)):
        raise DomainError("t_grid must be nonnegative and increasing")
    points = []
    for t in t_grid:
        xt = expm(generator, t).apply(x0.to_float())
        points.append(OrbitPoint(t=t, min_eigenvalue=min_eigenvalue(xt), cone_member=cone_member(xt, eps)))
    return OrbitReport(points=points, passed=all(p.cone_member for p in points))
