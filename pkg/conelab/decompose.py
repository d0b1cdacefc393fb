"""
Indecomposability of the exotic generator.

Assume B = lie_map(H, D) + B' with B' positive. Every pair (u, v) with
<uu*, vv*> = 0 and <B(uu*), vv*> = 0 whose line family (v + uy)(v + uy)*
stays rank one then forces the linear relation

    u*(lie_map(H, D)(uu*) v) = u*(B(uu*) v)

in the real coordinates of H and the coefficients of D. The certificate
collects these relations from fixed vector families, reads off the forced
shape of H with exact row reduction, adds the conclusions of the Y_l
determinant argument and ends at the inconsistent system with residual n - 2.

``attempt_decomposition_lp`` is the generic falsifier: the same first-order
relations, second-order kernel equalities from Y_l, and sampled positivity
inequalities, decided exactly through a Farkas system.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any

import numpy as np
import sympy
from scipy.optimize import linprog
from sympy.polys.matrices import DomainMatrix

from conelab.exotic import ExoticGenerator, det_pattern
from conelab.hurwitz import (
    HurwitzScalar,
    OctonionDerivation,
    basis_units,
    conj,
    mul,
)
from conelab.jordan import (
    ConeVector,
    HermitianMatrix,
    adjoint_dot,
    line_family_admissible,
    rank_one,
    sandwich,
    trace_inner,
)
from conelab.linmap import ConeMap, derivation_lift_action, lie_map
from conelab.models import (
    Algebra,
    CertificatePayload,
    CertificateStepPayload,
    DomainError,
    LPNumericalError,
    LPReport,
    PreconditionError,
    RowPayload,
    Verdict,
    format_number,
)
from conelab.utils.exact import LinearSystem
from conelab.utils.simplex import find_nonnegative_solution

logger = logging.getLogger(__name__)

Action = Callable[[HermitianMatrix], HermitianMatrix]
MapLike = ConeMap | ExoticGenerator | Action


def _action(a: MapLike) -> Action:
    if isinstance(a, ExoticGenerator):
        return a.apply
    if isinstance(a, ConeMap):
        if a.action is None:
            raise PreconditionError("exact relations need a map with an exact action")
        return a.action
    return a


# -- unknowns and relations ------------------------------------------------


@dataclass(frozen=True)
class UnknownLayout:
    """Real unknowns: coordinate k of h_ij at (i*n + j)*d + k, then derivation coefficients."""

    n: int
    algebra: Algebra
    with_derivations: bool = True

    @property
    def h_size(self) -> int:
        return self.n * self.n * self.algebra.dim

    @property
    def derivations(self) -> list[OctonionDerivation]:
        if not self.with_derivations or self.algebra not in (Algebra.H, Algebra.O):
            return []
        return OctonionDerivation.standard_basis(self.algebra)

    @property
    def size(self) -> int:
        return self.h_size + len(self.derivations)

    def index(self, i: int, j: int, k: int) -> int:
        return (i * self.n + j) * self.algebra.dim + k

    def names(self) -> list[str]:
        d = self.algebra.dim
        out = [
            f"h{i + 1},{j + 1}[{k + 1}]"
            for i in range(self.n)
            for j in range(self.n)
            for k in range(d)
        ]
        pairs = [(i, j) for i in range(2, d + 1) for j in range(i + 1, d + 1)]
        out.extend(f"D[f{i},f{j}]" for i, j in pairs[: len(self.derivations)])
        return out

    def unpack(self, values: Sequence[Fraction]) -> list[list[HurwitzScalar]]:
        d = self.algebra.dim
        return [
            [
                HurwitzScalar.from_coeffs(self.algebra, values[self.index(i, j, 0) : self.index(i, j, 0) + d])
                for j in range(self.n)
            ]
            for i in range(self.n)
        ]


@dataclass(frozen=True)
class Relation:
    """sum(coefficients[k] * x_k) = rhs (or >= rhs for inequality rows)."""

    coefficients: dict[int, Fraction]
    rhs: Fraction

    def is_trivial(self) -> bool:
        return not self.coefficients and self.rhs == 0

    def evaluate(self, values: Sequence[Fraction]) -> Fraction:
        return sum((c * values[k] for k, c in self.coefficients.items()), Fraction(0))

    def to_payload(self, names: Sequence[str]) -> RowPayload:
        return RowPayload(
            coefficients={names[k]: str(format_number(c)) for k, c in sorted(self.coefficients.items())},
            rhs=str(format_number(self.rhs)),
        )


@dataclass(frozen=True)
class DecompositionHypothesis:
    """A candidate split a = lie_map(H, D) + B'; B' must be positive for it to hold."""

    h: Sequence[Sequence[HurwitzScalar]]
    derivation: OctonionDerivation | None = None

    @classmethod
    def from_values(cls, layout: UnknownLayout, values: Sequence[Fraction]) -> DecompositionHypothesis:
        terms = [
            d.scaled(c)
            for d, c in zip(layout.derivations, values[layout.h_size :], strict=True)
            if c
        ]
        derivation = sum(terms[1:], terms[0]) if terms else None
        return cls(layout.unpack(values), derivation)

    def lie_part(self) -> ConeMap:
        return lie_map(self.h, self.derivation)

    def remainder(self, a: ConeMap | ExoticGenerator) -> ConeMap:
        """B' = a - lie_map(H, D), hermitian-preserving as a difference of two such maps."""
        if isinstance(a, ExoticGenerator):
            a = a.cone_map
        return a - self.lie_part()

    def pairing(self, v: ConeVector, u: ConeVector) -> HurwitzScalar:
        """v*Hu."""
        total = HurwitzScalar.zero(u.algebra)
        for i, row in enumerate(self.h):
            hu = HurwitzScalar.zero(u.algebra)
            for j, x in enumerate(row):
                hu = hu + mul(x, u.components[j])
            total = total + mul(conj(v.components[i]), hu)
        return total


def _relations(coeffs: Sequence[HurwitzScalar], target: HurwitzScalar) -> list[Relation]:
    out = []
    for c in range(target.algebra.dim):
        row = {k: x.coeffs[c] for k, x in enumerate(coeffs) if x.coeffs[c]}
        rel = Relation(row, Fraction(target.coeffs[c]))
        if not rel.is_trivial():
            out.append(rel)
    return out


def lie_pairing(
    left: ConeVector, m: HermitianMatrix, right: ConeVector, layout: UnknownLayout
) -> list[HurwitzScalar]:
    """left*(L_e(M) right) for each unit unknown e of lie_map(H, D)."""
    n, algebra = layout.n, layout.algebra
    rows = m.entries
    lconj = [conj(x) for x in left.components]
    rv = right.components
    out = [HurwitzScalar.zero(algebra)] * layout.size
    for j in range(n):
        for k, f in enumerate(basis_units(algebra)):
            # E = f at (i, j): (EM)_iq = f M_jq and (ME*)_pi = M_pj conj(f)
            s = HurwitzScalar.zero(algebra)
            for q in range(n):
                s = s + mul(mul(f, rows[j][q]), rv[q])
            col = [mul(rows[p][j], conj(f)) for p in range(n)]
            for i in range(n):
                acc = mul(lconj[i], s)
                for p in range(n):
                    acc = acc + mul(lconj[p], mul(col[p], rv[i]))
                out[layout.index(i, j, k)] = acc
    for g, derivation in enumerate(layout.derivations):
        out[layout.h_size + g] = sandwich(left, derivation_lift_action(derivation)(m), right)
    return out


# -- zeros of cross-positive maps ------------------------------------------


def check_zero_pair(a: MapLike, u: ConeVector, v: ConeVector) -> None:
    """Raise PreconditionError unless (u, v) pins a relation for ``a``."""
    u, v = u.to_exact(), v.to_exact()
    if u.is_zero() or v.is_zero():
        raise PreconditionError("zero vectors pin nothing")
    mu, mv = rank_one(u), rank_one(v)
    if trace_inner(mu, mv) != 0:
        raise PreconditionError("<uu*, vv*> != 0")
    if trace_inner(_action(a)(mu), mv) != 0:
        raise PreconditionError("<A(uu*), vv*> != 0")
    if not u.algebra.is_associative and not line_family_admissible(u, v):
        raise PreconditionError("(v + uy)(v + uy)* is not rank one for every y")


def zeros_constraint(a: MapLike, u: ConeVector, v: ConeVector) -> HurwitzScalar:
    """The value v*Hu forced on any decomposition a = lie_map(H) + positive."""
    check_zero_pair(a, u, v)
    u, v = u.to_exact(), v.to_exact()
    target = adjoint_dot(u, _action(a)(rank_one(u)).apply(v))
    return conj(target) / u.norm2()


def zeros_relation(
    a: MapLike, u: ConeVector, v: ConeVector, layout: UnknownLayout
) -> tuple[list[Relation], HurwitzScalar]:
    """The real rows of u*(lie_map(H, D)(uu*) v) = u*(A(uu*) v) and the forced v*Hu."""
    check_zero_pair(a, u, v)
    u, v = u.to_exact(), v.to_exact()
    m = rank_one(u)
    target = adjoint_dot(u, _action(a)(m).apply(v))
    rows = _relations(lie_pairing(u, m, v, layout), target)
    return rows, conj(target) / u.norm2()


def structured_vectors(n: int, subset: Sequence[int], x: HurwitzScalar) -> tuple[ConeVector, ConeVector]:
    """u_l = x for l in ``subset`` (1-based, within 2..n) and 1 otherwise; v = u - n e_1."""
    if x.norm2() != 1:
        raise DomainError("x must be a unit")
    if any(not 2 <= l <= n for l in subset):  # noqa: E741
        raise DomainError(f"subset must lie in 2..{n}")
    one = HurwitzScalar.one(x.algebra)
    u = ConeVector(x.algebra, tuple(x.to_exact() if l + 1 in subset else one for l in range(n)))  # noqa: E741
    v = u - ConeVector.basis(x.algebra, n, 0).scaled_real(n)
    return u, v


def _structured_subsets(n: int) -> list[tuple[int, ...]]:
    return [(), (2,), *((l,) for l in range(3, n + 1)), (2, 3)]  # noqa: E741


def _unit_family(n: int) -> list[tuple[int, int]]:
    """(l, j), 0-based: u = e_l, v = e_j with j not in {l-1, l} cyclically."""
    return [(l, j) for l in range(n) for j in range(n) if j not in {l, (l - 1) % n}]  # noqa: E741


# -- certificate -----------------------------------------------------------


@dataclass
class CertificateStep:
    kind: str
    description: str
    source: dict[str, Any]
    relations: list[Relation] = field(default_factory=list)
    forced_value: HurwitzScalar | None = None
    conclusion: str | None = None
    pair: tuple[ConeVector, ConeVector] | None = None

    def to_payload(self, names: Sequence[str]) -> CertificateStepPayload:
        source = dict(self.source)
        if self.pair is not None:
            source["u"] = self.pair[0].to_payload().model_dump()
            source["v"] = self.pair[1].to_payload().model_dump()
        return CertificateStepPayload(
            kind=self.kind,
            description=self.description,
            source=source,
            rows=[r.to_payload(names) for r in self.relations],
            forced_value=self.forced_value.to_payload() if self.forced_value is not None else None,
            conclusion=self.conclusion,
        )


@dataclass
class Certificate:
    n: int
    algebra: Algebra
    layout: UnknownLayout
    steps: list[CertificateStep]
    residual: Fraction
    verdict: Verdict
    consistent: bool

    def to_payload(self) -> CertificatePayload:
        names = self.layout.names()
        return CertificatePayload(
            n=self.n,
            algebra=self.algebra,
            unknowns=names,
            steps=[s.to_payload(names) for s in self.steps],
            residual=str(format_number(self.residual)),
            verdict=self.verdict,
            consistent=self.consistent,
        )


H1_LABEL = "(n-1)Re h_1 - sum Re h_l"


def _kappa(n: int) -> Fraction:
    return Fraction((n - 2) * (n * n - n + 1), 2)


def _h1_functional(layout: UnknownLayout) -> dict[int, Fraction]:
    """(n-1) Re h_11 - sum_{l>=2} Re h_ll."""
    n = layout.n
    out = {layout.index(0, 0, 0): Fraction(n - 1)}
    for l in range(1, n):  # noqa: E741
        out[layout.index(l, l, 0)] = Fraction(-1)
    return out


def normalization_relations(layout: UnknownLayout) -> list[Relation]:
    """Im Tr(H) = 0."""
    n = layout.n
    return [
        Relation({layout.index(m, m, c): Fraction(1) for m in range(n)}, Fraction(0))
        for c in range(1, layout.algebra.dim)
    ]


def yl_relations(layout: UnknownLayout, l: int) -> list[Relation]:  # noqa: E741
    """h_l - h_1 = -(n-2)(n^2-n+1)/2 coordinatewise, l 1-based."""
    out = []
    for c in range(layout.algebra.dim):
        rhs = -_kappa(layout.n) if c == 0 else Fraction(0)
        coeffs = {layout.index(l - 1, l - 1, c): Fraction(1), layout.index(0, 0, c): Fraction(-1)}
        out.append(Relation(coeffs, rhs))
    return out


class _Builder:
    def __init__(self, b: ExoticGenerator, with_derivations: bool = True):
        self.b = b
        self.layout = UnknownLayout(b.n, b.algebra, with_derivations)
        self.system = LinearSystem(self.layout.size)
        self.steps: list[CertificateStep] = []

    def add(self, step: CertificateStep) -> CertificateStep:
        for rel in step.relations:
            self.system.add(rel.coefficients, rel.rhs)
        self.steps.append(step)
        logger.debug(f"step {len(self.steps)} ({step.kind}): {len(step.relations)} rows")
        return step

    def pair_step(
        self, kind: str, description: str, source: dict[str, Any], u: ConeVector, v: ConeVector
    ) -> CertificateStep:
        rows, forced = zeros_relation(self.b, u, v, self.layout)
        return self.add(CertificateStep(kind, description, source, rows, forced, pair=(u, v)))

    def normalization(self) -> None:
        rows = normalization_relations(self.layout)
        self.add(CertificateStep("normalization", "Tr(H) is real", {"family": "trace"}, rows))

    def unit_family(self) -> None:
        n, alg = self.b.n, self.b.algebra
        for l, j in _unit_family(n):  # noqa: E741
            u, v = ConeVector.basis(alg, n, l), ConeVector.basis(alg, n, j)
            source = {"family": "unit", "l": l + 1, "j": j + 1}
            self.pair_step("unit_pair", f"u = e_{l + 1}, v = e_{j + 1}", source, u, v)

    def structured_family(self) -> None:
        x = -HurwitzScalar.one(self.b.algebra)
        for subset in _structured_subsets(self.b.n):
            u, v = structured_vectors(self.b.n, subset, x)
            source = {"family": "structured", "S": list(subset), "x": "-1"}
            label = "{" + ", ".join(map(str, subset)) + "}"
            self.pair_step("structured_pair", f"S = {label}, x = -1", source, u, v)

    def conclude(self, kind: str, functional: dict[int, Fraction], label: str) -> Fraction:
        value = self.system.implied_value(functional)
        if value is None:
            raise PreconditionError(f"relations do not determine {label}")
        names = self.layout.names()
        source = {"functional": {names[k]: str(format_number(c)) for k, c in functional.items()}}
        conclusion = f"{label} = {format_number(value)}"
        self.add(CertificateStep(kind, f"implied value of {label}", source, conclusion=conclusion))
        return value

    def conclude_off_diagonal(self) -> list[str]:
        names = self.layout.names()
        zeros = []
        n, d = self.b.n, self.b.algebra.dim
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                for k in range(d):
                    idx = self.layout.index(i, j, k)
                    if self.system.implied_value({idx: Fraction(1)}) != 0:
                        raise PreconditionError(f"{names[idx]} is not forced to zero")
                    zeros.append(names[idx])
        self.add(
            CertificateStep(
                "off_diagonal",
                "every off-diagonal entry of H vanishes",
                {"entries": len(zeros)},
                conclusion="H is diagonal",
            )
        )
        return zeros

    def center_family(self) -> None:
        alg = self.b.algebra
        for m in range(2, self.b.n + 1):
            for k in range(2, alg.dim + 1):
                self.add(center_constraints(self.b, m, HurwitzScalar.unit(alg, k), self.layout))

    def conclude_center(self) -> None:
        n, alg = self.b.n, self.b.algebra
        for l in range(n):  # noqa: E741
            for c in range(1, alg.dim):
                if self.system.implied_value({self.layout.index(l, l, c): Fraction(1)}) != 0:
                    raise PreconditionError(f"Im h_{l + 1} is not forced to zero")
        # D(f)[c] as a functional of the generator coefficients
        for f in basis_units(alg)[1:]:
            images = [dv(f) for dv in self.layout.derivations]
            for c in range(alg.dim):
                functional = {
                    self.layout.h_size + g: Fraction(img.coeffs[c])
                    for g, img in enumerate(images)
                    if img.coeffs[c]
                }
                if functional and self.system.implied_value(functional) != 0:
                    raise PreconditionError("the derivation part is not forced to vanish")
        self.add(
            CertificateStep(
                "center",
                "the diagonal of H is real and D = 0",
                {"units": alg.dim - 1},
                conclusion="H is real diagonal, D = 0",
            )
        )


def forced_h_relations(b: ExoticGenerator) -> dict[str, Any]:
    """Off-diagonal zeros of H and (n-1) h_1 - sum h_l = (n-1)(n-2)(n^2-n-1)/2."""
    builder = _Builder(b, with_derivations=False)
    builder.normalization()
    builder.unit_family()
    builder.structured_family()
    zeros = builder.conclude_off_diagonal()
    functional = _h1_functional(builder.layout)
    value = builder.conclude("h1_relation", functional, H1_LABEL)
    return {
        "off_diagonal_zero": zeros,
        "h1_relation": Relation(functional, value),
        "subsets": [list(s) for s in _structured_subsets(b.n)],
        "steps": builder.steps,
    }


def center_constraints(
    b: ExoticGenerator, m: int, x: HurwitzScalar, layout: UnknownLayout | None = None
) -> CertificateStep:
    """Relations from S = {m} with a unit x; they force D(x) = conj(h_m) x - x conj(h_m)."""
    layout = layout or UnknownLayout(b.n, b.algebra)
    u, v = structured_vectors(b.n, (m,), x)
    rows, forced = zeros_relation(b, u, v, layout)
    conclusion = (
        "vacuous: every element of R is central"
        if b.algebra is Algebra.R
        else f"D(x) = conj(h_{m}) x - x conj(h_{m})"
    )
    return CertificateStep(
        "center_pair",
        f"S = {{{m}}}, x = {x!r}",
        {"family": "center", "m": m, "x": x.to_payload().model_dump()},
        rows,
        forced,
        conclusion,
        pair=(u, v),
    )


# -- the Y_l determinant ---------------------------------------------------


@dataclass(frozen=True)
class YlDeterminant:
    closed_form: Fraction
    explicit: Fraction
    structured: Fraction

    @property
    def agree(self) -> bool:
        return self.closed_form == self.explicit == self.structured


def _sym(h: HurwitzScalar | Fraction | int | sympy.Expr) -> sympy.Expr:
    if isinstance(h, sympy.Basic):
        return h
    if not isinstance(h, HurwitzScalar):
        return sympy.Rational(Fraction(h).numerator, Fraction(h).denominator)
    if h.algebra is Algebra.C:
        re, im = (Fraction(c) for c in h.coeffs)
        return _sym(re) + sympy.I * _sym(im)
    if not h.is_real():
        raise DomainError("Y_l is defined for central h only")
    re = Fraction(h.re())
    return sympy.Rational(re.numerator, re.denominator)


def _to_fraction(value: sympy.Expr) -> Fraction:
    real = sympy.Rational(sympy.re(sympy.expand(value)))
    return Fraction(int(real.p), int(real.q))


def yl_matrix(h: Sequence[HurwitzScalar | Fraction | int], l: int, n: int) -> sympy.Matrix:  # noqa: E741
    """Y_l for diagonal H = diag(h), l in 2..n; indices 1..n without l."""
    b = ExoticGenerator(n)
    p, q, t = _sym(b.p), _sym(b.q), sympy.Integer(b.t)
    hs = [_sym(x) for x in h]
    idx = [j for j in range(n) if j != l - 1]

    def entry(a: int, c: int) -> sympy.Expr:
        j, k = idx[a], idx[c]
        if a == c:
            return (-1 if j == 0 else -t) - 2 * sympy.re(hs[j])
        base = -p if 0 in (j, k) else -q
        return base - hs[j] - sympy.conjugate(hs[k])

    return sympy.Matrix(n - 1, n - 1, entry)


def r_matrix(n: int) -> sympy.Matrix:
    size = n - 1
    r = sympy.zeros(size, size)
    r[0, 0] = 1
    for k in range(1, size - 1):
        r[k, 0] = -1
        r[k, k] = 1
    r[size - 1, 0] = 2 - n
    for k in range(1, size):
        r[size - 1, k] = 1
    return r


def _yl_closed(hs: Sequence[sympy.Expr], l: int, n: int) -> sympy.Expr:  # noqa: E741
    kappa = sympy.Rational((n - 2) * (n * n - n + 1), 2)
    const = sympy.Integer(n * (n - 1)) ** (n - 3) * sympy.Integer(n - 2) ** (n - 4)
    gap = hs[l - 1] - hs[0] + kappa
    return -const * gap * sympy.conjugate(gap)


def yl_determinant(h: Sequence[HurwitzScalar | Fraction | int], l: int, n: int) -> YlDeterminant:  # noqa: E741
    """det Y_l three ways.

    The closed form -n^(n-3) (n-1)^(n-3) (n-2)^(n-4) |h_l - h_1 + kappa|^2, the
    sympy determinant of Y_l, and -|w|^2 times the pattern determinant of the
    middle block of R Y_l R^T, where w is its bottom-left entry.
    """
    if n < 3 or not 2 <= l <= n or len(h) != n:
        raise DomainError(f"need n >= 3, 2 <= l <= n and n values of h, got n={n}, l={l}")
    hs = [_sym(x) for x in h]
    k = n * n - n - 1
    h1_gap = (n - 1) * hs[0] - sum(hs[1:]) - sympy.Rational((n - 1) * (n - 2) * k, 2)
    if sympy.simplify(h1_gap) != 0:
        raise PreconditionError("h violates (n-1) h_1 = sum h_l + (n-1)(n-2)(n^2-n-1)/2")
    closed = _yl_closed(hs, l, n)

    y = yl_matrix(h, l, n)
    explicit = y.det()

    conj_y = (r_matrix(n) * y * r_matrix(n).T).applyfunc(sympy.expand)
    last = n - 2
    w = conj_y[last, 0]
    middle = [conj_y[i, i] for i in range(1, last)]
    off = conj_y[1, 2] if last > 2 else sympy.Integer(0)
    structured = -w * sympy.conjugate(w) * det_pattern(middle, off)
    return YlDeterminant(_to_fraction(closed), _to_fraction(explicit), _to_fraction(structured))


@lru_cache(maxsize=None)
def yl_identity(l: int, n: int, complex_entries: bool = False) -> bool:  # noqa: E741
    """Whether det Y_l equals the closed form for every admissible diagonal h.

    h_2..h_n are free symbols (complex when ``complex_entries``) and h_1 is
    solved from (n-1) h_1 = sum h_l + (n-1)(n-2)(n^2-n-1)/2, so True is a
    polynomial identity in the free symbols.
    """
    if n < 3 or not 2 <= l <= n:
        raise DomainError(f"need n >= 3 and 2 <= l <= n, got n={n}, l={l}")
    re_parts = sympy.symbols(f"x2:{n + 1}", real=True)
    if complex_entries:
        im_parts = sympy.symbols(f"y2:{n + 1}", real=True)
    else:
        im_parts = (sympy.Integer(0),) * (n - 1)
    free = [a + sympy.I * b for a, b in zip(re_parts, im_parts, strict=True)]
    k = n * n - n - 1
    h1 = (sum(free) + sympy.Rational((n - 1) * (n - 2) * k, 2)) / (n - 1)
    hs = [sympy.expand(h1), *free]
    y = DomainMatrix.from_Matrix(yl_matrix(hs, l, n).applyfunc(sympy.expand))
    explicit = y.domain.to_sympy(y.det())
    difference = sympy.expand(sympy.cancel(explicit - _yl_closed(hs, l, n)))
    logger.debug(f"Y_{l} identity for n={n} over {y.domain}: difference {difference}")
    return difference == 0


# -- certificate assembly and replay ---------------------------------------


def indecomposability_certificate(n: int, algebra: Algebra = Algebra.R) -> Certificate:
    """Exact certificate that B is not lie_map(H, D) plus a positive map."""
    if n < 3:
        logger.info(f"n={n}: no exotic generator, certificate is inconclusive")
        layout = UnknownLayout(max(n, 1), algebra)
        return Certificate(n, algebra, layout, [], Fraction(0), Verdict.INCONCLUSIVE, True)
    b = ExoticGenerator(n, algebra)
    builder = _Builder(b)
    builder.normalization()
    builder.unit_family()
    builder.structured_family()
    builder.conclude_off_diagonal()
    r1 = builder.conclude("h1_relation", _h1_functional(builder.layout), H1_LABEL)
    if algebra in (Algebra.H, Algebra.O):
        builder.center_family()
        builder.conclude_center()

    complex_entries = algebra is Algebra.C
    for l in range(2, n + 1):  # noqa: E741
        if not yl_identity(l, n, complex_entries):
            raise PreconditionError(f"det Y_{l} does not match its closed form")
        builder.add(
            CertificateStep(
                "yl_determinant",
                f"det Y_{l} = -c |h_{l} - h_1 + (n-2)(n^2-n+1)/2|^2 >= 0",
                {"l": l, "free": f"h_2..h_{n}", "complex": complex_entries},
                yl_relations(builder.layout, l),
                conclusion=f"h_{l} = h_1 - {format_number(_kappa(n))}",
            )
        )
    consistent = builder.system.is_consistent()
    residual = _kappa(n) - r1 / (n - 1)
    verdict = Verdict.INDECOMPOSABLE if residual != 0 and not consistent else Verdict.INCONCLUSIVE
    builder.add(
        CertificateStep(
            "residual",
            "substituting h_l = h_1 - kappa into (n-1) h_1 - sum h_l",
            {"kappa": str(format_number(_kappa(n))), "h1_value": str(format_number(r1))},
            conclusion=f"0 = {format_number(-residual)}",
        )
    )
    logger.info(f"certificate n={n} {algebra.value}: residual {residual}, {verdict.value}")
    return Certificate(n, algebra, builder.layout, builder.steps, residual, verdict, consistent)


def replay_step(step: CertificateStep, b: ExoticGenerator, layout: UnknownLayout) -> bool:
    """Recompute the rows of a relation-bearing step from its recorded source."""
    if step.pair is not None:
        rows, forced = zeros_relation(b, step.pair[0], step.pair[1], layout)
        return rows == step.relations and forced == step.forced_value
    if step.kind == "normalization":
        return normalization_relations(layout) == step.relations
    if step.kind == "yl_determinant":
        l = step.source["l"]  # noqa: E741
        complex_entries = layout.algebra is Algebra.C
        if step.source.get("complex") != complex_entries:
            return False
        return yl_identity(l, layout.n, complex_entries) and yl_relations(layout, l) == step.relations
    return not step.relations


def replay_certificate(cert: Certificate) -> bool:
    """Replay every step and re-derive each recorded conclusion from the replayed rows."""
    if cert.n < 3:
        return cert.verdict is Verdict.INCONCLUSIVE and cert.residual == 0
    b = ExoticGenerator(cert.n, cert.algebra)
    system = LinearSystem(cert.layout.size)
    for step in cert.steps:
        if not replay_step(step, b, cert.layout):
            logger.error(f"step {step.kind} failed to replay")
            return False
        if step.kind == "h1_relation":
            value = system.implied_value(_h1_functional(cert.layout))
            if value is None or step.conclusion != f"{H1_LABEL} = {format_number(value)}":
                return False
        for rel in step.relations:
            system.add(rel.coefficients, rel.rhs)
    return system.is_consistent() == cert.consistent


# -- LP falsifier ----------------------------------------------------------


@dataclass
class LPOutcome:
    report: LPReport
    layout: UnknownLayout
    equalities: list[Relation]
    inequalities: list[Relation]
    witness: tuple[list[Fraction], list[Fraction]] | None = None
    h: list[Fraction] | None = None
    hypothesis: DecompositionHypothesis | None = None


def random_orthogonal_pair(
    n: int, algebra: Algebra, rng: np.random.Generator, bound: int = 3
) -> tuple[ConeVector, ConeVector]:
    """Integer u and v' = |u|^2 v - u(u*v), so that u*v' = 0."""
    shape = (n, algebra.dim)
    while True:
        u = ConeVector.from_coeffs(algebra, rng.integers(-bound, bound + 1, shape).tolist())
        v = ConeVector.from_coeffs(algebra, rng.integers(-bound, bound + 1, shape).tolist())
        if u.is_zero():
            continue
        w = v.scaled_real(u.norm2()) - u.right_mul(adjoint_dot(u, v))
        if not w.is_zero():
            return u, w


def _is_zero_pair(a: MapLike, u: ConeVector, v: ConeVector) -> bool:
    try:
        check_zero_pair(a, u, v)
    except PreconditionError:
        return False
    return True


def _positivity_row(
    action: Action, u: ConeVector, w: ConeVector, layout: UnknownLayout
) -> Relation:
    # Re(w*(A - lie)(uu*) w) >= 0
    m = rank_one(u)
    coeffs = lie_pairing(w, m, w, layout)
    rhs = Fraction(sandwich(w, action(m), w).re())
    return Relation({k: -Fraction(x.re()) for k, x in enumerate(coeffs) if x.re()}, -rhs)


def kernel_relations(a: MapLike, layout: UnknownLayout) -> list[Relation]:
    """Equalities Y_l(A - lie_map(H)) z = 0 for z = (2-n, 1, ..., 1).

    Only emitted when A maps the real matrix units the way the determinant
    argument needs (diagonal to diagonal, E_jk + E_kj to a real multiple of
    itself, diagonal leakage only along the cyclic chain) and z^T Y_l(A) z = 0.
    """
    action = _action(a)
    n, alg = layout.n, layout.algebra
    if n < 3:
        return []
    one = HurwitzScalar.one(alg)
    diag_images = [action(HermitianMatrix.unit_matrix(alg, n, j, j, one)) for j in range(n)]
    for img in diag_images:
        if any(not img.entries[i][k].is_zero() for i in range(n) for k in range(n) if i != k):
            return []
        if any(not img.entries[i][i].is_real() for i in range(n)):
            return []
    scale = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        for k in range(j + 1, n):
            img = action(HermitianMatrix.unit_matrix(alg, n, j, k, one))
            y = img.entries[j][k]
            if not y.is_real() or img != HermitianMatrix.unit_matrix(alg, n, j, k, y):
                return []
            scale[j][k] = scale[k][j] = Fraction(y.re())
    out: list[Relation] = []
    for l in range(1, n):  # noqa: E741
        chain = [(l + s) % n for s in range(1, n)]
        pos = {j: i for i, j in enumerate(chain)}
        leaks = any(
            diag_images[m].entries[j][j].re() != 0 and pos[m] < pos[j]
            for j in chain
            for m in chain
            if m != j
        )
        if leaks:
            continue
        idx = [j for j in range(n) if j != l]
        z = [Fraction(2 - n)] + [Fraction(1)] * (n - 2)
        y = [
            [Fraction(diag_images[j].entries[j][j].re()) if j == k else scale[j][k] for k in idx]
            for j in idx
        ]
        if sum(z[a_] * y[a_][c] * z[c] for a_ in range(n - 1) for c in range(n - 1)) != 0:
            continue
        for a_ in range(n - 1):
            rhs = sum((y[a_][c] * z[c] for c in range(n - 1)), Fraction(0))
            for comp in range(alg.dim):
                sign = 1 if comp == 0 else -1
                coeffs = {layout.index(j, j, comp): sign * z[c] for c, j in enumerate(idx)}
                out.append(Relation(coeffs, rhs if comp == 0 else Fraction(0)))
    return out


def _dedupe(rows: list[Relation]) -> list[Relation]:
    seen = set()
    out = []
    for r in rows:
        key = (tuple(sorted(r.coefficients.items())), r.rhs)
        if key not in seen and not r.is_trivial():
            seen.add(key)
            out.append(r)
    return out


def _farkas(
    equalities: list[Relation], inequalities: list[Relation], size: int
) -> tuple[list[Fraction], list[Fraction]] | None:
    me, mg = len(equalities), len(inequalities)
    cols = 2 * me + mg
    a = [[Fraction(0)] * cols for _ in range(size + 1)]
    for r, rel in enumerate(equalities):
        for k, c in rel.coefficients.items():
            a[k][r] = c
            a[k][me + r] = -c
        a[size][r] = rel.rhs
        a[size][me + r] = -rel.rhs
    for r, rel in enumerate(inequalities):
        for k, c in rel.coefficients.items():
            a[k][2 * me + r] = c
        a[size][2 * me + r] = rel.rhs
    b = [Fraction(0)] * size + [Fraction(1)]
    y = find_nonnegative_solution(a, b)
    if y is None:
        return None
    return [y[r] - y[me + r] for r in range(me)], y[2 * me :]


def verify_farkas(outcome: LPOutcome) -> bool:
    """y_E . E + y_G . G = 0, y_E . f + y_G . g = 1 and y_G >= 0, exactly."""
    if outcome.witness is None:
        return False
    ye, yg = outcome.witness
    if any(y < 0 for y in yg):
        return False
    total = [Fraction(0)] * outcome.layout.size
    value = Fraction(0)
    for y, rel in zip(ye + yg, outcome.equalities + outcome.inequalities, strict=True):
        if not y:
            continue
        for k, c in rel.coefficients.items():
            total[k] += y * c
        value += y * rel.rhs
    return not any(total) and value == 1


def _satisfies(h: Sequence[Fraction], eq: list[Relation], ineq: list[Relation]) -> bool:
    return all(r.evaluate(h) == r.rhs for r in eq) and all(r.evaluate(h) >= r.rhs for r in ineq)


def _linprog(eq: list[Relation], ineq: list[Relation], size: int) -> Any:
    def dense(rows: list[Relation], sign: float) -> tuple[np.ndarray | None, np.ndarray | None]:
        if not rows:
            return None, None
        mat = np.zeros((len(rows), size))
        for i, r in enumerate(rows):
            for k, c in r.coefficients.items():
                mat[i, k] = sign * float(c)
        return mat, np.array([sign * float(r.rhs) for r in rows])

    a_eq, b_eq = dense(eq, 1.0)
    a_ub, b_ub = dense(ineq, -1.0)
    return linprog(np.zeros(size), A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=(None, None), method="highs")


def attempt_decomposition_lp(
    a: MapLike,
    n: int,
    algebra: Algebra,
    pairs: Sequence[tuple[ConeVector, ConeVector]] = (),
    random_pairs: int = 0,
    seed: int = 0,
    exact: bool = True,
) -> LPOutcome:
    """Search for H with a - lie_map(H) satisfying the necessary positivity conditions."""
    if not algebra.is_associative:
        raise DomainError("the LP parametrizes H over associative algebras only")
    action = _action(a)
    layout = UnknownLayout(n, algebra, with_derivations=False)
    equalities: list[Relation] = normalization_relations(layout) if algebra is Algebra.C else []
    inequalities: list[Relation] = []

    unit_pairs = [
        (ConeVector.basis(algebra, n, l), ConeVector.basis(algebra, n, j))
        for l, j in _unit_family(n)  # noqa: E741
    ]
    candidates = list(unit_pairs)
    minus_one = -HurwitzScalar.one(algebra)
    candidates += [structured_vectors(n, s, minus_one) for s in _structured_subsets(n) if all(x <= n for x in s)]
    candidates += list(pairs)
    rng = np.random.default_rng(seed)
    candidates += [random_orthogonal_pair(n, algebra, rng) for _ in range(random_pairs)]

    for u, v in candidates:
        if _is_zero_pair(action, u, v):
            rows, _ = zeros_relation(action, u, v, layout)
            equalities.extend(rows)
        for w in (v, v.scaled_real(2) + u, v.scaled_real(2) - u):
            inequalities.append(_positivity_row(action, u.to_exact(), w.to_exact(), layout))
    if all(_is_zero_pair(action, u, v) for u, v in unit_pairs):
        # the unit family pins H to its cyclic band, which the kernel rows need
        equalities.extend(kernel_relations(action, layout))
    equalities, inequalities = _dedupe(equalities), _dedupe(inequalities)
    logger.info(f"LP: {len(equalities)} equalities, {len(inequalities)} inequalities over {layout.size} unknowns")

    outcome = LPOutcome(
        LPReport(verdict=Verdict.FEASIBLE, equality_rows=len(equalities), inequality_rows=len(inequalities)),
        layout,
        equalities,
        inequalities,
    )
    names = layout.names()

    if not exact:
        result = _linprog(equalities, inequalities, layout.size)
        if result.status not in (0, 2):
            logger.error(f"HiGHS failed: {result.message}")
            raise LPNumericalError(f"LP solver failed: {result.message}")
        if result.status == 0:
            return _record_feasible(outcome, result.x)

    witness = _farkas(equalities, inequalities, layout.size)
    if witness is None:
        if not exact:
            raise LPNumericalError("float LP reported infeasibility but no exact Farkas witness exists")
        result = _linprog(equalities, inequalities, layout.size)
        if result.status != 0:
            raise LPNumericalError(f"exactly feasible system, but HiGHS found no point: {result.message}")
        return _record_feasible(outcome, result.x)

    outcome.witness = witness
    ye, yg = witness
    multipliers = {f"eq{i}": str(format_number(y)) for i, y in enumerate(ye) if y}
    multipliers.update({f"ineq{i}": str(format_number(y)) for i, y in enumerate(yg) if y})
    outcome.report = outcome.report.model_copy(
        update={"verdict": Verdict.INFEASIBLE, "witness": multipliers, "witness_verified": verify_farkas(outcome)}
    )
    logger.info(f"LP infeasible, Farkas witness with {len(multipliers)} multipliers over {len(names)} unknowns")
    return outcome


def _record_feasible(outcome: LPOutcome, x: np.ndarray) -> LPOutcome:
    h = [Fraction(float(v)).limit_denominator(10**6) for v in x]
    outcome.h = h
    outcome.hypothesis = DecompositionHypothesis.from_values(outcome.layout, h)
    outcome.report = outcome.report.model_copy(
        update={
            "verdict": Verdict.FEASIBLE,
            "h": [[x.to_payload() for x in row] for row in outcome.hypothesis.h],
            "exact_verified": _satisfies(h, outcome.equalities, outcome.inequalities),
        }
    )
    return outcome
