from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conelab.decompose import (
    H1_LABEL,
    DecompositionHypothesis,
    Relation,
    UnknownLayout,
    attempt_decomposition_lp,
    center_constraints,
    check_zero_pair,
    forced_h_relations,
    indecomposability_certificate,
    kernel_relations,
    lie_pairing,
    random_orthogonal_pair,
    replay_certificate,
    structured_vectors,
    verify_farkas,
    yl_determinant,
    yl_identity,
    zeros_constraint,
    zeros_relation,
)
from conelab.exotic import ExoticGenerator
from conelab.hurwitz import HurwitzScalar, OctonionDerivation
from conelab.jordan import ConeVector, HermitianMatrix, adjoint_dot, rank_one, sandwich
from conelab.linmap import ConeMap, derivation_lift, from_function, lie_action, lie_map
from conelab.models import Algebra, DomainError, PreconditionError, Verdict

from .strategies import small_ints, vectors


def k_of(n: int) -> int:
    return n * n - n - 1


def e(n: int, i: int, algebra: Algebra = Algebra.R) -> ConeVector:
    return ConeVector.basis(algebra, n, i)


def integer_h(rows: list[list[int]], algebra: Algebra = Algebra.R) -> list[list[HurwitzScalar]]:
    return [[HurwitzScalar.real(algebra, v) for v in row] for row in rows]


def trace_identity(n: int, algebra: Algebra) -> ConeMap:
    def action(x: HermitianMatrix) -> HermitianMatrix:
        return HermitianMatrix.identity(algebra, n, x.is_exact).scaled(x.trace())

    return from_function(action, n, algebra, label="Tr I")


class TestLayout:
    def test_sizes(self):
        assert UnknownLayout(3, Algebra.R).size == 9
        assert UnknownLayout(3, Algebra.H).size == 36 + 3
        assert UnknownLayout(3, Algebra.O).size == 72 + 21
        assert UnknownLayout(3, Algebra.O, with_derivations=False).size == 72

    def test_names_and_index(self):
        layout = UnknownLayout(3, Algebra.O)
        names = layout.names()
        assert names[0] == "h1,1[1]"
        assert names[layout.index(1, 2, 3)] == "h2,3[4]"
        assert names[layout.h_size] == "D[f2,f3]"
        assert names[-1] == "D[f7,f8]"

    def test_unpack(self):
        layout = UnknownLayout(2, Algebra.C)
        values = [Fraction(v) for v in range(8)]
        h = layout.unpack(values)
        assert h[1][0] == HurwitzScalar.from_coeffs(Algebra.C, [4, 5])


class TestLiePairing:
    @pytest.mark.parametrize("algebra", [Algebra.R, Algebra.C, Algebra.H])
    @given(data=st.data())
    def test_pairing_matches_lie_map(self, algebra, data):
        layout = UnknownLayout(3, algebra, with_derivations=False)
        values = [Fraction(data.draw(small_ints)) for _ in range(layout.size)]
        u, v, w = (data.draw(vectors(algebra, 3)) for _ in range(3))
        m = rank_one(u)
        coeffs = lie_pairing(v, m, w, layout)
        total = HurwitzScalar.zero(algebra)
        for c, value in zip(coeffs, values, strict=True):
            total = total + c * value
        assert total == sandwich(v, lie_action(layout.unpack(values))(m), w)


class TestZeros:
    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_structured_pair_identity(self, n):
        b = ExoticGenerator(n)
        u, v = structured_vectors(n, (), -HurwitzScalar.one(Algebra.R))
        target = adjoint_dot(u, b(rank_one(u)).apply(v))
        assert target == HurwitzScalar.real(Algebra.R, Fraction(-n * (n - 1) * (n - 2) * k_of(n), 2))
        forced = zeros_constraint(b, u, v)
        assert forced == HurwitzScalar.real(Algebra.R, Fraction(-(n - 1) * (n - 2) * k_of(n), 2))

    def test_unit_pair_relation(self, b3):
        layout = UnknownLayout(3, Algebra.R)
        rows, forced = zeros_relation(b3, e(3, 0), e(3, 1), layout)
        assert rows == [Relation({layout.index(1, 0, 0): Fraction(1)}, Fraction(0))]
        assert forced.is_zero()

    def test_preconditions(self, b3):
        with pytest.raises(PreconditionError):
            check_zero_pair(b3, e(3, 0), e(3, 0))
        with pytest.raises(PreconditionError):
            # orthogonal, but <B(E_11), E_33> = (n-1)^2
            check_zero_pair(b3, e(3, 0), e(3, 2))
        with pytest.raises(PreconditionError):
            check_zero_pair(b3, ConeVector.from_reals(Algebra.R, [0, 0, 0]), e(3, 1))
        check_zero_pair(b3, e(3, 0), e(3, 1))

    def test_map_without_exact_action(self, b3):
        stored = ConeMap.from_payload(b3.cone_map.to_payload())
        with pytest.raises(PreconditionError):
            zeros_constraint(stored, e(3, 0), e(3, 1))

    def test_structured_vectors_domain(self):
        with pytest.raises(DomainError):
            structured_vectors(3, (), HurwitzScalar.real(Algebra.R, 2))
        with pytest.raises(DomainError):
            structured_vectors(3, (1,), HurwitzScalar.one(Algebra.R))

    def test_structured_vectors_place_x(self):
        x = HurwitzScalar.unit(Algebra.H, 3)
        u, v = structured_vectors(4, (2, 4), x)
        assert u.components[1] == x and u.components[3] == x
        assert u.components[2] == HurwitzScalar.one(Algebra.H)
        assert v.components[0] == HurwitzScalar.real(Algebra.H, -3)


class TestForcedRelations:
    def test_h1_relation_for_n_three(self, b3):
        found = forced_h_relations(b3)
        rel = found["h1_relation"]
        layout = UnknownLayout(3, Algebra.R)
        assert rel.coefficients == {
            layout.index(0, 0, 0): 2,
            layout.index(1, 1, 0): -1,
            layout.index(2, 2, 0): -1,
        }
        assert rel.rhs == 5
        assert len(found["off_diagonal_zero"]) == 6
        assert found["subsets"] == [[], [2], [3], [2, 3]]

    @pytest.mark.parametrize(("n", "algebra"), [(4, Algebra.R), (3, Algebra.C), (5, Algebra.R)])
    def test_h1_value(self, n, algebra):
        found = forced_h_relations(ExoticGenerator(n, algebra))
        assert found["h1_relation"].rhs == Fraction((n - 1) * (n - 2) * k_of(n), 2)
        assert len(found["off_diagonal_zero"]) == n * (n - 1) * algebra.dim

    def test_center_constraints(self):
        real = center_constraints(ExoticGenerator(3), 2, HurwitzScalar.one(Algebra.R))
        assert real.conclusion.startswith("vacuous")
        quaternion = center_constraints(ExoticGenerator(3, Algebra.H), 3, HurwitzScalar.unit(Algebra.H, 2))
        assert quaternion.kind == "center_pair"
        assert quaternion.relations


class TestYlDeterminant:
    @pytest.mark.parametrize("c", [Fraction(0), Fraction(1), Fraction(-5, 3)])
    def test_n_three(self, c):
        h = [c, c - Fraction(7, 2), c - Fraction(3, 2)]
        second = yl_determinant(h, 2, 3)
        third = yl_determinant(h, 3, 3)
        assert second.agree and second.closed_form == 0
        assert third.agree and third.closed_form == -4

    def test_complex_entries(self):
        i = HurwitzScalar.unit(Algebra.C, 2)
        h = [i, i - HurwitzScalar.real(Algebra.C, Fraction(7, 2)), i - HurwitzScalar.real(Algebra.C, Fraction(3, 2))]
        det = yl_determinant(h, 3, 3)
        assert det.agree
        assert det.explicit == -4

    @pytest.mark.parametrize("l", [2, 3, 4])
    def test_sample_point_n_four(self, l):  # noqa: E741
        h = [Fraction(11), Fraction(0), Fraction(0), Fraction(0)]
        det = yl_determinant(h, l, 4)
        assert det.agree
        assert det.closed_form == -48

    def test_h1_must_hold(self):
        c = Fraction(1)
        with pytest.raises(PreconditionError):
            yl_determinant([Fraction(7, 2) + c, c, c], 2, 3)

    def test_domain(self):
        with pytest.raises(DomainError):
            yl_determinant([Fraction(0)] * 2, 2, 2)
        with pytest.raises(DomainError):
            yl_determinant([Fraction(5, 2), Fraction(0), Fraction(0)], 1, 3)

    @pytest.mark.parametrize("n", [4, 5, 6])
    @settings(max_examples=5)
    @given(data=st.data())
    def test_random_admissible_points(self, n, data):
        tail = data.draw(st.lists(st.integers(-20, 20), min_size=n - 1, max_size=n - 1))
        h1 = (sum(Fraction(v) for v in tail) + Fraction((n - 1) * (n - 2) * k_of(n), 2)) / (n - 1)
        h = [h1, *(Fraction(v) for v in tail)]
        for l in range(2, n + 1):  # noqa: E741
            det = yl_determinant(h, l, n)
            assert det.closed_form == det.explicit

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_identity_holds_symbolically(self, n):
        assert all(yl_identity(l, n) for l in range(2, n + 1))

    @pytest.mark.parametrize("n", [3, 4])
    def test_identity_holds_for_complex_entries(self, n):
        assert all(yl_identity(l, n, complex_entries=True) for l in range(2, n + 1))

    def test_identity_domain(self):
        with pytest.raises(DomainError):
            yl_identity(1, 3)
        with pytest.raises(DomainError):
            yl_identity(2, 2)


class TestCertificate:
    @pytest.mark.parametrize(
        ("n", "algebra"),
        [(3, Algebra.R), (4, Algebra.R), (5, Algebra.R), (3, Algebra.C), (3, Algebra.H), (3, Algebra.O)],
    )
    def test_indecomposable(self, n, algebra):
        cert = indecomposability_certificate(n, algebra)
        assert cert.verdict is Verdict.INDECOMPOSABLE
        assert cert.residual == n - 2
        assert not cert.consistent
        assert replay_certificate(cert)

    @pytest.mark.slow
    @pytest.mark.parametrize(
        ("n", "algebra"),
        [(6, Algebra.R), (4, Algebra.C), (5, Algebra.C), (6, Algebra.C), (4, Algebra.H), (5, Algebra.H), (6, Algebra.H)],
    )
    def test_indecomposable_up_to_six(self, n, algebra):
        cert = indecomposability_certificate(n, algebra)
        assert cert.verdict is Verdict.INDECOMPOSABLE
        assert cert.residual == n - 2
        assert replay_certificate(cert)

    def test_yl_steps_are_symbolic(self):
        cert = indecomposability_certificate(4, Algebra.C)
        steps = [s for s in cert.steps if s.kind == "yl_determinant"]
        assert [s.source["l"] for s in steps] == [2, 3, 4]
        assert all(s.source["complex"] for s in steps)
        idx = cert.steps.index(steps[0])
        cert.steps[idx] = replace(steps[0], source={**steps[0].source, "complex": False})
        assert not replay_certificate(cert)

    def test_step_sequence(self):
        cert = indecomposability_certificate(3, Algebra.H)
        kinds = [s.kind for s in cert.steps]
        assert kinds[0] == "normalization"
        assert kinds.count("unit_pair") == 3
        assert kinds.count("structured_pair") == 4
        assert kinds.count("center_pair") == 2 * 3
        assert kinds.count("yl_determinant") == 2
        assert kinds[-1] == "residual"
        h1 = next(s for s in cert.steps if s.kind == "h1_relation")
        assert h1.conclusion == f"{H1_LABEL} = 5"

    def test_payload(self):
        payload = indecomposability_certificate(4).to_payload()
        assert payload.residual == "2"
        assert payload.verdict is Verdict.INDECOMPOSABLE
        assert payload.unknowns[1] == "h1,2[1]"
        unit = next(s for s in payload.steps if s.kind == "unit_pair")
        assert unit.source["family"] == "unit"
        assert "u" in unit.source and "v" in unit.source

    def test_small_n_is_inconclusive(self):
        cert = indecomposability_certificate(2)
        assert cert.verdict is Verdict.INCONCLUSIVE
        assert cert.residual == 0
        assert replay_certificate(cert)

    def test_tampered_rows_fail_replay(self):
        cert = indecomposability_certificate(3)
        step = next(s for s in cert.steps if s.kind == "structured_pair")
        first = step.relations[0]
        step.relations[0] = Relation(first.coefficients, first.rhs + 1)
        assert not replay_certificate(cert)

    def test_tampered_conclusion_fails_replay(self):
        cert = indecomposability_certificate(3)
        idx = next(i for i, s in enumerate(cert.steps) if s.kind == "h1_relation")
        cert.steps[idx] = replace(cert.steps[idx], conclusion=f"{H1_LABEL} = 6")
        assert not replay_certificate(cert)


class TestLP:
    @pytest.mark.parametrize("algebra", [Algebra.R, Algebra.C])
    def test_exotic_generator_is_infeasible(self, algebra):
        b = ExoticGenerator(3, algebra)
        outcome = attempt_decomposition_lp(b, 3, algebra, random_pairs=20, seed=1)
        assert outcome.report.verdict is Verdict.INFEASIBLE
        assert outcome.report.witness_verified
        assert verify_farkas(outcome)

    def test_float_mode_agrees(self, b3):
        outcome = attempt_decomposition_lp(b3, 3, Algebra.R, random_pairs=10, seed=2, exact=False)
        assert outcome.report.verdict is Verdict.INFEASIBLE
        assert outcome.report.witness_verified

    def test_more_pairs_keep_infeasibility(self, b3):
        few = attempt_decomposition_lp(b3, 3, Algebra.R, pairs=[(e(3, 0), e(3, 1))])
        many = attempt_decomposition_lp(b3, 3, Algebra.R, random_pairs=40, seed=3)
        assert few.report.verdict is many.report.verdict is Verdict.INFEASIBLE
        assert many.report.inequality_rows >= few.report.inequality_rows

    @pytest.mark.slow
    def test_thousand_pairs(self, b3):
        outcome = attempt_decomposition_lp(b3, 3, Algebra.R, random_pairs=1000, seed=7)
        assert outcome.report.verdict is Verdict.INFEASIBLE
        assert outcome.report.witness_verified
        assert outcome.report.inequality_rows > 0

    def test_lie_map_is_feasible(self):
        h0 = integer_h([[1, 2, 0], [0, -1, 1], [3, 0, 2]])
        outcome = attempt_decomposition_lp(lie_map(h0), 3, Algebra.R, random_pairs=15, seed=4)
        assert outcome.report.verdict is Verdict.FEASIBLE
        assert outcome.report.h is not None
        assert outcome.witness is None

    def test_positive_map_is_feasible(self):
        outcome = attempt_decomposition_lp(trace_identity(3, Algebra.C), 3, Algebra.C, random_pairs=10, seed=5)
        assert outcome.report.verdict is Verdict.FEASIBLE
        assert outcome.report.equality_rows == 1

    def test_octonions_are_rejected(self):
        with pytest.raises(DomainError):
            attempt_decomposition_lp(ExoticGenerator(3, Algebra.O), 3, Algebra.O)

    def test_kernel_relations(self, b3):
        layout = UnknownLayout(3, Algebra.R, with_derivations=False)
        rows = kernel_relations(b3, layout)
        # h_l - h_1 = -3/2 for l = 2, 3
        assert Relation({layout.index(0, 0, 0): Fraction(-1), layout.index(2, 2, 0): Fraction(1)}, Fraction(-3, 2)) in rows
        assert Relation({layout.index(0, 0, 0): Fraction(-1), layout.index(1, 1, 0): Fraction(1)}, Fraction(-3, 2)) in rows
        h0 = integer_h([[1, 2, 0], [0, -1, 1], [3, 0, 2]])
        assert kernel_relations(lie_map(h0), layout) == []
        assert kernel_relations(b3, UnknownLayout(2, Algebra.R)) == []

    def test_random_orthogonal_pair(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            u, v = random_orthogonal_pair(3, Algebra.H, rng)
            assert adjoint_dot(u, v).is_zero()
            assert not v.is_zero()


class TestHypothesis:
    def test_lie_map_zeros_recover_h(self):
        coeffs = [[(1, 0), (2, 1), (0, -2)], [(0, 1), (-1, 0), (1, 0)], [(3, 0), (0, 3), (2, 1)]]
        h0 = [[HurwitzScalar.from_coeffs(Algebra.C, c) for c in row] for row in coeffs]
        hypothesis = DecompositionHypothesis(h0)
        for subset in ((), (2,), (2, 3)):
            u, v = structured_vectors(3, subset, -HurwitzScalar.one(Algebra.C))
            assert zeros_constraint(lie_map(h0), u, v) == hypothesis.pairing(v, u)

    def test_remainder_of_a_lie_map_vanishes(self):
        h0 = integer_h([[1, 2, 0], [0, -1, 1], [3, 0, 2]])
        remainder = DecompositionHypothesis(h0).remainder(lie_map(h0))
        assert np.allclose(remainder.matrix, 0.0)
        assert remainder.apply(HermitianMatrix.identity(Algebra.R, 3)) == HermitianMatrix.zeros(Algebra.R, 3)

    def test_remainder_of_b(self, b3):
        h = integer_h([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
        remainder = DecompositionHypothesis(h).remainder(b3)
        x = HermitianMatrix.identity(Algebra.R, 3)
        assert remainder.apply(x) == HermitianMatrix.diag(Algebra.R, [-2, 0, 0])

    def test_from_values_with_a_derivation(self):
        layout = UnknownLayout(2, Algebra.H)
        values = [Fraction(0)] * layout.size
        values[layout.h_size] = Fraction(2)
        hypothesis = DecompositionHypothesis.from_values(layout, values)
        assert all(x.is_zero() for row in hypothesis.h for x in row)
        assert hypothesis.derivation is not None
        expected = derivation_lift(OctonionDerivation.standard_basis(Algebra.H)[0], 2).scaled(2)
        j = HurwitzScalar.unit(Algebra.H, 3)
        x = HermitianMatrix.unit_matrix(Algebra.H, 2, 0, 1, j)
        assert hypothesis.lie_part().apply(x) == expected.apply(x)

    def test_feasible_lp_carries_a_hypothesis(self):
        outcome = attempt_decomposition_lp(trace_identity(3, Algebra.R), 3, Algebra.R, random_pairs=5, seed=6)
        assert outcome.hypothesis is not None
        assert outcome.hypothesis.derivation is None
        assert outcome.hypothesis.remainder(trace_identity(3, Algebra.R)).dim == 6


class TestStructuredFamily:
    @pytest.mark.parametrize("algebra", [Algebra.C, Algebra.H, Algebra.O])
    def test_identity_over_every_unit(self, algebra):
        b = ExoticGenerator(3, algebra)
        units = [HurwitzScalar.unit(algebra, k) for k in range(1, algebra.dim + 1)]
        for x in units + [-x for x in units]:
            for subset in ((), (2,), (3,), (2, 3)):
                u, v = structured_vectors(3, subset, x)
                assert adjoint_dot(u, b(rank_one(u)).apply(v)) == HurwitzScalar.real(algebra, -15)
