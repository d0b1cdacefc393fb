import numpy as np
import pytest
import scipy.linalg

from conelab.hurwitz import HurwitzScalar, OctonionDerivation
from conelab.jordan import HermitianMatrix, jordan_product
from conelab.linmap import (
    ConeMap,
    basis,
    check_lie_condition,
    check_positive,
    check_sv_condition,
    commutator_map,
    derivation_dimension,
    derivation_lift,
    dimension,
    expm,
    from_coords,
    from_function,
    lie_map,
    random_lie_matrix,
    to_coords,
)
from conelab.models import Algebra, DomainError, ShapeError


def neg_trace_identity(n: int, algebra: Algebra) -> ConeMap:
    def action(x: HermitianMatrix) -> HermitianMatrix:
        return HermitianMatrix.identity(algebra, n, x.is_exact).scaled(-x.trace())

    return from_function(action, n, algebra, label="-Tr I")


class TestCoordinates:
    @pytest.mark.parametrize("algebra", list(Algebra))
    def test_basis_is_orthonormal(self, algebra):
        coords = np.array([to_coords(b) for b in basis(3, algebra)])
        assert coords.shape == (dimension(3, algebra),) * 2
        assert np.allclose(coords, np.eye(dimension(3, algebra)))

    def test_dimension(self):
        assert dimension(3, Algebra.O) == 27
        assert dimension(4, Algebra.C) == 16

    def test_round_trip(self, rng):
        x = HermitianMatrix.from_array(Algebra.H, rng.standard_normal((3, 3, 4)))
        assert from_coords(to_coords(x), 3, Algebra.H).allclose(x)


class TestConeMap:
    def test_shape_is_checked(self):
        with pytest.raises(ShapeError):
            ConeMap(Algebra.R, 3, np.eye(5))

    def test_identity_and_composition(self, rng):
        a = lie_map(random_lie_matrix(3, Algebra.C, rng))
        ident = ConeMap.identity(3, Algebra.C)
        assert np.allclose(a.compose(ident).matrix, a.matrix)
        assert np.allclose((a - a).matrix, 0.0)

    def test_exact_action_is_used_for_exact_inputs(self, rng):
        h = random_lie_matrix(3, Algebra.H, rng)
        a = lie_map(h)
        x = HermitianMatrix.diag(Algebra.H, [1, 2, 3])
        assert a.apply(x).is_exact
        assert a.apply(x.to_float()).allclose(a.apply(x))

    def test_payload_drops_the_action(self):
        a = neg_trace_identity(3, Algebra.R)
        back = ConeMap.from_payload(a.to_payload())
        assert back.action is None
        assert np.allclose(back.matrix, a.matrix)

    def test_expm_of_zero_is_identity(self):
        assert np.allclose(expm(ConeMap.zero(3, Algebra.C), 2.0).matrix, np.eye(dimension(3, Algebra.C)))

    def test_expm_semigroup_law(self, rng):
        a = lie_map(random_lie_matrix(3, Algebra.C, rng, scale=1))
        for s, t in [(0.3, 0.7), (1.0, 2.5)]:
            joined = expm(a, s).compose(expm(a, t))
            assert np.allclose(expm(a, s + t).matrix, joined.matrix, rtol=1e-9, atol=1e-9)

    @pytest.mark.parametrize("algebra", [Algebra.R, Algebra.C])
    def test_expm_of_lie_map_is_a_congruence(self, algebra, rng):
        def as_complex(arr):
            return arr[..., 0] + 1j * arr[..., 1] if algebra is Algebra.C else arr[..., 0].astype(complex)

        for n in (3, 4):
            h = random_lie_matrix(n, algebra, rng, scale=1)
            e = scipy.linalg.expm(as_complex(np.array([[c.as_array() for c in row] for row in h])))
            x = HermitianMatrix.from_array(algebra, rng.standard_normal((n, n, algebra.dim)))
            got = as_complex(expm(lie_map(h)).apply(x).as_array())
            assert np.allclose(got, e @ as_complex(x.as_array()) @ e.conj().T, rtol=1e-8, atol=1e-8)

    def test_lie_map_formula(self):
        one = HurwitzScalar.one(Algebra.R)
        zero = HurwitzScalar.zero(Algebra.R)
        h = [[one, one], [zero, zero]]
        x = HermitianMatrix.identity(Algebra.R, 2)
        # HX + XH^T with H = [[1, 1], [0, 0]]
        expected = HermitianMatrix.from_entries(Algebra.R, [[one * 2, one], [one, zero]])
        assert lie_map(h).apply(x) == expected

    def test_octonion_lie_map_needs_real_trace(self):
        f2 = HurwitzScalar.unit(Algebra.O, 2)
        zero = HurwitzScalar.zero(Algebra.O)
        h = [[f2, zero, zero], [zero, zero, zero], [zero, zero, zero]]
        with pytest.raises(DomainError):
            lie_map(h)

    def test_commutator_map_is_a_derivation(self, rng):
        y = HermitianMatrix.from_array(Algebra.C, rng.standard_normal((3, 3, 2)))
        z = HermitianMatrix.from_array(Algebra.C, rng.standard_normal((3, 3, 2)))
        d = commutator_map(y, z)
        x = HermitianMatrix.from_array(Algebra.C, rng.standard_normal((3, 3, 2)))
        w = HermitianMatrix.from_array(Algebra.C, rng.standard_normal((3, 3, 2)))
        lhs = d.apply(jordan_product(x, w))
        rhs = jordan_product(d.apply(x), w) + jordan_product(x, d.apply(w))
        assert lhs.allclose(rhs, atol=1e-8)

    def test_derivation_lift_is_a_derivation(self):
        f = [HurwitzScalar.unit(Algebra.O, k) for k in range(1, 9)]
        lift = derivation_lift(OctonionDerivation.generator(f[1], f[4]), 3)
        x = HermitianMatrix._from_upper(
            Algebra.O, 3, lambda l, m: f[l + m] if l != m else f[0] * (l + 1)  # noqa: E741
        )
        w = HermitianMatrix._from_upper(
            Algebra.O, 3, lambda l, m: f[7 - l - m] if l != m else f[0]  # noqa: E741
        )
        lhs = lift.apply(jordan_product(x, w))
        rhs = jordan_product(lift.apply(x), w) + jordan_product(x, lift.apply(w))
        assert lhs == rhs


class TestCheckers:
    @pytest.mark.parametrize("algebra", [Algebra.R, Algebra.C, Algebra.H])
    def test_lie_maps_pass_the_lie_check(self, algebra, rng):
        a = lie_map(random_lie_matrix(3, algebra, rng))
        report = check_lie_condition(a, 1000, seed=5, threads=2)
        assert report.passed
        assert abs(report.min_value) < 1e-9

    def test_lie_check_with_derivation_part(self, rng):
        f = [HurwitzScalar.unit(Algebra.O, k) for k in range(1, 9)]
        h = [[f[0] * int(rng.integers(-3, 4)) for _ in range(3)] for _ in range(3)]
        a = lie_map(h, OctonionDerivation.generator(f[2], f[6]))
        assert check_lie_condition(a, 500, seed=5).passed

    def test_exotic_generator_fails_the_lie_check(self, b3):
        report = check_lie_condition(b3.cone_map, 1000, seed=5)
        assert not report.passed
        assert report.witness is not None

    def test_sv_failure_carries_a_witness(self):
        report = check_sv_condition(neg_trace_identity(3, Algebra.C), 500, seed=2)
        assert not report.passed
        assert report.min_value == pytest.approx(-1.0)
        assert report.witness is not None
        assert report.witness.value == pytest.approx(-1.0)

    def test_identity_is_positive(self):
        assert check_positive(ConeMap.identity(3, Algebra.H), 500, seed=2).passed

    def test_results_do_not_depend_on_thread_count(self, b3):
        a = b3.cone_map
        one = check_sv_condition(a, 10_000, seed=9, threads=1)
        many = check_sv_condition(a, 10_000, seed=9, threads=4)
        assert one.min_value == many.min_value


class TestDerivationDimension:
    @pytest.mark.parametrize(
        ("space", "expected"),
        [("R", 0), ("C", 0), ("H", 3), ("O", 14), ("H3R", 3), ("H3C", 8), ("H3H", 21), ("H3O", 52)],
    )
    def test_known_dimensions(self, space, expected):
        assert derivation_dimension(space) == expected

    @pytest.mark.parametrize("space", ["X", "H4O", "H3Q"])
    def test_bad_spaces(self, space):
        with pytest.raises(DomainError):
            derivation_dimension(space)
