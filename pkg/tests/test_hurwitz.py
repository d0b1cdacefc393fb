from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conelab.hurwitz import (
    HurwitzScalar,
    OctonionDerivation,
    associator,
    basis_units,
    conj,
    conj_batch,
    derivation_apply,
    inner,
    inverse,
    mul,
    mul_batch,
    re,
    re_mul_batch,
    structure_tensor,
)
from conelab.models import Algebra, AlgebraMismatchError, DomainError, ShapeError

from .strategies import nonzero_scalars, scalars

ALL = list(Algebra)
O = Algebra.O


def f(k: int, algebra: Algebra = O) -> HurwitzScalar:
    return HurwitzScalar.unit(algebra, k)


class TestMultiplicationTable:
    def test_named_products(self):
        assert mul(f(2), f(3)) == f(4)
        assert mul(f(2), f(7)) == -f(8)
        assert mul(f(3), f(7)) == -f(5)

    @pytest.mark.parametrize("algebra", ALL)
    def test_imaginary_units_square_to_minus_one(self, algebra):
        one = HurwitzScalar.one(algebra)
        for unit in basis_units(algebra)[1:]:
            assert mul(unit, unit) == -one

    @pytest.mark.parametrize("algebra", ALL)
    def test_structure_tensor_is_signed_permutation(self, algebra):
        tensor = structure_tensor(algebra)
        assert tensor.shape == (algebra.dim,) * 3
        assert np.all(np.abs(tensor).sum(axis=2) == 1)

    def test_unit_index_is_one_based(self):
        assert HurwitzScalar.unit(Algebra.C, 1) == HurwitzScalar.one(Algebra.C)
        with pytest.raises(DomainError):
            HurwitzScalar.unit(Algebra.C, 3)
        with pytest.raises(DomainError):
            HurwitzScalar.unit(Algebra.R, 0)


class TestIdentities:
    @pytest.mark.parametrize("algebra", ALL)
    @given(data=st.data())
    def test_norm_is_multiplicative(self, algebra, data):
        x, y = data.draw(scalars(algebra)), data.draw(scalars(algebra))
        assert mul(x, y).norm2() == x.norm2() * y.norm2()

    @pytest.mark.parametrize("algebra", ALL)
    @given(data=st.data())
    def test_conjugation_reverses_products(self, algebra, data):
        x, y = data.draw(scalars(algebra)), data.draw(scalars(algebra))
        assert conj(mul(x, y)) == mul(conj(y), conj(x))

    @pytest.mark.parametrize("algebra", [Algebra.R, Algebra.C, Algebra.H])
    @given(data=st.data())
    def test_associative_algebras(self, algebra, data):
        x, y, z = (data.draw(scalars(algebra)) for _ in range(3))
        assert associator(x, y, z).is_zero()

    @given(x=scalars(O), y=scalars(O))
    def test_octonions_are_alternative(self, x, y):
        assert associator(x, x, y).is_zero()
        assert associator(x, y, y).is_zero()

    @given(x=scalars(O), y=scalars(O), z=scalars(O))
    def test_moufang(self, x, y, z):
        assert mul(mul(x, y), mul(z, x)) == mul(mul(x, mul(y, z)), x)

    def test_octonions_are_not_associative(self):
        assert not associator(f(2), f(3), f(5)).is_zero()

    @pytest.mark.parametrize("algebra", ALL)
    @given(data=st.data())
    def test_inverse(self, algebra, data):
        x = data.draw(nonzero_scalars(algebra))
        one = HurwitzScalar.one(algebra)
        assert mul(x, inverse(x)) == one
        assert mul(inverse(x), x) == one

    def test_zero_has_no_inverse(self):
        with pytest.raises(DomainError):
            inverse(HurwitzScalar.zero(Algebra.H))

    @given(x=scalars(Algebra.H), y=scalars(Algebra.H))
    def test_inner_product_matches_coordinates(self, x, y):
        assert inner(x, y) == sum(a * b for a, b in zip(x.coeffs, y.coeffs, strict=True))

    @pytest.mark.parametrize("algebra", ALL)
    @given(data=st.data())
    def test_conjugate_cancellation(self, algebra, data):
        x, y = data.draw(scalars(algebra)), data.draw(scalars(algebra))
        assert mul(x, mul(conj(x), y)) == y * x.norm2()
        assert mul(mul(x, conj(y)), y) == x * y.norm2()

    @pytest.mark.parametrize("algebra", ALL)
    @given(data=st.data())
    def test_inner_product_moves_factors(self, algebra, data):
        x, y, z = (data.draw(scalars(algebra)) for _ in range(3))
        assert inner(mul(x, y), z) == inner(y, mul(conj(x), z)) == inner(x, mul(z, conj(y)))
        assert inner(conj(x), conj(y)) == inner(x, y)

    @pytest.mark.parametrize("algebra", ALL)
    @given(data=st.data())
    def test_real_parts(self, algebra, data):
        x, y, z = (data.draw(scalars(algebra)) for _ in range(3))
        assert re(mul(x, y)) == re(mul(y, x))
        assert re(mul(mul(x, y), z)) == re(mul(x, mul(y, z)))
        assert re(mul(conj(x), mul(mul(x, y), z))) == x.norm2() * re(mul(y, z))


class TestBackends:
    def test_exact_and_float_tags(self):
        exact = HurwitzScalar.from_coeffs(Algebra.C, [1, 2])
        assert exact.is_exact
        assert exact.coeffs == (Fraction(1), Fraction(2))
        mixed = exact * 0.5
        assert not mixed.is_exact
        assert mixed.to_exact().coeffs == (Fraction(1, 2), Fraction(1))

    def test_mismatched_algebras(self):
        with pytest.raises(AlgebraMismatchError):
            mul(f(2), HurwitzScalar.unit(Algebra.H, 2))

    def test_wrong_coordinate_count(self):
        with pytest.raises(ShapeError):
            HurwitzScalar(Algebra.H, (Fraction(1),))

    def test_payload_keeps_rationals(self):
        x = HurwitzScalar.from_coeffs(Algebra.C, [Fraction(1, 3), -2])
        payload = x.to_payload()
        assert payload.coeffs == ["1/3", "-2"]
        assert HurwitzScalar.from_payload(payload) == x

    @pytest.mark.parametrize("algebra", ALL)
    def test_conj_re_inverse_keep_exactness(self, algebra):
        x = HurwitzScalar.from_coeffs(algebra, range(1, algebra.dim + 1))
        assert conj(x).is_exact and inverse(x).is_exact
        assert re(x) == Fraction(1)
        assert conj(x).coeffs[1:] == tuple(-c for c in x.coeffs[1:])
        y = x.to_float()
        assert not conj(y).is_exact and not inverse(y).is_exact
        assert isinstance(re(y), float)

    @pytest.mark.parametrize("algebra", ALL)
    def test_batched_products_agree(self, algebra, rng):
        a = rng.standard_normal((16, algebra.dim))
        b = rng.standard_normal((16, algebra.dim))
        batch = mul_batch(a, b, algebra)
        for i in range(16):
            x = HurwitzScalar.from_coeffs(algebra, a[i], exact=False)
            y = HurwitzScalar.from_coeffs(algebra, b[i], exact=False)
            assert np.allclose(batch[i], mul(x, y).as_array())
        assert np.allclose(re_mul_batch(a, b, algebra), batch[:, 0])
        assert np.allclose(conj_batch(a)[:, 1:], -a[:, 1:])


class TestDerivations:
    def test_standard_basis_size(self):
        assert len(OctonionDerivation.standard_basis(O)) == 21
        assert len(OctonionDerivation.standard_basis(Algebra.H)) == 3

    @pytest.mark.parametrize("index", [0, 5, 11, 20])
    @given(x=scalars(O), y=scalars(O))
    def test_leibniz_rule(self, index, x, y):
        d = OctonionDerivation.standard_basis(O)[index]
        assert d(mul(x, y)) == mul(d(x), y) + mul(x, d(y))

    @given(x=scalars(O))
    def test_derivations_commute_with_conjugation(self, x):
        d = OctonionDerivation.generator(f(3), f(6)) + OctonionDerivation.generator(f(2), f(8))
        assert d(conj(x)) == -d(x)

    def test_equal_generator_pair_is_zero(self):
        d = OctonionDerivation.generator(f(4), f(4))
        assert all(d(u).is_zero() for u in basis_units(O))

    def test_derivations_kill_reals(self):
        d = OctonionDerivation.generator(f(2), f(5))
        assert d(HurwitzScalar.real(O, 7)).is_zero()

    def test_matrix_is_antisymmetric(self):
        m = OctonionDerivation.generator(f(2), f(7)).matrix()
        assert np.allclose(m, -m.T)

    def test_derivations_need_h_or_o(self):
        with pytest.raises(DomainError):
            OctonionDerivation((), Algebra.C)

    def test_apply_rejects_other_algebras(self):
        d = OctonionDerivation.generator(f(2), f(3))
        assert derivation_apply(d, f(5)) == d(f(5))
        with pytest.raises(AlgebraMismatchError):
            derivation_apply(d, f(2, Algebra.H))
