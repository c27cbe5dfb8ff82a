import pytest

from exact.ring import HALF, I, INV_ONE_PLUS_I, ONE, ZERO, DyadicGaussian


def test_canonical_form_strips_common_factors():
    # 2/(1+i)^2 = 2/(2i) = -i
    x = DyadicGaussian(2, 0, 2)
    assert x.fields() == (0, -1, 0)
    assert x == -I


def test_negative_denominator_exponent_multiplies():
    assert DyadicGaussian(1, 0, -2) == DyadicGaussian(0, 2, 0)


def test_zero_has_a_single_representation():
    assert DyadicGaussian(0, 0, 5).fields() == (0, 0, 0)
    assert DyadicGaussian(0, 0, 5) == ZERO


def test_half_and_inverse():
    assert HALF + HALF == ONE
    assert (ONE + I) * INV_ONE_PLUS_I == ONE
    assert INV_ONE_PLUS_I * INV_ONE_PLUS_I == -I * HALF


def test_unit_powers():
    assert I ** 4 == ONE
    assert I.unit_power() == 1
    assert (-ONE).unit_power() == 2
    assert HALF.unit_power() is None
    assert (I ** 3).unit_inverse() == I


def test_unit_inverse_rejects_non_units():
    with pytest.raises(ValueError):
        HALF.unit_inverse()


def test_conjugate():
    assert I.conj() == -I
    assert INV_ONE_PLUS_I.conj() * INV_ONE_PLUS_I == HALF
    assert INV_ONE_PLUS_I.norm_squared() == HALF


def test_to_complex():
    assert HALF.to_complex() == pytest.approx(0.5)
    assert INV_ONE_PLUS_I.to_complex() == pytest.approx(0.5 - 0.5j)
    assert (I * HALF).to_complex() == pytest.approx(0.5j)


def test_is_real():
    assert HALF.is_real()
    assert not INV_ONE_PLUS_I.is_real()


def test_integer_coercion():
    assert ONE + 1 == DyadicGaussian(2)
    assert 3 * I == DyadicGaussian(0, 3)
    assert 1 - HALF == HALF
    assert ONE == 1


def test_json_roundtrip_preserves_fields():
    x = DyadicGaussian(3, -5, 7)
    assert DyadicGaussian.from_json(x.to_json()) == x


def test_negative_power_rejected():
    with pytest.raises(ValueError):
        I ** -1
