from fractions import Fraction
from random import Random

import pytest

from vshstools.scalars import (I, ONE, ZERO, Scalar, format_scalar,
                               parse_scalar, sqrt_exact)


def test_construction_and_equality():
    assert Scalar(3) == Scalar(Fraction(3))
    assert Scalar(1, 2) != Scalar(1)
    assert Scalar.of(Fraction(1, 2)).re == Fraction(1, 2)
    assert Scalar.of(ONE) is not None


def test_field_axioms_spot():
    rng = Random(0)
    for _ in range(200):
        a = Scalar(Fraction(rng.randint(-9, 9), rng.randint(1, 5)),
                   Fraction(rng.randint(-9, 9), rng.randint(1, 5)))
        b = Scalar(Fraction(rng.randint(-9, 9), rng.randint(1, 5)),
                   Fraction(rng.randint(-9, 9), rng.randint(1, 5)))
        assert a + b == b + a
        assert a * b == b * a
        assert a * (b + ONE) == a * b + a
        if not b.is_zero():
            assert (a / b) * b == a


def test_i_arithmetic():
    assert I * I == Scalar(-1)
    assert Scalar.i_power(0) == ONE
    assert Scalar.i_power(1) == I
    assert Scalar.i_power(2) == Scalar(-1)
    assert Scalar.i_power(3) == -I
    assert Scalar.i_power(-1) == -I
    assert Scalar.i_power(7) == Scalar.i_power(3)


def test_inverse_and_conjugate():
    z = Scalar(Fraction(3), Fraction(-4))
    assert z * z.inverse() == ONE
    assert z.conjugate() == Scalar(3, 4)
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_powers():
    z = Scalar(2, 1)
    assert z ** 0 == ONE
    assert z ** 3 == z * z * z
    assert z ** -2 == (z * z).inverse()


def test_predicates():
    assert ZERO.is_zero() and not ONE.is_zero()
    assert Scalar(5).is_integer()
    assert not Scalar(1, 1).is_real()
    assert not Scalar(Fraction(1, 2)).is_integer()


def test_format_parse_roundtrip():
    rng = Random(1)
    for _ in range(100):
        z = Scalar(Fraction(rng.randint(-20, 20), rng.randint(1, 7)),
                   Fraction(rng.randint(-20, 20), rng.randint(1, 7)))
        assert parse_scalar(format_scalar(z)) == z
    assert format_scalar(ZERO) == "0"
    assert parse_scalar("-5*i") == Scalar(0, -5)
    assert parse_scalar("1/2+3/4*i") == Scalar(Fraction(1, 2),
                                               Fraction(3, 4))


def test_sqrt_exact():
    assert sqrt_exact(Scalar(Fraction(9, 4))) == Scalar(Fraction(3, 2))
    assert sqrt_exact(Scalar(2)) is None
    root = sqrt_exact(Scalar(0, 2))  # sqrt(2i) = 1+i
    assert root is not None and root * root == Scalar(0, 2)


def test_foreign_operand_rejected():
    with pytest.raises(TypeError):
        ONE + "x"
