from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from twistedfock.scalar import I, ONE, ZERO, Cyclo8, Q, qstr

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12).map(Q)
elements = st.lists(rationals, min_size=4, max_size=4).map(Cyclo8)


def test_q_coercions():
    assert Q("3/6") == Q(1, 2)
    assert Q(Fraction(-2, 4)) == Q(-1, 2)
    assert qstr(Q(4, 2)) == "2"
    assert qstr(Q(-3, 9)) == "-1/3"


def test_zeta_is_primitive_eighth_root():
    z = Cyclo8.zeta_power(1)
    assert z ** 8 == ONE
    assert z ** 4 == Cyclo8.rational(-1)
    assert z ** 2 == I
    assert all(z ** k != ONE for k in range(1, 8))


def test_minus_one_power_quarter_steps():
    assert Cyclo8.minus_one_power(Q(1, 2)) == I
    assert Cyclo8.minus_one_power(1) == Cyclo8.rational(-1)
    assert Cyclo8.minus_one_power(Q(-1, 4)) == Cyclo8.zeta_power(-1)
    with pytest.raises(ValueError):
        Cyclo8.minus_one_power(Q(1, 8))


def test_sqrt2_relation():
    # zeta + zeta^-1 = sqrt 2
    s = Cyclo8.zeta_power(1) + Cyclo8.zeta_power(-1)
    assert s * s == Cyclo8.rational(2)


def test_string_round_trip():
    x = Cyclo8((Q(1, 2), -1, 0, Q(7, 3)))
    assert Cyclo8.from_strings(x.to_strings()) == x
    assert x.to_strings() == ["1/2", "-1", "0", "7/3"]


@given(elements, elements, elements)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO


@given(elements)
def test_inverse(a):
    if a:
        assert a * a.inverse() == ONE
        assert a / a == ONE


@given(elements, elements)
def test_hash_consistent_with_eq(a, b):
    if a == b:
        assert hash(a) == hash(b)
    assert hash(a + ZERO) == hash(a)
