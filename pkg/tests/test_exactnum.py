from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from flatblock.exactnum import (
    QQ,
    FieldMismatch,
    algebraic_field,
    approx_sequence,
    common_field,
    continued_fraction,
    cos_field,
    floor,
    is_rational_ratio,
    make_field,
    tan_field,
    window_sequence,
)

SQRT2 = make_field([-2, 0, 1], (Fraction(141, 100), Fraction(142, 100)))
r2 = SQRT2.gen()

fracs = st.fractions(min_value=-50, max_value=50, max_denominator=30)


def test_sqrt2_arithmetic():
    assert r2 * r2 == 2
    assert (1 + r2) * (r2 - 1) == 1
    assert (1 + r2).inverse() == r2 - 1
    assert r2 > Fraction(1414, 1000) and r2 < Fraction(1415, 1000)
    assert floor(10 * r2) == 14
    assert floor(-r2) == -2


def test_sign_of_tiny_difference():
    # 99/70 is a convergent of sqrt(2): the difference is about 7e-5
    assert r2 - Fraction(99, 70) < 0
    assert r2 - Fraction(140, 99) > 0


def test_continued_fraction_sqrt2():
    assert continued_fraction(r2, 6) == [1, 2, 2, 2, 2, 2]


def test_golden_ratio_field():
    F, phi = algebraic_field((1 + sympy.sqrt(5)) / 2)
    assert phi * phi == phi + 1
    assert continued_fraction(phi, 5) == [1, 1, 1, 1, 1]


def test_cos_and_tan_fields():
    F, t = cos_field(5)
    assert t * t == t + 1  # 2cos(pi/5) is the golden ratio
    F3, s3 = tan_field(3)
    assert s3 * s3 == 3


def test_common_field_degree_four():
    F, (a, b) = common_field(sympy.sqrt(2), (1 + sympy.sqrt(5)) / 2)
    assert F.degree == 4
    assert a * a == 2
    assert b * b == b + 1
    assert abs(float(a) - 2 ** 0.5) < 1e-12


def test_common_field_rationals_only():
    F, vals = common_field(sympy.Rational(3, 2), 2)
    assert F is QQ
    assert vals == [QQ(Fraction(3, 2)), QQ(2)]


def test_mixing_fields_is_an_error():
    F, phi = algebraic_field((1 + sympy.sqrt(5)) / 2)
    with pytest.raises(FieldMismatch):
        SQRT2(phi)


def test_is_rational_ratio():
    assert is_rational_ratio(3 * r2, 2 * r2) == Fraction(3, 2)
    assert is_rational_ratio(1 + r2, r2) is None


def test_approx_sequence_window_and_growth():
    seq = approx_sequence(SQRT2(1), r2, SQRT2(1), 12)
    assert len(seq) == 12
    qs = [pr.q for pr in seq]
    assert qs == sorted(set(qs))
    for pr in seq:
        d = pr.p * r2 - pr.q
        assert -1 < d < 1
        assert pr.defect == d


def test_approx_sequence_rational_widths():
    seq = approx_sequence(QQ(2), QQ(3), QQ(1), 3)
    assert [(pr.p, pr.q) for pr in seq] == [(2, 3), (4, 6), (6, 9)]


def test_window_sequence_offset_window():
    # window not containing 0: alpha q - beta p in ]1/4, 1/2[
    seq = window_sequence(r2, SQRT2(1), SQRT2(Fraction(1, 4)), SQRT2(Fraction(1, 2)), 8)
    assert len(seq) == 8
    for pr in seq:
        v = pr.q * r2 - pr.p
        assert Fraction(1, 4) < v < Fraction(1, 2)


@given(fracs, fracs, fracs)
@settings(max_examples=60, deadline=None)
def test_field_ops_match_fractions_on_rationals(a, b, c):
    x, y, z = SQRT2(a), SQRT2(b), SQRT2(c)
    assert (x + y) * z == SQRT2(a * c + b * c)
    assert (x - y).to_fraction() == a - b
    if b:
        assert (x / y).to_fraction() == a / b
    assert (x < y) == (a < b)


@given(fracs, fracs)
@settings(max_examples=60, deadline=None)
def test_inverse_in_sqrt2(a, b):
    x = a + b * r2
    if x:
        assert x * x.inverse() == 1
        assert float(x.inverse()) == pytest.approx(1 / float(x), rel=1e-9)
