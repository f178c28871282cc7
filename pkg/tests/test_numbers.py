from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from chernmoser.errors import IrrationalScalingError, ValidationError
from chernmoser.numbers import (GaussianRational, format_q, gauss_sqrt, gr, mat_eq, mat_identity,
                                mat_inverse, mat_mul, parse_q, q_sqrt, sum_of_two_squares, to_q)

rats = st.fractions(max_denominator=50).map(lambda f: mpq(f.numerator, f.denominator))
gauss = st.builds(GaussianRational, rats, rats)


def test_format_is_always_p_over_q():
    assert format_q(3) == "3/1"
    assert format_q(mpq(-6, 4)) == "-3/2"
    assert format_q(0) == "0/1"


@pytest.mark.parametrize("bad", ["2/4", "3", "1.5", "-0/1", "0/2", "1/-2", " 1/2", "1/0"])
def test_strict_parser_rejects_noncanonical(bad):
    with pytest.raises(ValidationError):
        parse_q(bad)


def test_lenient_parser():
    assert parse_q("2/4", strict=False) == mpq(1, 2)
    assert parse_q("3", strict=False) == 3


def test_floats_refused():
    with pytest.raises(TypeError):
        to_q(0.5)
    assert to_q(Fraction(1, 3)) == mpq(1, 3)


@given(rats)
def test_rational_round_trip(x):
    s = format_q(x)
    assert parse_q(s) == x
    assert format_q(parse_q(s)) == s


@given(gauss, gauss, gauss)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a * a.conj()).im == 0
    if b:
        assert (a / b) * b == a


@given(gauss)
def test_gauss_sqrt_of_square(x):
    r = gauss_sqrt(x * x)
    assert r * r == x * x
    assert r.re >= 0


def test_roots():
    assert q_sqrt(mpq(9, 4)) == mpq(3, 2)
    with pytest.raises(IrrationalScalingError) as ei:
        q_sqrt(3)
    assert ei.value.radicand == "3/1"
    assert gauss_sqrt(gr(0, 2)) == gr(1, 1)
    with pytest.raises(IrrationalScalingError):
        gauss_sqrt(gr(2))


@pytest.mark.parametrize("x", [1, 2, 5, mpq(25, 4), 13, mpq(1, 2)])
def test_sum_of_two_squares(x):
    c = sum_of_two_squares(x)
    assert c.abs2() == x


def test_sum_of_two_squares_impossible():
    with pytest.raises(IrrationalScalingError):
        sum_of_two_squares(3)


def test_matrix_inverse():
    A = [[gr(1, 1), gr(2)], [gr(0, -1), gr(3, 1)]]
    assert mat_eq(mat_mul(A, mat_inverse(A)), mat_identity(2))
    with pytest.raises(ZeroDivisionError):
        mat_inverse([[gr(1), gr(2)], [gr(2), gr(4)]])
