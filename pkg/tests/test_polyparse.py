from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from genjacobi.exactmath import Poly
from genjacobi.polyparse import ParseError, format_poly, parse_poly, variable_names


def x(i, n=2):
    return Poly.variable(i, n)


def test_examples():
    assert parse_poly("x1^2*x2 + 3/2*x2", 2) == x(1) ** 2 * x(2) + Fraction(3, 2) * x(2)
    assert parse_poly("-(x1 - 1)", 2) == -x(1) + 1
    assert parse_poly("  2 * ( x1 + x2 ) ^ 2 ", 2) == 2 * (x(1) + x(2)) ** 2
    assert parse_poly("--x1", 2) == x(1)
    assert parse_poly("x1^0", 2) == Poly.one(2)


def test_two_point_layout_puts_y_first():
    p = parse_poly("y1 - x1", 1, two_point=True)
    assert p == Poly.variable(1, 2) - Poly.variable(2, 2)
    assert variable_names(2, True) == ["y1", "y2", "x1", "x2"]


@pytest.mark.parametrize("text, pos", [
    ("x3", 0),
    ("y1", 0),
    ("x1 x2", 3),
    ("x1 + ", 5),
    ("(x1", 3),
    ("x1^-1", 3),
    ("2/0", 2),
    ("3 $", 2),
    ("", 0),
    ("x0", 0),
])
def test_errors_carry_positions(text, pos):
    with pytest.raises(ParseError) as err:
        parse_poly(text, 2)
    assert err.value.pos == pos


def test_implicit_multiplication_is_rejected():
    with pytest.raises(ParseError):
        parse_poly("2x1", 2)


coeff = st.fractions(min_value=-9, max_value=9, max_denominator=7)


@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coeff, max_size=6),
       st.booleans())
def test_round_trip(terms, two_point):
    n = 1 if two_point else 2
    p = Poly(2, terms)
    assert parse_poly(format_poly(p, n, two_point), n, two_point) == p
