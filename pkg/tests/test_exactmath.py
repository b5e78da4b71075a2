from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from genjacobi import exactmath
from genjacobi.exactmath import (DimensionError, Poly, PolyMatrix, ShapeError, dot,
                                 unipotent_inverse)
from genjacobi.prng import LCG, random_poly, random_unipotent

coeffs = st.one_of(st.integers(-20, 20),
                   st.fractions(min_value=-5, max_value=5, max_denominator=6))


def polys(nvars=2, max_exp=3, max_terms=6):
    exps = st.tuples(*[st.integers(0, max_exp)] * nvars)
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(lambda d: Poly(nvars, d))


def x(i, n=2):
    return Poly.variable(i, n)


def test_basic_arithmetic_oracle():
    p = (x(1) + 1) * (x(1) - 1)
    assert p == x(1) ** 2 - 1
    assert p.degree() == 2
    assert (x(1) * x(2)).format() == "x1*x2"
    assert Poly.constant(Fraction(3, 2), 2).format() == "3/2"


def test_zero_coefficients_are_dropped():
    p = Poly(2, {(1, 0): 2, (0, 1): 0})
    assert len(p) == 1
    assert (p - p).is_zero()
    assert (x(1) + Fraction(1, 2)) * 2 == 2 * x(1) + 1


def test_diff_and_evaluate():
    p = x(1) ** 3 * x(2) + 5 * x(2)
    assert p.diff(1) == 3 * x(1) ** 2 * x(2)
    assert p.diff(2) == x(1) ** 3 + 5
    assert p.evaluate([2, Fraction(1, 2)]) == 4 + Fraction(5, 2)


def test_specialize_keeps_variable_count():
    p = x(1) * x(2) + x(2)
    q = p.specialize({1: 3})
    assert q.nvars == 2
    assert q == 4 * x(2)


def test_remap_to_diagonal():
    # p(y, x) = y1 - x1 in two blocks of one variable, then y := x
    p = Poly.variable(1, 2) - Poly.variable(2, 2)
    assert p.remap([1, 1], 1).is_zero()
    q = Poly.variable(1, 2) * Poly.variable(2, 2)
    assert q.remap([1, 1], 1) == Poly.variable(1, 1) ** 2


def test_dimension_errors():
    with pytest.raises(DimensionError):
        x(1, 2) + x(1, 3)
    with pytest.raises(DimensionError):
        Poly.variable(3, 2)
    with pytest.raises(DimensionError):
        x(1).evaluate([1])


@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert p + q == q + p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == Poly.zero(2)


@given(polys(), polys())
def test_leibniz_rule(p, q):
    for i in (1, 2):
        assert (p * q).diff(i) == p.diff(i) * q + p * q.diff(i)


@given(polys(), polys(), st.tuples(coeffs, coeffs))
def test_evaluation_is_a_homomorphism(p, q, pt):
    assert (p * q).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt)
    assert (p + q).evaluate(pt) == p.evaluate(pt) + q.evaluate(pt)


@given(polys())
def test_format_is_deterministic(p):
    assert p.format() == Poly(2, dict(p.terms())).format()


@given(st.integers(0, 2 ** 32))
def test_fast_product_path_matches_dictionary_loop(seed):
    rng = LCG(seed)
    p = random_poly(rng, 3, 6, 9)
    q = random_poly(rng, 3, 6, 9)
    assert len(p) * len(q) >= exactmath._FAST_MIN_WORK
    fast = p * q
    slow: dict = {}
    for e1, c1 in p.terms():
        for e2, c2 in q.terms():
            e = tuple(a + b for a, b in zip(e1, e2))
            slow[e] = slow.get(e, 0) + c1 * c2
    assert fast == Poly(3, slow)


def test_fast_path_declines_fractions():
    p = Poly(1, {(k,): Fraction(1, k + 1) for k in range(80)})
    assert exactmath._batched_products([(p, p)], 1) is None
    sq = p * p
    assert sq.evaluate([1]) == sum(Fraction(1, k + 1) for k in range(80)) ** 2


def test_matrix_products_and_shapes():
    a = PolyMatrix([[1, x(1)], [0, 1]], 2)
    b = PolyMatrix([[1, 0], [x(2), 1]], 2)
    ab = a @ b
    assert ab[0, 0] == 1 + x(1) * x(2)
    assert a @ (x(2), Poly.one(2)) == (x(2) + x(1), Poly.one(2))
    with pytest.raises(ShapeError):
        a @ PolyMatrix([[1, 2, 3]], 2)


@given(st.integers(0, 10 ** 6), st.integers(2, 4), st.booleans())
def test_unipotent_inverse(seed, size, lower):
    m = random_unipotent(LCG(seed), size, 2, 2, 3, lower)
    inv = unipotent_inverse(m)
    assert (m @ inv).is_identity()
    assert (inv @ m).is_identity()


def test_unipotent_inverse_rejects_general_matrix():
    with pytest.raises(ShapeError):
        unipotent_inverse(PolyMatrix([[1, x(1)], [x(2), 1]], 2))


def test_dot_matches_sum_of_products():
    rng = LCG(3)
    ps = [random_poly(rng, 2, 2) for _ in range(4)]
    qs = [random_poly(rng, 2, 2) for _ in range(4)]
    total = Poly.zero(2)
    for p, q in zip(ps, qs):
        total = total + p * q
    assert dot(ps, qs, 2) == total
