import pytest
from hypothesis import given, strategies as st

from genjacobi.free_algebra import ArityError, FreeExpr, commutator, nested_commutator


def gen(k):
    return FreeExpr.generator("A", k)


def exprs():
    word = st.lists(st.integers(1, 3), max_size=3).map(
        lambda ks: FreeExpr.word([next(iter(gen(k).terms()))[0][0] for k in ks]))
    return st.lists(st.tuples(word, st.integers(-3, 3)), max_size=4).map(
        lambda pairs: sum((w * c for w, c in pairs), FreeExpr.zero()))


def test_commutator_expansion():
    a, b = gen(1), gen(2)
    assert str(commutator(a, b)) == "A1A2 - A2A1"
    assert commutator(a, a).is_zero()


def test_nested_commutator_word_count():
    e = nested_commutator([gen(k) for k in range(1, 5)])
    assert len(e) == 8
    assert all(abs(c) == 1 for _, c in e.terms())


def test_nested_commutator_needs_two_entries():
    with pytest.raises(ArityError):
        nested_commutator([gen(1)])


def test_classical_jacobi_identity():
    a, b, c = gen(1), gen(2), gen(3)
    total = (commutator(a, commutator(b, c)) + commutator(b, commutator(c, a))
             + commutator(c, commutator(a, b)))
    assert total.is_zero()


@given(exprs(), exprs(), exprs())
def test_jacobi_on_random_expressions(a, b, c):
    total = (commutator(a, commutator(b, c)) + commutator(b, commutator(c, a))
             + commutator(c, commutator(a, b)))
    assert total.is_zero()


@given(exprs(), exprs(), exprs())
def test_associativity_and_distributivity(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert commutator(a, b) == -commutator(b, a)
