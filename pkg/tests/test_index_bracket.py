import pytest
from hypothesis import given, strategies as st

from genjacobi.free_algebra import FreeExpr, nested_commutator
from genjacobi.index_bracket import (LabelError, Permutation, PositionError, TupleSum,
                                     bracket_apply, canonical_labels, cyclic_sum,
                                     full_positions, instantiate, reversed_tail_term, tau_perm)


def single(*labels):
    return TupleSum.singleton(labels)


def test_two_position_bracket_swaps():
    assert str(bracket_apply(single("i", "j"), (1, 2))) == "+ (i,j) - (j,i)"


def test_three_position_bracket():
    ts = bracket_apply(single("i", "j", "k"), (1, 2, 3))
    assert ts == single("i", "j", "k") - single("i", "k", "j") - single("j", "k", "i") \
        + single("k", "j", "i")


def test_bracket_of_words_gives_nested_commutator():
    for p in range(2, 6):
        labels = canonical_labels(p)
        gens = {x: FreeExpr.generator("A", k) for k, x in enumerate(labels, 1)}
        ts = bracket_apply(TupleSum.singleton(labels), full_positions(p))

        def word(t):
            out = FreeExpr.unit()
            for x in t:
                out = out * gens[x]
            return out

        assert instantiate(ts, word) == nested_commutator([gens[x] for x in labels])


def test_partial_positions_leave_other_slots():
    ts = bracket_apply(single("a", "b", "c"), (2, 3))
    assert ts == single("a", "b", "c") - single("a", "c", "b")


def test_position_errors():
    with pytest.raises(PositionError):
        bracket_apply(single("a", "b"), (1,))
    with pytest.raises(PositionError):
        bracket_apply(single("a", "b"), (1, 1))
    with pytest.raises(PositionError):
        bracket_apply(single("a", "b"), (1, 3))
    with pytest.raises(LabelError):
        cyclic_sum(single("a", "b"), ("a", "a"))


def test_tau_cycle():
    tau = tau_perm((1, 3, 4), 4)
    assert tau.image == (3, 2, 4, 1)
    assert tau.compose(tau.inverse()) == Permutation((1, 2, 3, 4))


def test_cyclic_sum_examples():
    assert cyclic_sum(single("i", "j"), ("i", "j")) == single("i", "j") + single("j", "i")
    three = cyclic_sum(single("i", "j", "k"), ("i", "j", "k"))
    assert len(three) == 3


def test_reversed_tail_term():
    assert reversed_tail_term(3) == single("i1", "i2", "i3") - single("i1", "i3", "i2")
    assert reversed_tail_term(4) == single("i1", "i2", "i3", "i4") + single("i1", "i4", "i3", "i2")


def test_repeated_labels_are_allowed():
    ts = bracket_apply(single("a", "a"), (1, 2))
    assert ts.is_zero()


labels3 = st.permutations(["i", "j", "k"])


@given(labels3, st.integers(-3, 3))
def test_bracket_is_linear(tup, c):
    base = single(*tup)
    assert bracket_apply(base * c, (1, 2, 3)) == bracket_apply(base, (1, 2, 3)) * c


@given(st.lists(st.tuples(st.permutations(["i", "j", "k", "l"]), st.integers(-2, 2)),
                max_size=4))
def test_bracket_commutes_with_cyclic_relabeling(pairs):
    ts = TupleSum({tuple(t): c for t, c in pairs}, 4)
    cyc = ("i", "j", "k", "l")
    pos = (1, 2, 3, 4)
    assert cyclic_sum(bracket_apply(ts, pos), cyc) == bracket_apply(cyclic_sum(ts, cyc), pos)


@given(st.integers(2, 5))
def test_full_bracket_coefficients_sum_to_zero(p):
    ts = bracket_apply(TupleSum.singleton(canonical_labels(p)), full_positions(p))
    assert ts.coefficient_sum() == 0
    assert len(ts) == 2 ** (p - 1)
