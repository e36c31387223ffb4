import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import bell
from sympy.functions.combinatorial.numbers import partition as npartitions
from sympy.utilities.iterables import multiset_partitions

from gwpairs.partitions import (
    Comparison,
    Partition,
    bell_number,
    compare,
    eta_minus,
    eta_plus,
    one_free_partitions_up_to,
    partitions_of,
    partitions_up_to,
    set_partitions,
    sim_class,
)


@pytest.mark.parametrize("n", range(0, 13))
def test_partition_counts(n):
    ps = partitions_of(n)
    assert len(ps) == npartitions(n)
    assert ps == sorted(ps, reverse=True)
    assert len(set(ps)) == len(ps)


def test_partitions_up_to_rejects_zero():
    with pytest.raises(ValueError):
        partitions_up_to(0)


def test_one_free_listing():
    assert one_free_partitions_up_to(4) == [(), (2,), (3,), (4,), (2, 2)]


@pytest.mark.parametrize("n", range(0, 8))
def test_set_partitions_against_sympy(n):
    ours = {frozenset(frozenset(b) for b in sp) for sp in set_partitions(n)}
    assert len(ours) == bell(n) == bell_number(n)
    if n:
        ref = {frozenset(frozenset(b) for b in sp) for sp in multiset_partitions(list(range(1, n + 1)))}
        assert ours == ref


def test_partition_statistics():
    p = Partition.parse("3,1,1")
    assert (p.size, p.length, p.ell_plus) == (5, 3, 1)
    assert p.aut_order() == 2
    assert p.z() == 3 * 2
    assert p.conjugate() == (3, 1, 1)
    assert str(Partition(())) == "()"
    assert Partition.parse("()") == ()
    assert Partition((1, 3, 1)) == (3, 1, 1)


@given(st.lists(st.integers(1, 6), max_size=6))
def test_conjugate_is_involution(parts):
    p = Partition(parts)
    assert p.conjugate().conjugate() == p
    assert p.conjugate().size == p.size


def test_orderings():
    assert compare((2,), (1, 1), "D") is Comparison.GREATER
    assert compare((2, 1), (3,), "D") is Comparison.LESS
    assert compare((3, 1), (2, 2), "D") is Comparison.EQUAL
    assert compare((2, 1), (2, 1, 1), "SIM") is Comparison.EQUIVALENT
    assert compare((2, 1), (3,), "SIM") is Comparison.INCOMPARABLE
    assert compare((2, 1), (3,), "Dstar") is Comparison.GREATER


def test_eta_plus_minus():
    assert eta_plus((), 3) == (3,)
    assert eta_plus((2, 1), 2) == (4, 1)
    assert eta_minus((4, 1)) == (1,)
    with pytest.raises(ValueError):
        eta_plus((1,), 0)


def test_sim_class_size():
    assert sim_class((2,), 4) == [(2,), (2, 1), (2, 1, 1)]
    assert sim_class((), 3) == [(1,), (1, 1), (1, 1, 1)]
    for d in range(1, 7):
        for g in one_free_partitions_up_to(d):
            assert len(sim_class(g, d)) == d - g.size + (0 if not g else 1)
