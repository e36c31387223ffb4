import math

import pytest
from sympy.functions.combinatorial.numbers import partition as npartitions

from gwpairs.algebra import ONE, Q, S1, S2, S3, RatFunc, ULaurent
from gwpairs.assembly import (
    ClosedFormCapProvider,
    Edge,
    IsolatedDescendentError,
    KroneckerEdgeProvider,
    Leg,
    MarkingError,
    ToricGraph,
    UnsupportedInput,
    Vertex,
    assemble,
    degenerate_combine,
    degeneration_kernel,
    enumerate_markings,
    gluing_GW,
    gluing_P,
)
from gwpairs.partitions import Partition, partitions_up_to

A = Vertex("a", (S1, S2, S3))
B = Vertex("b", (-S1, S2, S3 + S1))


def two_vertex():
    return ToricGraph([A, B], [Edge("e", "a", 2, "b", 2, (("C", 1),))])


def chain():
    c = Vertex("c", (S1, -S2, S3 + S2))
    return ToricGraph(
        [A, B, c],
        [Edge("e", "a", 2, "b", 2, (("C", 1),)), Edge("f", "a", 1, "c", 1, (("D", 1),))],
    )


def test_gluing_values():
    assert gluing_P(A, 2, (1,)) == S1 * S2 / Q
    assert gluing_P(A, 2, (2,)) == -2 * S1 * S2 / Q**2
    assert gluing_P(A, 0, (1, 1)) == 2 * (S2 * S3) ** 2 / Q**2
    assert gluing_GW(A, 2, (1,)) == ULaurent.monomial(S1 * S2, 2)
    assert gluing_GW(A, 2, (2, 1)) == ULaurent.monomial(2 * (S1 * S2) ** 2, 4)


@pytest.mark.parametrize("lam", partitions_up_to(4))
def test_gluing_ratio(lam):
    sign = (-1) ** (lam.size - lam.length)
    for slot in range(3):
        gw = gluing_GW(A, slot, lam)
        pt = gluing_P(A, slot, lam)
        assert gw == ULaurent.monomial(pt * Q**lam.size * sign, 2 * lam.length)


@pytest.mark.parametrize("d", range(0, 6))
def test_marking_counts_single_edge(d):
    assert len(enumerate_markings(two_vertex(), {"C": d})) == npartitions(d) ** 2


@pytest.mark.parametrize("c,d", [(1, 1), (2, 1), (2, 3), (3, 2)])
def test_marking_counts_product(c, d):
    assert len(enumerate_markings(chain(), {"C": c, "D": d})) == (npartitions(c) * npartitions(d)) ** 2


def test_bad_classes():
    with pytest.raises(MarkingError):
        enumerate_markings(two_vertex(), {"X": 1})
    with pytest.raises(MarkingError):
        enumerate_markings(two_vertex(), {"C": -1})
    with pytest.raises(MarkingError):
        ToricGraph([A, B], [Edge("e", "a", 2, "b", 2, (("C", 1),)), Edge("f", "a", 2, "b", 1, (("C", 1),))])


@pytest.mark.parametrize("mu", partitions_up_to(4))
def test_degeneration_kernels(mu):
    z = mu.z()
    assert degeneration_kernel(mu, "gw") == ULaurent.monomial(RatFunc.const(z), 2 * mu.length)
    assert degeneration_kernel(mu, "pt") == Q ** (-mu.size) * ((-1) ** (mu.size - mu.length) * z)


def test_degenerate_combine_with_trivial_table():
    z1 = {mu: Q**mu.size * (k + 1) for k, mu in enumerate(partitions_up_to(3))}
    trivial = {mu: degeneration_kernel(mu, "pt").inverse() for mu in z1}
    total = degenerate_combine(z1, trivial, "pt")
    assert total == sum((v for v in z1.values()), RatFunc.const(0))
    with pytest.raises(MarkingError):
        degenerate_combine(z1, {(1,): ONE}, "pt")


def test_kronecker_assembly():
    prov = KroneckerEdgeProvider(lambda v, desc, lams, theory: Q ** sum(l.size for l in lams))
    value = assemble(two_vertex(), {}, {"C": 2}, prov, "pt")
    # (2): G = -2 s1 s2/q^2 at a and +2 s1 s2/q^2 at b; (1,1): 2 (s1 s2)^2/q^2 at each
    assert value == 4 * (S1 * S2) ** 4 - 4 * (S1 * S2) ** 2


def test_assembly_is_thread_count_independent():
    prov = KroneckerEdgeProvider(lambda v, desc, lams, theory: Q ** sum(l.size for l in lams))
    one = assemble(chain(), {}, {"C": 2, "D": 1}, prov, "pt", threads=1)
    many = assemble(chain(), {}, {"C": 2, "D": 1}, prov, "pt", threads=4)
    assert one == many


def test_closed_form_provider():
    value = assemble(two_vertex(), {}, {"C": 1}, ClosedFormCapProvider(), "pt")
    # tube (1) at each end: q/(w1 w2) times gluing w1 w2 / q
    assert value == ONE
    with pytest.raises(UnsupportedInput):
        assemble(two_vertex(), {"a": Partition((2,))}, {"C": 1}, ClosedFormCapProvider(), "pt")


def test_descendent_on_isolated_vertex_is_rejected():
    g = ToricGraph([A, B], [Edge("e", "a", 2, "b", 2, (("C", 1),))])
    prov = KroneckerEdgeProvider(lambda *args: ONE)
    with pytest.raises(IsolatedDescendentError):
        assemble(g, {"a": Partition((2,))}, {"C": 0}, prov, "pt")


def test_legs_are_fixed_conditions():
    g = ToricGraph([A], [], [Leg("a", 0, Partition((2,)))])
    prov = KroneckerEdgeProvider(lambda v, desc, lams, theory: ONE * math.prod(l.size + 1 for l in lams))
    assert assemble(g, {}, {}, prov, "pt") == ONE * 3
