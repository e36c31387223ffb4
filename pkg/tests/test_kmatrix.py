import json

import pytest

from gwpairs.algebra import ONE, I, Q, S1, S2, S3, ULaurent
from gwpairs.caps import degree_one_data
from gwpairs.kmatrix import (
    CorrMatrixK,
    SingularLeadingMatrix,
    VertexMatrixPair,
    check_structure,
    extend_by_part_one,
    iu_power,
    top_block_invertible,
    top_block_fixtures,
    seed_entries,
    solve_row,
)
from gwpairs.partitions import Partition

P = Partition


@pytest.fixture(scope="module")
def K4():
    return extend_by_part_one(seed_entries(), 4)


def test_iu_power():
    assert iu_power(0) == ULaurent.one()
    assert iu_power(-1) == ULaurent.monomial(-I, -1)
    assert iu_power(2) == ULaurent.monomial(-ONE, 2)


def test_extended_rows(K4):
    assert K4.rows >= {P((1,)), P((2,)), P((1, 1)), P((2, 1)), P((1, 1, 1)), P((2, 1, 1)), P((1, 1, 1, 1))}
    assert K4.get((1, 1), (1, 1)) == ULaurent.one()
    assert K4.get((1, 1), (1,)) == ULaurent.zero()
    # tau_0 * hat(2) - s1 s2 s3 Phi(hat(2)) picks up the (1) column
    assert K4.get((2, 1), (1,)) == ULaurent.monomial(S1 * S2 * S3 * I, -1)
    assert K4.get((2, 1), (2, 1)) == ULaurent.monomial(-I, -1)
    assert K4.max_degree == 4


def test_missing_row_raises(K4):
    with pytest.raises(KeyError):
        K4.row((3,))


def test_structure_passes(K4):
    assert check_structure(K4) == []


@pytest.mark.parametrize(
    "alpha,ahat,value,rule",
    [
        ((2,), (2,), ULaurent.monomial(I, -1), "diagonal"),
        ((2, 1), (2,), ULaurent.monomial(S1 + S2 + S3, 0), "equal-rank"),
        ((2,), (1,), ULaurent.monomial(S1 * S1 / I, -1), "symmetry"),
        ((2,), (1,), ULaurent.monomial((S1 + S2 + S3) * Q, -1), "polynomial"),
        ((2,), (1,), ULaurent.monomial((S1 + S2 + S3) ** 2, -1), "homogeneity"),
        ((1, 1), (1,), ULaurent.monomial(S1 + S2 + S3, 0), "vanishing-region"),
        ((2, 1), (2, 2), ULaurent.monomial(ONE, 0), "size"),
        ((2, 1), (3,), ULaurent.monomial(ONE, 0), "lower-order"),
    ],
)
def test_planted_mutations_are_flagged(K4, alpha, ahat, value, rule):
    bad = K4.with_entry(alpha, ahat, value)
    rules = {v.rule for v in check_structure(bad)}
    assert rule in rules


def test_json_round_trip(K4):
    again = CorrMatrixK.from_json(json.loads(K4.dumps()))
    assert again.rows == K4.rows
    for a in K4.rows:
        assert again.row(a) == K4.row(a)
    assert K4.dumps() == again.dumps()


def test_solver_recovers_k21():
    cp, cgw = degree_one_data(12)
    pair = VertexMatrixPair(d=1, c_p=cp, c_gw=cgw)
    known = {P((2,)): ULaurent.monomial(ONE / I, -1), P((1, 1)): ULaurent.zero()}
    row = solve_row((2,), pair, 10, known=known, unknowns=[P((1,))])
    assert row[P((1,))] == ULaurent.monomial((S1 + S2 + S3) / I, -1)


def test_solver_detects_singular_block():
    cp, cgw = degree_one_data(8)
    cgw = {k: (ULaurent.zero() if k[0] == P((1,)) else v) for k, v in cgw.items()}
    pair = VertexMatrixPair(d=1, c_p=cp, c_gw=cgw)
    with pytest.raises(SingularLeadingMatrix):
        solve_row((2,), pair, 6, known={P((2,)): ULaurent.monomial(ONE / I, -1)}, unknowns=[P((1,))])


def test_top_degree_block_invertible():
    fx = top_block_fixtures()
    assert top_block_invertible(fx[1], 1)
    assert top_block_invertible(fx[2], 2)
    singular = dict(fx[2])
    singular[(P((1, 1)), P((1, 1)))] = ONE * 0
    assert not top_block_invertible(singular, 2)
