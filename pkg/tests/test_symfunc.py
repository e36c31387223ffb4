import math
from fractions import Fraction

import pytest
import sympy

from gwpairs.partitions import Partition, one_free_partitions_up_to, partitions_of
from gwpairs.symfunc import (
    QHALF,
    XLaurent,
    block_matrix,
    charsum_lhs,
    charsum_rhs,
    field_det,
    field_rank,
    geq_order,
    h_qrho,
    jm_trace_oracle,
    mn_character,
    plus_matrix,
    schur_hook_content,
    skew_schur_qrho,
    theta_blocks,
    vandermonde_block,
    vertex_pair_matrix,
)


def frobenius_character(lam, mu):
    """chi^lam(mu) as the coefficient of x^(lam+delta) in a_delta * p_mu."""
    n = len(lam) or 1
    xs = sympy.symbols(f"x0:{n}")
    lam = list(lam) + [0] * (n - len(lam))
    a_delta = sympy.Matrix(n, n, lambda i, j: xs[j] ** (n - 1 - i)).det()
    p = sympy.Integer(1)
    for m in mu:
        p *= sum(x**m for x in xs)
    poly = sympy.Poly(sympy.expand(a_delta * p), *xs)
    return poly.coeff_monomial(tuple(lam[i] + n - 1 - i for i in range(n)))


@pytest.mark.parametrize("n", range(1, 6))
def test_mn_against_frobenius(n):
    for lam in partitions_of(n):
        for mu in partitions_of(n):
            assert mn_character(lam, mu) == frobenius_character(lam, mu), (lam, mu)


@pytest.mark.parametrize("n", range(1, 8))
def test_character_orthogonality(n):
    ps = partitions_of(n)
    assert sum(mn_character(l, (1,) * n) ** 2 for l in ps) == math.factorial(n)
    for mu in ps:
        for nu in ps:
            s = sum(mn_character(l, mu) * mn_character(l, nu) for l in ps)
            assert s == (Partition(mu).z() if mu == nu else 0)


def _e_qrho(k):
    # e_k from h via sum_i (-1)^i e_i h_{k-i} = 0
    es = [QHALF.one]
    for m in range(1, k + 1):
        es.append(sum(((-1) ** (i + 1) * es[m - i] * h_qrho(i) for i in range(1, m + 1)), QHALF.zero))
    return es[k]


def dual_jacobi_trudi(lam, mu):
    lt, mt = Partition(lam).conjugate(), Partition(mu).conjugate()
    n = len(lt)
    if n == 0:
        return QHALF.one
    mp = tuple(mt) + (0,) * (n - len(mt))
    rows = [[_e_qrho(lt[i] - mp[j] + j - i) if lt[i] - mp[j] + j - i >= 0 else QHALF.zero for j in range(n)] for i in range(n)]
    return field_det(rows)


@pytest.mark.parametrize(
    "lam,mu",
    [((3,), ()), ((2, 1), ()), ((3, 2), (1,)), ((4, 2, 1), (2, 1)), ((3, 3), (2,)), ((5, 1), (3,))],
)
def test_skew_schur_two_ways(lam, mu):
    assert skew_schur_qrho(lam, mu) == dual_jacobi_trudi(lam, mu)


def test_hook_content_matches_jacobi_trudi():
    for n in range(1, 6):
        for lam in partitions_of(n):
            assert skew_schur_qrho(lam) == schur_hook_content(lam)


def test_skew_outside_containment_is_zero():
    assert skew_schur_qrho((2,), (3,)) == QHALF.zero


def test_charsum_boundary_cases():
    # mu empty with e = 1, 2 is where the truncated i-range matters
    assert charsum_lhs((), 1) == charsum_rhs((), 1)
    assert charsum_lhs((), 2) == charsum_rhs((), 2)
    assert charsum_lhs((), 1) == XLaurent.x_power(0)


def test_charsum_small_values():
    for mu in one_free_partitions_up_to(5):
        for e in range(0, 6 - mu.size):
            if mu.size + e:
                assert charsum_lhs(mu, e) == charsum_rhs(mu, e)


def test_jm_oracle_known_values():
    # r = 0: sum_i L_i^0 = n * id, so the trace is n! * n
    assert jm_trace_oracle((), 2, 0) == 2 * 2
    assert jm_trace_oracle((2,), 0, 1) == 2
    assert jm_trace_oracle((), 2, 1) == 0
    with pytest.raises(ValueError):
        jm_trace_oracle((), 7, 1)


def test_vandermonde_small():
    mat, det = vandermonde_block((), 2)
    assert mat == [[1, 1, Fraction(1, 2)], [0, 1, 1], [0, 1, 2]]
    assert det == 1
    assert vandermonde_block((2,), 3)[1] != 0
    with pytest.raises(ValueError):
        vandermonde_block((2,), 1)


def test_block_triangularity_d2():
    idx, mat = plus_matrix(2, 1)
    for i, nu in enumerate(idx):
        for j, eta in enumerate(idx):
            if not geq_order(nu, eta):
                assert not mat[i][j]
    assert field_det(mat) != 0


def test_theta_block_determinants():
    for theta, members in theta_blocks(3):
        for n in (1, 2):
            assert field_det(block_matrix(theta, members, n)) == schur_hook_content((n,) * len(members))


def test_vertex_pair_rank():
    rows, cols, mat = vertex_pair_matrix(3, 1)
    assert field_rank(mat) == len(rows) == 3
