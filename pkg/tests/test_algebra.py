from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from gwpairs.algebra import (
    I,
    ONE,
    Q,
    S1,
    S2,
    S3,
    GaussianRational,
    RatFunc,
    TruncationError,
    ULaurent,
    expand_q_to_u,
    parse_expr,
    series_pow,
    sin_half_ratio,
)

u = sympy.Symbol("u")


def sympy_expand(expr_in_q, order):
    """Independent expansion: substitute q = -exp(iu) and let sympy do the series."""
    q = sympy.Symbol("q")
    f = sympy.sympify(expr_in_q, locals={"q": q}).subs(q, -sympy.exp(sympy.I * u))
    ser = sympy.series(f, u, 0, order + 1).removeO()
    return {k: sympy.nsimplify(sympy.expand(ser).coeff(u, k)) for k in range(-6, order + 1)}


def as_gaussian(c: RatFunc) -> GaussianRational:
    return c.constant_value()


def sym_to_gaussian(z) -> GaussianRational:
    re, im = sympy.re(z), sympy.im(z)
    return GaussianRational(Fraction(int(sympy.numer(re)), int(sympy.denom(re))), Fraction(int(sympy.numer(im)), int(sympy.denom(im))))


@pytest.mark.parametrize(
    "text",
    ["q", "(1-q)/(1+q)", "q^2/(1+q)^2", "1/(1-q)", "(1+q^3)/(q*(1+q))", "q^3/(1+q)^4"],
)
def test_expand_matches_sympy(text):
    order = 6
    ours = expand_q_to_u(parse_expr(text), order)
    ref = sympy_expand(text, order)
    for k in range(-6, order + 1):
        assert as_gaussian(ours.coeff(k)) == sym_to_gaussian(ref[k]), (text, k)


def test_expand_known_values():
    s = expand_q_to_u((1 - Q) / (1 + Q), 3)
    assert s == ULaurent.from_dict(
        {-1: I * 2, 1: I * Fraction(-1, 6), 3: I * Fraction(-1, 360)}, order=4
    )
    assert expand_q_to_u(Q, 3) == ULaurent.from_dict(
        {0: -ONE, 1: -I, 2: ONE / 2, 3: I / 6}, order=4
    )


def test_truncated_coefficient_raises():
    s = expand_q_to_u(Q, 3)
    with pytest.raises(TruncationError):
        s.coeff(10)


def test_sin_half_ratio_head():
    f = sin_half_ratio(6)
    assert f.coeff(0) == ONE
    assert f.coeff(2) == ONE / 24
    assert f.coeff(4) == ONE * Fraction(7, 5760)


def test_series_pow_matches_products():
    f = sin_half_ratio(8)
    assert series_pow(f, 3, 8) == (f * f * f).truncate(8)
    assert series_pow(f, -1, 8) == f.inverse(8).truncate(8)


def test_series_pow_symbolic_exponent_additivity():
    f = sin_half_ratio(12)
    x, y = S1 / S3, S2 / S3
    lhs = series_pow(f, x + y, 12)
    rhs = (series_pow(f, x, 12) * series_pow(f, y, 12)).truncate(12)
    assert lhs == rhs


def test_ratfunc_basics():
    a = (S1 + S2) / S3
    assert a * S3 == S1 + S2
    assert a.homogeneous_degree() == 0
    assert (S1 * S2 * S3).permute((1, 2, 0)) == S1 * S2 * S3
    assert not a.free_of("s3")
    assert (I * I) == -ONE
    assert (ONE / I) == -I
    assert RatFunc.from_json((a * I + Q).to_json()) == a * I + Q


def test_ulaurent_json_round_trip():
    s = expand_q_to_u(Q * S1 / (1 + Q) ** 2, 6)
    assert ULaurent.from_json(s.to_json()) == s


def test_parse_expr_grammar():
    assert parse_expr("2*s1^2 - i*q/3") == S1**2 * 2 - I * Q / 3
    with pytest.raises(ValueError):
        parse_expr("exp(q)")


small = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@settings(max_examples=40, deadline=None)
@given(small, small, small, st.integers(0, 3), st.integers(0, 3))
def test_expand_is_ring_homomorphism(a, b, c, m, n):
    f = Q**m * a + b
    g = (Q**n * c + 1) / (1 + Q) ** 2
    order = 8
    F, G = expand_q_to_u(f, order), expand_q_to_u(g, order)
    assert expand_q_to_u(f + g, order) == (F + G).truncate(order)
    assert expand_q_to_u(f * g, order) == (F * G).truncate(order)


@settings(max_examples=25, deadline=None)
@given(small, small, st.integers(1, 3))
def test_inverse_round_trip(a, b, k):
    f = Q**k * (a if a else 1) + b + 3
    if f.is_zero():
        return
    F = expand_q_to_u(f, 10)
    prod = F * F.inverse(10)
    assert prod.truncate(prod.order) == ULaurent.one(order=prod.order)


def test_pole_limit():
    from gwpairs.algebra import AlgebraError

    with pytest.raises(AlgebraError):
        expand_q_to_u(ONE / (1 + Q) ** 9, 4)
    assert expand_q_to_u(ONE / (1 + Q) ** 9, 4, pole_limit=9).valuation == -9
