"""Closed-form cap evaluations, their localization-sum oracles, and the
degree-one worked example pinning down K_{(2),(1)}.

Stable-pairs values are :class:`RatFunc` objects in ``q`` (with possible
``s_i`` prefactors).  Gromov-Witten values are exact or truncated
:class:`ULaurent` series.  Descendent insertions on the cap use the ``N_0``
normalization unless stated otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    ONE,
    Q,
    S1,
    S2,
    S3,
    I,
    RatFunc,
    ULaurent,
    derivative_u,
    expand_q_to_u,
    series_pow,
    sin_half_ratio,
)
from .partitions import Partition, partitions_of
from .symfunc import charsum_lhs, mn_character

__all__ = [
    "CapError",
    "pt_cap_pure",
    "gw_cap_pure",
    "pt_cap_maxdeg",
    "gw_cap_maxdeg",
    "pt_cap_maxdeg_oracle",
    "pt_tube_ones",
    "one_point_cap_pt",
    "one_point_cap_gw",
    "one_point_cap_sum",
    "compositions_with_head",
    "DegreeOneReport",
    "degree_one_example",
    "degree_one_cap_series",
    "degree_one_data",
]


class CapError(ValueError):
    pass


def _one_free(gamma: Partition):
    if 1 in gamma:
        raise CapError(f"partition {gamma} has parts equal to 1")


def _pure_scalar(gamma: Partition) -> Fraction:
    return Fraction(1, gamma.aut_order() * math.prod(math.factorial(g) for g in gamma))


def pt_cap_pure(gamma) -> RatFunc:
    """Z_P(Cap | prod tau_{gamma_i - 1}(N_0) | gamma[p_inf]) = q^|gamma| / (|Aut| prod gamma_i!)."""
    gamma = Partition(gamma)
    _one_free(gamma)
    return Q**gamma.size * _pure_scalar(gamma)


def gw_cap_pure(gamma) -> ULaurent:
    """GW counterpart of :func:`pt_cap_pure`; q^|gamma| becomes u^(-2 l(gamma))."""
    gamma = Partition(gamma)
    _one_free(gamma)
    return ULaurent.monomial(RatFunc.const(_pure_scalar(gamma)), -2 * gamma.length)


def _maxdeg_scalar(alpha: Partition, d: int) -> Fraction:
    if d - 1 != alpha.size - alpha.length:
        raise CapError(f"degree {d} violates d - 1 = |alpha| - l(alpha) for alpha = {alpha}")
    return Fraction(d) ** (alpha.length - 2) / math.prod(math.factorial(a - 1) for a in alpha)


def pt_cap_maxdeg(alpha, d: int) -> RatFunc:
    """Cap with descendents prod tau_{alpha_i - 1}(N_0) in the maximal degree d."""
    alpha = Partition(alpha)
    return Q**d * _maxdeg_scalar(alpha, d)


def gw_cap_maxdeg(alpha, d: int) -> ULaurent:
    alpha = Partition(alpha)
    return ULaurent.monomial(RatFunc.const(_maxdeg_scalar(alpha, d)), -2)


def pt_cap_maxdeg_oracle(alpha) -> RatFunc:
    """Evaluate the localization sum for the maximal-degree cap term by term."""
    alpha = Partition(alpha)
    if not alpha:
        raise CapError("alpha must have positive size")
    d = alpha.size - alpha.length + 1
    pref = Fraction((-1) ** (d + alpha.length - 1), d * math.factorial(d) * math.prod(math.factorial(a + 1) for a in alpha))
    total = 0
    for a in range(d):
        b = d - 1 - a
        p = 1
        for ai in alpha:
            k = ai + 1
            p *= -((-b - 1) ** k) + (-b) ** k + a**k - (a + 1) ** k
        total += (-1) ** a * math.comb(d - 1, a) * p
    return Q**d * (pref * total)


def pt_tube_ones(e: int, with_q: bool = False) -> RatFunc:
    """Z_P(Cap | 1 | (1^e)) in degree e.

    The bare value is 1/(e! (s1 s2)^e).  ``with_q`` multiplies by the
    q^e carried by the curve class e*L; the composition sum for the
    one-descendent cap only closes up with that factor present.
    """
    if e < 0:
        raise CapError("e must be nonnegative")
    val = ONE / (math.factorial(e) * (S1 * S2) ** e)
    return val * Q**e if with_q else val


def one_point_cap_pt(gamma) -> RatFunc:
    gamma = Partition(gamma)
    if not gamma:
        raise CapError("gamma must have positive size")
    return Q**gamma.size * Fraction((-1) ** (gamma.length - 1), math.factorial(gamma.size) * gamma.aut_order())


def one_point_cap_gw(gamma) -> ULaurent:
    gamma = Partition(gamma)
    if not gamma:
        raise CapError("gamma must have positive size")
    return ULaurent.monomial(RatFunc.const(Fraction(1, math.factorial(gamma.size) * gamma.aut_order())), -2)


def compositions_with_head(m: int):
    """Tuples (e_0, e_1, ..., e_j) summing to m with e_0 >= 0 and e_k > 0 for k > 0."""

    def tails(n):
        if n == 0:
            yield ()
            return
        for first in range(1, n + 1):
            for rest in tails(n - first):
                yield (first,) + rest

    for e0 in range(m, -1, -1):
        for tail in tails(m - e0):
            yield (e0,) + tail


def _one_point_cap_mod(mu: Partition, e0: int, tube_total: int, ell_gamma: int, a: int) -> RatFunc:
    """Localization value of Z_P(Cap | tau_{a-1}(p) | mu u 1^{e0}) modulo s1 + s2."""
    n = mu.size + e0
    if n == 0:
        return RatFunc.const(0)

    def weight(c):
        return (c - 1) ** (a + 1) - 2 * c ** (a + 1) + (c + 1) ** (a + 1)

    chars = charsum_lhs(mu, e0, weight, 0)
    scal = Fraction((-1) ** (ell_gamma - 1) * chars, math.factorial(a + 1) * math.factorial(n) * math.factorial(e0) * mu.z())
    return (S1 * S2) ** tube_total * Q**n * scal


def one_point_cap_sum(gamma, with_q: bool = True) -> RatFunc:
    """Left side of the one-descendent cap identity, by the composition sum.

    ``with_q=False`` uses the bare tube factor (no q^e); see
    :func:`pt_tube_ones`.
    """
    gamma = Partition(gamma)
    if not gamma:
        raise CapError("gamma must have positive size")
    mu = gamma.without_ones()
    m = gamma.ones()
    a = gamma.size + gamma.length - 1
    total = RatFunc.const(0)
    for comp in compositions_with_head(m):
        e0, tail = comp[0], comp[1:]
        term = _one_point_cap_mod(mu, e0, sum(tail), gamma.length, a)
        if term.is_zero():
            continue
        for ek in tail:
            term = term * pt_tube_ones(ek, with_q)
        total = total + term * (-1) ** len(tail)
    reduced = total.subs({"s2": -S1})
    if not reduced.free_of("s1", "s2", "s3"):
        raise CapError(f"residual s1 dependence in the composition sum for {gamma}: {reduced}")
    return reduced


# ---------------------------------------------------------------------------
# the degree-one worked example


def degree_one_cap_series(order: int):
    """Cap series used in the degree-one example.

    Returns ``(c_p, c_gw_2, c_gw_1)``: the stable-pairs series for
    tau_{(2)}(p_0) against (1), and the GW series for tau_{(2)}(p_0) and
    tau_{(1)}(p_0) against (1), truncated at ``u^order``.
    """
    c_p = -Q * (S1 + S2) / 2 * (1 - Q) / (1 + Q)
    x = (S1 + S2) / S3
    f = sin_half_ratio(order + 2)
    dil = derivative_u(series_pow(f, -x, order + 2) * S3) * series_pow(f, x, order + 2)
    c_gw_2 = ULaurent.monomial(-S3, -2) + dil.shift(-1)
    c_gw_1 = ULaurent.monomial(ONE, -2)
    return c_p, c_gw_2.truncate(order), c_gw_1, dil


def degree_one_data(order: int):
    """VertexMatrixPair-style dictionaries for the degree <= 2 cap rows against (1)."""
    c_p, c_gw_2, c_gw_1, _ = degree_one_cap_series(order)
    lam = Partition((1,))
    cp = {(Partition((2,)), lam): c_p, (Partition((1,)), lam): Q}
    cgw = {(Partition((2,)), lam): c_gw_2, (Partition((1,)), lam): c_gw_1}
    return cp, cgw


@dataclass
class DegreeOneReport:
    order: int
    lhs: ULaurent
    rhs: ULaurent
    equal: bool
    first_mismatch: int | None
    rhs_s3_free: bool
    k21: ULaurent | None
    k21_expected: ULaurent
    k21_ok: bool
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.equal and self.rhs_s3_free and self.k21_ok


def degree_one_example(order: int = 20) -> DegreeOneReport:
    """Check the degree-one identity after -q = e^{iu} and recover K_{(2),(1)}."""
    from .kmatrix import VertexMatrixPair, solve_row

    if order < 4:
        raise ValueError("order must be at least 4")
    lhs = expand_q_to_u((S1 + S2) / 2 * (1 - Q) / (1 + Q), order)
    _, _, _, dil = degree_one_cap_series(order)
    # -(1/(iu)) = i/u
    rhs = (ULaurent.monomial((S1 + S2) * I, -1) + dil * I).truncate(order)
    mism = lhs.first_difference(rhs) if lhs != rhs else None
    s3_free = all(c.free_of("s3") for c in rhs.coeffs)

    cp, cgw = degree_one_data(order + 2)
    pair = VertexMatrixPair(d=1, c_p=cp, c_gw=cgw)
    alpha = Partition((2,))
    known = {
        Partition((2,)): ULaurent.monomial(ONE / I, -1),
        Partition((1, 1)): ULaurent.zero(),
    }
    row = solve_row(alpha, pair, order, known=known, unknowns=[Partition((1,))])
    k21 = row.get(Partition((1,)))
    expected = ULaurent.monomial((S1 + S2 + S3) / I, -1)
    k21_ok = k21 is not None and k21 == expected and k21.order is not None and k21.order >= 0
    return DegreeOneReport(order, lhs, rhs, mism is None, mism, s3_free, k21, expected, k21_ok)
