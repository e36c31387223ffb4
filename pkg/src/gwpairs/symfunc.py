"""Symmetric functions at the principal specialization, symmetric-group
characters, content sums and the rank arguments built on them.

Series in ``q^(1/2)`` live in the sympy field ``QQ(t)`` with ``t = q^(1/2)``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from sympy.polys.domains import QQ
from sympy.polys.fields import field

from .partitions import Partition, eta_minus, eta_plus, partitions_of

__all__ = [
    "QHALF",
    "T",
    "h_qrho",
    "skew_schur_qrho",
    "schur_hook_content",
    "field_det",
    "field_rank",
    "mn_character",
    "content_sum",
    "XLaurent",
    "charsum_lhs",
    "charsum_rhs",
    "jm_trace_oracle",
    "vandermonde_block",
    "plus_matrix",
    "plus_index",
    "geq_order",
    "theta_blocks",
    "vertex_pair_matrix",
]

QHALF, T = field("t", QQ)  # t = q^(1/2)


# ---------------------------------------------------------------------------
# principal specialization


@lru_cache(maxsize=None)
def h_qrho(k: int):
    """Complete symmetric function h_k at (q^-1/2, q^-3/2, ...)."""
    if k < 0:
        return QHALF.zero
    if k == 0:
        return QHALF.one
    den = QHALF.one
    for j in range(1, k + 1):
        den *= 1 - T ** (-2 * j)
    return T ** (-k) / den


def field_det(rows):
    """Exact determinant by Gaussian elimination over a field."""
    n = len(rows)
    if n == 0:
        return 1
    a = [list(r) for r in rows]
    det = None
    sign = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return a[0][0] * 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        p = a[c][c]
        det = p if det is None else det * p
        for r in range(c + 1, n):
            if a[r][c]:
                f = a[r][c] / p
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det * sign


def field_rank(rows) -> int:
    a = [list(r) for r in rows]
    if not a:
        return 0
    ncols = len(a[0])
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(a)) if a[r][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][c]
        for r in range(len(a)):
            if r != rank and a[r][c]:
                f = a[r][c] / p
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
        if rank == len(a):
            break
    return rank


@lru_cache(maxsize=None)
def skew_schur_qrho(lam, mu=()):
    """s_{lam/mu}(q^rho) from the Jacobi-Trudi determinant."""
    lam, mu = Partition(lam), Partition(mu)
    if not lam.contains(mu):
        return QHALF.zero
    n = len(lam)
    if n == 0:
        return QHALF.one
    mu_p = tuple(mu) + (0,) * (n - len(mu))
    rows = [[h_qrho(lam[i] - mu_p[j] + j - i) for j in range(n)] for i in range(n)]
    return field_det(rows)


def schur_hook_content(lam):
    """Independent evaluation of s_lam(q^rho) by the hook-length formula."""
    lam = Partition(lam)
    x = T ** (-2)
    n_lam = sum(i * p for i, p in enumerate(lam))
    conj = lam.conjugate()
    den = QHALF.one
    for i, row in enumerate(lam):
        for j in range(row):
            hook = row - j + conj[j] - i - 1
            den *= 1 - x**hook
    return T ** (-lam.size) * x**n_lam / den


# ---------------------------------------------------------------------------
# characters


def _beta(sigma: Partition, n: int) -> tuple:
    # beta numbers with n entries
    parts = tuple(sigma) + (0,) * (n - len(sigma))
    return tuple(p + n - 1 - i for i, p in enumerate(parts))


@lru_cache(maxsize=None)
def _mn(beta: frozenset, mu: tuple) -> int:
    if not mu:
        return 1
    k, rest = mu[0], mu[1:]
    total = 0
    for b in beta:
        if b - k >= 0 and (b - k) not in beta:
            # sign is (-1)^(number of beads strictly between)
            between = sum(1 for x in beta if b - k < x < b)
            total += (-1) ** between * _mn((beta - {b}) | {b - k}, rest)
    return total


def mn_character(sigma, mu) -> int:
    """Irreducible character chi_sigma at cycle type mu (Murnaghan-Nakayama)."""
    sigma, mu = Partition(sigma), Partition(mu)
    if sigma.size != mu.size:
        raise ValueError(f"size mismatch: |{sigma}| != |{mu}|")
    n = max(len(sigma), 1)
    return _mn(frozenset(_beta(sigma, n)), tuple(mu))


def contents(sigma):
    sigma = Partition(sigma)
    return [j - i for i, row in enumerate(sigma) for j in range(row)]


def content_sum(sigma, weights, zero=0):
    total = zero
    for c in contents(sigma):
        total = total + weights(c)
    return total


class XLaurent:
    """Laurent polynomial in X^(1/2); keys are doubled exponents."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def x_power(cls, c, coeff=1) -> XLaurent:
        """coeff * X^c for integer or half-integer c."""
        return cls({int(2 * Fraction(c)): coeff})

    @classmethod
    def xi(cls) -> XLaurent:
        return cls({1: 1, -1: -1})

    def __add__(self, other):
        if isinstance(other, int):
            other = XLaurent({0: other})
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return XLaurent(out)

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return XLaurent({k: v * other for k, v in self.terms.items()})
        out: dict = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                out[a + b] = out.get(a + b, 0) + x * y
        return XLaurent(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = XLaurent({0: 1})
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = XLaurent({0: other})
        return isinstance(other, XLaurent) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "XLaurent(0)"
        body = " + ".join(f"{v}*X^({Fraction(k, 2)})" for k, v in sorted(self.terms.items()))
        return f"XLaurent({body})"


def _check_one_free(mu: Partition):
    if 1 in mu:
        raise ValueError(f"mu must have no part equal to 1: {mu}")


def charsum_lhs(mu, e: int, weights=None, zero=None):
    """sum over sigma of chi_sigma(1^n) chi_sigma(mu u 1^e) * content_sum(sigma, weights).

    With ``weights=None`` the weight is X^c and the result an :class:`XLaurent`.
    """
    mu = Partition(mu)
    _check_one_free(mu)
    n = mu.size + e
    if weights is None:
        weights, zero = XLaurent.x_power, XLaurent()
    elif zero is None:
        zero = 0
    cyc = mu + (1,) * e
    ones = Partition((1,) * n)
    total = zero
    for sigma in partitions_of(n):
        coeff = mn_character(sigma, ones) * mn_character(sigma, cyc)
        if coeff:
            total = total + content_sum(sigma, weights, zero) * coeff
    return total


def charsum_rhs(mu, e: int) -> XLaurent:
    """Closed form of the character sum; terms with a negative xi power are dropped."""
    mu = Partition(mu)
    _check_one_free(mu)
    n = mu.size + e
    xi = XLaurent.xi()
    acc = XLaurent()
    for i in range(e + 1):
        power = mu.size + 2 * e - 2 * i - 2
        if power < 0:
            continue
        acc = acc + xi**power * (math.factorial(i) * math.comb(e, i) * math.comb(n, i))
    for m in mu:
        acc = acc * XLaurent({m: 1, -m: -1})
    return acc


def _compose(p, q):
    # (p*q)(x) = p(q(x)); permutations as tuples on 0..n-1
    return tuple(p[i] for i in q)


def _transposition(n, a, b):
    t = list(range(n))
    t[a], t[b] = t[b], t[a]
    return tuple(t)


def _ga_mul(x: dict, y: dict) -> dict:
    out: dict = {}
    for p, a in x.items():
        for r, b in y.items():
            k = _compose(p, r)
            out[k] = out.get(k, 0) + a * b
    return {k: v for k, v in out.items() if v}


def _perm_of_type(cycle_type, n):
    perm = list(range(n))
    start = 0
    for length in cycle_type:
        for j in range(length):
            perm[start + j] = start + (j + 1) % length
        start += length
    return tuple(perm)


def jm_trace_oracle(mu, e: int, r: int, max_n: int = 6) -> int:
    """Trace of tau^-1 * (L_1^r + ... + L_n^r) on the regular representation.

    Computed by multiplying out Jucys-Murphy elements in the group algebra.
    The trace of a group-algebra element on the regular representation is
    n! times its identity coefficient.  L_1 = 0, with 0^0 = 1.
    """
    mu = Partition(mu)
    n = mu.size + e
    if n > max_n:
        raise ValueError(f"n = {n} exceeds the configured bound {max_n}")
    ident = tuple(range(n))
    total: dict = {}
    for i in range(n):
        li = {}
        for j in range(i):
            li[_transposition(n, j, i)] = 1
        power = {ident: 1}
        for _ in range(r):
            power = _ga_mul(power, li)
        for k, v in power.items():
            total[k] = total.get(k, 0) + v
    tau = _perm_of_type(tuple(mu) + (1,) * e, n)
    tau_inv = [0] * n
    for i, t in enumerate(tau):
        tau_inv[t] = i
    tau_inv = tuple(tau_inv)
    ident_coeff = 0
    for k, v in total.items():
        if _compose(tau_inv, k) == ident:
            ident_coeff += v
    return math.factorial(n) * ident_coeff


# ---------------------------------------------------------------------------
# Vandermonde blocks


def vandermonde_block(gamma, d: int):
    """Matrix ((|gamma|+j)^i / j!) for 0 <= i,j <= d-|gamma| and its determinant."""
    gamma = Partition(gamma)
    if 1 in gamma:
        raise ValueError("gamma must have no parts equal to 1")
    if gamma.size > d:
        raise ValueError("|gamma| must not exceed d")
    k = d - gamma.size + 1
    g = gamma.size
    mat = [[Fraction((g + j) ** i, math.factorial(j)) for j in range(k)] for i in range(k)]
    return mat, field_det(mat)


# ---------------------------------------------------------------------------
# skew Schur pairing matrices


def plus_index(d: int) -> list[Partition]:
    """The empty partition followed by all partitions of size 1..d."""
    return [Partition(())] + [p for n in range(1, d + 1) for p in partitions_of(n)]


def geq_order(nu, eta) -> bool:
    """nu >= eta iff the largest-part-removed partitions satisfy containment."""
    return Partition(eta_minus(nu)).contains(eta_minus(eta))


def plus_matrix(d: int, n: int):
    """Square matrix [s_{nu+/eta}(q^rho)] with rows nu and columns eta, |nu|,|eta| <= d."""
    idx = plus_index(d)
    return idx, [[skew_schur_qrho(eta_plus(nu, n), eta) for eta in idx] for nu in idx]


def theta_blocks(d: int):
    """Pairs (theta, members) where members are the eta with eta_- = theta.

    The members are {t1 + i} u theta for 0 <= i <= d - |theta| - t1, with
    t1 the largest part of theta (0 when theta is empty).
    """
    out = []
    for theta in plus_index(d):
        t1 = theta[0] if theta else 0
        m = d - theta.size - t1
        if m < 0:
            continue
        members = tuple(Partition(tuple(p for p in (t1 + i,) + tuple(theta) if p)) for i in range(m + 1))
        out.append((theta, members))
    return out


def block_matrix(theta, members, n: int):
    return [[skew_schur_qrho(eta_plus(nu, n), eta) for eta in members] for nu in members]


def vertex_pair_matrix(d: int, n: int):
    """Rows delta |- d, columns eta+ for |eta| <= d; entries sum_e s_{delta^t/e} s_{eta+/e}."""
    rows = partitions_of(d)
    cols = [eta_plus(eta, n) for eta in plus_index(d)]
    inner = plus_index(max(d, max(c.size for c in cols)))
    mat = []
    for delta in rows:
        dt = delta.conjugate()
        row = []
        for nu in cols:
            acc = QHALF.zero
            for e in inner:
                if dt.contains(e) and nu.contains(e):
                    acc += skew_schur_qrho(dt, e) * skew_schur_qrho(nu, e)
            row.append(acc)
        mat.append(row)
    return rows, cols, mat
