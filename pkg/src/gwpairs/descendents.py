"""Formal algebra of descendent symbols.

A symbol is a tuple ``(label, k)`` standing for ``tau_k`` at the point
``label`` (``""`` for an unlabeled point).  Monomials are sorted tuples of
symbols; a :class:`DescendentPoly` maps monomials to coefficients, which
may be integers, :class:`RatFunc` or :class:`ULaurent` values.

The correspondence matrix is used through ``K.row(alpha)`` only, returning
``{alpha_hat: ULaurent}``.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from fractions import Fraction

from .algebra import FIELD_C, FIELD_S, S1, S2, S3, AlgebraError, GaussianRational, RatFunc, ULaurent
from .partitions import Partition, set_partitions

__all__ = [
    "DescendentPoly",
    "MissingRowError",
    "DivisibilityError",
    "NotSymmetricError",
    "OddClassError",
    "tau_monomial",
    "phi",
    "hat",
    "add_part_one",
    "tilde",
    "tilde_coeff",
    "ktilde",
    "ktilde_row",
    "fundamental_identity",
    "set_partition_weight",
    "TwoPointReport",
    "two_point_check",
    "SymbolicRing",
    "bar_transform",
    "to_symmetric",
]


class MissingRowError(KeyError):
    """The correspondence matrix has no row for the requested partition."""


class DivisibilityError(ArithmeticError):
    """A tilde coefficient is not divisible by the expected power of s1 s2 s3."""


class NotSymmetricError(ArithmeticError):
    """A coefficient is not symmetric in s1, s2, s3."""


class OddClassError(ValueError):
    pass


def _is_zero(c) -> bool:
    if isinstance(c, (int, Fraction)):
        return c == 0
    return c.is_zero()


class DescendentPoly:
    """Finite linear combination of descendent monomials."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        self.terms = {}
        for m, c in (terms or {}).items():
            if not _is_zero(c):
                self.terms[tuple(sorted(m))] = c

    @classmethod
    def one(cls, coeff=1) -> DescendentPoly:
        return cls({(): coeff})

    @classmethod
    def symbol(cls, sym, coeff=1) -> DescendentPoly:
        return cls({(sym,): coeff})

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return DescendentPoly(out)

    def __neg__(self):
        return DescendentPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, DescendentPoly):
            return DescendentPoly({m: c * other for m, c in self.terms.items()})
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                c = c1 * c2
                out[m] = out[m] + c if m in out else c
        return DescendentPoly(out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, c) -> DescendentPoly:
        return DescendentPoly({m: v * c for m, v in self.terms.items()})

    def map_coeffs(self, fn) -> DescendentPoly:
        return DescendentPoly({m: fn(c) for m, c in self.terms.items()})

    def relabel(self, label) -> DescendentPoly:
        return DescendentPoly({tuple((label,) + s[1:] for s in m): c for m, c in self.terms.items()})

    def coeff(self, monom, zero=0):
        return self.terms.get(tuple(sorted(monom)), zero)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, DescendentPoly):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "DescendentPoly(0)"
        parts = []
        for m, c in sorted(self.terms.items()):
            mono = "*".join(_sym_str(s) for s in m) or "1"
            parts.append(f"({c})*{mono}")
        return " + ".join(parts)

    def to_json(self):
        out = []
        for m, c in sorted(self.terms.items()):
            cj = c.to_json() if hasattr(c, "to_json") else str(c)
            out.append({"monomial": [_sym_str(s) for s in m], "coeff": cj})
        return out


def _sym_str(s) -> str:
    label, k = s[0], s[1]
    name = f"tau_{k}" if isinstance(k, int) else f"tau[{k}]"
    return f"{name}({label})" if label else name


def tau_monomial(alpha, label="") -> tuple:
    """Monomial tau_{alpha_1 - 1} ... tau_{alpha_l - 1}."""
    return tuple(sorted((label, a - 1) for a in Partition(alpha)))


def monomial_partition(monom) -> Partition:
    return Partition(s[1] + 1 for s in monom)


def phi(p: DescendentPoly) -> DescendentPoly:
    """Lower one descendent index at a time, dropping tau_0 factors."""
    out = DescendentPoly()
    for m, c in p.terms.items():
        for j, s in enumerate(m):
            if s[1] == 0:
                continue
            new = m[:j] + ((s[0], s[1] - 1),) + m[j + 1 :]
            out = out + DescendentPoly({new: c})
    return out


def hat(alpha, K, label="") -> DescendentPoly:
    """Correspondence image sum_ahat K[alpha, ahat] tau_ahat; 1 for the empty partition."""
    alpha = Partition(alpha)
    if not alpha:
        return DescendentPoly.one(ULaurent.one())
    try:
        row = K.row(alpha)
    except KeyError as exc:
        raise MissingRowError(f"no row for {alpha} in the correspondence matrix") from exc
    return DescendentPoly({tau_monomial(ah, label): c for ah, c in row.items()})


def add_part_one(alpha, K) -> DescendentPoly:
    """hat of (1) + alpha from hat of alpha: tau_0 * P - s1 s2 s3 * Phi(P)."""
    p = hat(alpha, K)
    tau0 = DescendentPoly.symbol(("", 0), ULaurent.one())
    return tau0 * p - phi(p).scale(S1 * S2 * S3)


def set_partition_weight(n_blocks: int) -> int:
    return (-1) ** (n_blocks - 1) * math.factorial(n_blocks - 1)


def tilde(sigma, K, label="") -> DescendentPoly:
    """Set-partition alternating sum of products of hats of subpartitions."""
    sigma = Partition(sigma)
    total = DescendentPoly()
    cache: dict = {}
    for blocks in set_partitions(len(sigma)):
        term = DescendentPoly.one(ULaurent.one())
        for b in blocks:
            sub = sigma.sub(i - 1 for i in b)
            if sub not in cache:
                cache[sub] = hat(sub, K, label)
            term = term * cache[sub]
        total = total + term.scale(set_partition_weight(len(blocks)))
    return total


def tilde_coeff(sigma, sigma_hat, K) -> ULaurent:
    return tilde(sigma, K).coeff(tau_monomial(sigma_hat), ULaurent.zero())


# ---------------------------------------------------------------------------
# symmetric reduction to Chern classes

_RING = FIELD_S.ring
_CRING = FIELD_C.ring
_E = (
    _RING.gens[0] + _RING.gens[1] + _RING.gens[2],
    _RING.gens[0] * _RING.gens[1] + _RING.gens[0] * _RING.gens[2] + _RING.gens[1] * _RING.gens[2],
    _RING.gens[0] * _RING.gens[1] * _RING.gens[2],
)


def _sym_poly(poly):
    """Write a polynomial symmetric in s1,s2,s3 (no q) in c1,c2,c3."""
    out = _CRING.zero
    p = poly
    while p:
        (a, b, c, qd), coeff = p.LT
        if qd or not (a >= b >= c):
            raise NotSymmetricError(f"polynomial is not symmetric in s1, s2, s3: {poly.as_expr()}")
        out += _CRING({(a - b, b - c, c): coeff})
        p = p - _E[0] ** (a - b) * _E[1] ** (b - c) * _E[2] ** c * coeff
    return out


def to_symmetric(value: RatFunc) -> RatFunc:
    """Re-express a symmetric polynomial in s_i as a polynomial in c_i."""
    if not value.is_polynomial():
        raise DivisibilityError(f"{value} is not a polynomial")
    parts = []
    for part in (value.re, value.im):
        if not part:
            parts.append(FIELD_C.zero)
            continue
        num = part.numer * (1 / part.denom.LC)
        parts.append(FIELD_C(_sym_poly(num)))
    return RatFunc(parts[0], parts[1])


def _divide_exact(value: RatFunc, divisor: RatFunc) -> RatFunc:
    q = value / divisor
    if not q.is_polynomial():
        raise DivisibilityError(f"{value} is not divisible by {divisor}")
    return q


def ktilde(sigma, sigma_hat, K, in_c: bool = True) -> ULaurent:
    """(s1 s2 s3)^-(l-1) times the tau_{sigma_hat} coefficient of tilde(sigma)."""
    sigma = Partition(sigma)
    coeff = tilde_coeff(sigma, sigma_hat, K)
    div = (S1 * S2 * S3) ** (len(sigma) - 1)
    out = coeff.map_coeffs(lambda c: _divide_exact(c, div))
    if not in_c:
        return out
    terms = {k: to_symmetric(c) for k, c in out.terms().items()}
    return ULaurent.from_dict(terms, out.order, FIELD_C)


def ktilde_row(sigma, K, in_c: bool = True) -> dict:
    sigma = Partition(sigma)
    t = tilde(sigma, K)
    div = (S1 * S2 * S3) ** (len(sigma) - 1)
    row = {}
    for m, c in t.terms.items():
        sh = monomial_partition(m)
        val = c.map_coeffs(lambda x: _divide_exact(x, div))
        if in_c:
            val = ULaurent.from_dict({k: to_symmetric(v) for k, v in val.terms().items()}, val.order, FIELD_C)
        row[sh] = val
    return row


# ---------------------------------------------------------------------------
# set-partition identities


def fundamental_identity(k: int) -> int:
    """sum over set partitions P of {1..k} of prod_S (-1)^(|S|-1) (|S|-1)!."""
    total = 0
    for blocks in set_partitions(k):
        total += math.prod(set_partition_weight(len(b)) for b in blocks)
    return total


def _formal_hat(label, subset) -> DescendentPoly:
    if not subset:
        return DescendentPoly.one()
    return DescendentPoly.symbol((label, tuple(sorted(subset))))


def _formal_tilde(label, subset) -> DescendentPoly:
    subset = tuple(sorted(subset))
    total = DescendentPoly()
    for blocks in set_partitions(len(subset)):
        term = DescendentPoly.one()
        for b in blocks:
            term = term * _formal_hat(label, [subset[i - 1] for i in b])
        total = total + term.scale(set_partition_weight(len(blocks)))
    return total


def _two_point_sides(n: int, tilde_fn, hat_fn, one):
    left = DescendentPoly()
    for blocks in set_partitions(n):
        first = [b for b in blocks if 1 in b][0]
        term = tilde_fn("•", first)
        for b in blocks:
            if b is first:
                continue
            term = term * (tilde_fn("•", b) + tilde_fn("★", b).scale((-1) ** len(b)))
        left = left + term
    right = DescendentPoly()
    rest = list(range(2, n + 1))
    for mask in range(1 << len(rest)):
        bset = [rest[j] for j in range(len(rest)) if mask >> j & 1]
        aset = [1] + [x for x in rest if x not in bset]
        term = hat_fn("•", aset) * hat_fn("★", bset)
        right = right + term.scale((-1) ** len(bset))
    return left, right


def _drop_label(p: DescendentPoly, label) -> DescendentPoly:
    return DescendentPoly({m: c for m, c in p.terms.items() if all(s[0] != label for s in m)})


class TwoPointReport:
    def __init__(self, sigma, formal_ok, inversion_ok, concrete_ok, witness=None):
        self.sigma = sigma
        self.formal_ok = formal_ok
        self.inversion_ok = inversion_ok
        self.concrete_ok = concrete_ok  # None when K lacks a needed row
        self.witness = witness

    @property
    def passed(self) -> bool:
        return self.formal_ok and self.inversion_ok and self.concrete_ok is not False

    def to_json(self):
        return {
            "sigma": str(self.sigma),
            "formal": self.formal_ok,
            "inversion": self.inversion_ok,
            "concrete": self.concrete_ok,
            "witness": self.witness,
        }


def two_point_check(sigma, K=None, max_length: int = 3) -> TwoPointReport:
    """Check the two-point set-partition identity for sigma.

    The formal check treats every hat of a subpartition at each point as an
    independent symbol, so it covers all K at once.  Setting the second
    point to zero must give back the inversion sum_Q prod tilde = hat.  When
    ``K`` has rows for every subpartition, the identity is also expanded with
    the actual matrix entries.
    """
    sigma = Partition(sigma)
    n = len(sigma)
    if n > max_length:
        raise ValueError(f"length {n} exceeds the configured bound {max_length}")
    left, right = _two_point_sides(n, _formal_tilde, _formal_hat, 1)
    diff = left - right
    witness = None
    formal_ok = diff.is_zero()
    if not formal_ok:
        witness = repr(next(iter(diff.terms)))
    inv = DescendentPoly()
    for blocks in set_partitions(n):
        term = DescendentPoly.one()
        for b in blocks:
            term = term * _formal_tilde("•", b)
        inv = inv + term
    inversion_ok = _drop_label(left, "★") == inv == _formal_hat("•", range(1, n + 1))
    concrete_ok = None
    if K is not None:
        try:
            def chat(label, subset):
                return hat(sigma.sub(i - 1 for i in subset), K, label)

            def ctilde(label, subset):
                subset = sorted(subset)
                total = DescendentPoly()
                for blocks in set_partitions(len(subset)):
                    term = DescendentPoly.one(ULaurent.one())
                    for b in blocks:
                        term = term * chat(label, [subset[i - 1] for i in b])
                    total = total + term.scale(set_partition_weight(len(blocks)))
                return total

            cl, cr = _two_point_sides(n, ctilde, chat, None)
            concrete_ok = cl == cr
            if not concrete_ok and witness is None:
                witness = repr(next(iter((cl - cr).terms)))
        except MissingRowError:
            concrete_ok = None
    return TwoPointReport(sigma, formal_ok, inversion_ok, concrete_ok, witness)


# ---------------------------------------------------------------------------
# bar transform


class SymbolicRing:
    """Free graded ring on named cohomology classes.

    ``degrees`` maps names to real cohomological degree.  ``products`` maps
    unordered name pairs to ``{name: coefficient}``.  A product missing from
    the table vanishes when its degree exceeds ``2 * dim`` and is an error
    otherwise.  Elements are dicts ``{name: Fraction}``; the unit is ``"1"``.
    """

    def __init__(self, degrees: dict, products: dict, dim: int = 3):
        for name, deg in degrees.items():
            if deg % 2:
                raise OddClassError(f"class {name} has odd degree {deg}")
        self.degrees = {"1": 0, **degrees}
        self.products = {}
        for (a, b), val in products.items():
            self.products[frozenset((a, b)) if a != b else (a, a)] = {k: Fraction(v) for k, v in val.items()}
        self.dim = dim

    def element(self, spec) -> dict:
        if isinstance(spec, str):
            if spec not in self.degrees:
                raise KeyError(f"unknown class {spec!r}")
            return {spec: Fraction(1)}
        return {k: Fraction(v) for k, v in spec.items() if v}

    def one(self) -> dict:
        return {"1": Fraction(1)}

    def _basis_mul(self, a: str, b: str) -> dict:
        if a == "1":
            return {b: Fraction(1)}
        if b == "1":
            return {a: Fraction(1)}
        key = (a, a) if a == b else frozenset((a, b))
        if key in self.products:
            return self.products[key]
        if self.degrees[a] + self.degrees[b] > 2 * self.dim:
            return {}
        raise KeyError(f"product {a}*{b} is not in the product table")

    def mul(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for k, v in self._basis_mul(a, b).items():
                    out[k] = out.get(k, 0) + ca * cb * v
        return {k: v for k, v in out.items() if v}

    def add(self, x: dict, y: dict) -> dict:
        out = dict(x)
        for k, v in y.items():
            out[k] = out.get(k, 0) + v
        return {k: v for k, v in out.items() if v}

    def scale(self, x: dict, c) -> dict:
        return {k: v * c for k, v in x.items() if v * c}


def _eval_c_poly(poly, ring: SymbolicRing, chern):
    """Evaluate a polynomial in c1,c2,c3 at ring elements; returns {name: Fraction}."""
    total: dict = {}
    for (e1, e2, e3), coeff in poly.terms():
        val = ring.one()
        for c, e in zip(chern, (e1, e2, e3)):
            for _ in range(e):
                val = ring.mul(val, c)
        total = ring.add(total, ring.scale(val, Fraction(int(coeff.numerator), int(coeff.denominator))))
    return total


def _apply_ktilde(kt: ULaurent, gamma: dict, ring: SymbolicRing, chern) -> dict:
    """{class name: ULaurent} for the class K~ * gamma."""
    per_class: dict = {}
    for k, c in kt.terms().items():
        for part, unit in ((c.re, 1), (c.im, 1j)):
            if not part:
                continue
            if not part.denom.is_ground:
                raise AlgebraError("K~ coefficient is not polynomial in c1, c2, c3")
            poly = part.numer * (1 / part.denom.LC)
            val = ring.mul(_eval_c_poly(poly, ring, chern), gamma)
            for name, v in val.items():
                coeff = RatFunc.const(v) if unit == 1 else RatFunc.const(GaussianRational(0, v))
                per_class.setdefault(name, {})
                per_class[name][k] = per_class[name].get(k, RatFunc.const(0)) + coeff
    return {n: ULaurent.from_dict(t, kt.order) for n, t in per_class.items()}


def bar_transform(alpha, gammas, ring: SymbolicRing, chern, K) -> DescendentPoly:
    """Non-equivariant correspondence for tau_{alpha_1-1}(gamma_1)...tau_{alpha_l-1}(gamma_l).

    ``gammas`` are class names or ring elements, ``chern`` the triple of ring
    elements substituted for c1, c2, c3.  The result has symbols
    ``("bar", (ahat_string, class_name))`` meaning tau_ahat(class), with the
    diagonal expansion of tau_ahat left to the caller.
    """
    parts = [int(a) for a in alpha]
    if len(gammas) != len(parts):
        raise ValueError("need one class per part of alpha")
    gam = [ring.element(g) for g in gammas]
    for g in gam:
        for name in g:
            if ring.degrees[name] % 2:
                raise OddClassError(f"class {name} has odd degree")
    chern = [ring.element(c) for c in chern]
    # gammas pair with the parts in the order given
    rows: dict = {}
    total = DescendentPoly()
    for blocks in set_partitions(len(parts)):
        term = DescendentPoly.one(ULaurent.one())
        for b in blocks:
            sub = Partition(parts[i - 1] for i in b)
            if sub not in rows:
                rows[sub] = ktilde_row(sub, K)
            g_s = ring.one()
            for i in b:
                g_s = ring.mul(g_s, gam[i - 1])
            factor = DescendentPoly()
            for ahat, kt in sorted(rows[sub].items()):
                for name, series in sorted(_apply_ktilde(kt, g_s, ring, chern).items()):
                    factor = factor + DescendentPoly.symbol(("bar", (str(ahat), name)), series)
            term = term * factor
        total = total + term
    return total
