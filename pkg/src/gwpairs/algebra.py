"""Exact arithmetic kernel.

Gaussian rationals, rational functions in the equivariant weights
``s1, s2, s3`` (and the pairs variable ``q``) over Q(i), truncated Laurent
series in ``u``, and the substitution ``-q = exp(iu)``.

Rational functions are stored as ``re + i*im`` where both parts live in a
sympy sparse fraction field over QQ.  sympy cancels common factors and
normalises signs, so equality is syntactic.  Working over QQ rather than
QQ_I keeps multivariate gcds fast.
"""

from __future__ import annotations

import ast
import math
from fractions import Fraction
from numbers import Rational

from sympy.polys.domains import QQ
from sympy.polys.fields import field

__all__ = [
    "GaussianRational",
    "RatFunc",
    "ULaurent",
    "FIELD_S",
    "FIELD_C",
    "S1",
    "S2",
    "S3",
    "Q",
    "I",
    "ONE",
    "ZERO",
    "C1",
    "C2",
    "C3",
    "expand_q_to_u",
    "series_pow",
    "derivative_u",
    "sin_half_ratio",
    "parse_expr",
    "AlgebraError",
    "TruncationError",
]


class AlgebraError(ArithmeticError):
    pass


class TruncationError(AlgebraError):
    """Raised when a result would need coefficients beyond the known window."""


FIELD_S, _s1, _s2, _s3, _q = field("s1,s2,s3,q", QQ)
FIELD_C, _c1, _c2, _c3 = field("c1,c2,c3", QQ)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    # gmpy mpq and sympy PythonMPQ both expose numerator/denominator
    return Fraction(int(x.numerator), int(x.denominator))


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class GaussianRational:
    """An element ``re + i*im`` of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def coerce(cls, x) -> GaussianRational:
        if isinstance(x, GaussianRational):
            return x
        return cls(x, 0)

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        p = self * o.conjugate()
        return GaussianRational(p.re / n, p.im / n)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return GaussianRational(1) / (self ** (-n))
        result = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{_fmt_imag(self.im)}"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re} {sign} {_fmt_imag(abs(self.im))})"

    def to_json(self) -> dict:
        return {"re": _frac_str(self.re), "im": _frac_str(self.im)}

    @classmethod
    def from_json(cls, data) -> GaussianRational:
        return cls(Fraction(data["re"]), Fraction(data["im"]))


def _fmt_imag(x: Fraction) -> str:
    if x == 1:
        return "i"
    if x == -1:
        return "-i"
    return f"{x}*i"


class RatFunc:
    """Rational function over Q(i) in the generators of a sympy field.

    The default field has generators ``s1, s2, s3, q``.  A second field with
    generators ``c1, c2, c3`` carries the Chern-class form of coefficients.
    Values are immutable; every operation returns a new instance.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im=None):
        self.re = re
        self.im = re.field.zero if im is None else im

    # construction -----------------------------------------------------

    @classmethod
    def const(cls, x, fld=FIELD_S) -> RatFunc:
        if isinstance(x, RatFunc):
            return x
        g = GaussianRational.coerce(x)
        return cls(fld(QQ(g.re.numerator, g.re.denominator)), fld(QQ(g.im.numerator, g.im.denominator)))

    @classmethod
    def gen(cls, name: str, fld=FIELD_S) -> RatFunc:
        return cls(fld.gens[fld.symbols.index(_symbol(fld, name))])

    @property
    def field(self):
        return self.re.field

    def _coerce(self, other) -> RatFunc:
        if isinstance(other, RatFunc):
            if other.re.field != self.re.field:
                raise AlgebraError("operands live in different fields")
            return other
        if isinstance(other, (int, Fraction, GaussianRational)) or isinstance(other, Rational):
            return RatFunc.const(other, self.field)
        raise TypeError(f"cannot coerce {type(other).__name__} to RatFunc")

    # arithmetic -------------------------------------------------------

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return RatFunc(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return RatFunc(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not self.im and not o.im:
            return RatFunc(self.re * o.re)
        return RatFunc(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self) -> RatFunc:
        return RatFunc(self.re, -self.im)

    def inverse(self) -> RatFunc:
        if self.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        if not self.im:
            return RatFunc(1 / self.re)
        n = self.re * self.re + self.im * self.im
        return RatFunc(self.re / n, -self.im / n)

    def __truediv__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if not self.im:
            return RatFunc(self.re**n)
        result = RatFunc.const(1, self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, AlgebraError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def __bool__(self):
        return not self.is_zero()

    # structure --------------------------------------------------------

    def is_real(self) -> bool:
        return not self.im

    def is_constant(self) -> bool:
        return all(p.is_ground for p in (self.re.numer, self.re.denom, self.im.numer, self.im.denom))

    def constant_value(self) -> GaussianRational:
        if not self.is_constant():
            raise AlgebraError(f"{self} is not a constant")
        return GaussianRational(_ground(self.re), _ground(self.im))

    def is_polynomial(self) -> bool:
        return self.re.denom.is_ground and self.im.denom.is_ground

    def variables(self) -> set[str]:
        """Names of generators that actually occur."""
        names = set()
        syms = [str(s) for s in self.field.symbols]
        for part in (self.re.numer, self.re.denom, self.im.numer, self.im.denom):
            for monom in part.monoms():
                for name, e in zip(syms, monom):
                    if e:
                        names.add(name)
        return names

    def free_of(self, *names: str) -> bool:
        return not (self.variables() & set(names))

    def homogeneous_degree(self, names=("s1", "s2", "s3")):
        """Total degree in ``names`` if homogeneous, ``None`` otherwise.

        The zero function returns ``None`` too; callers treat zero separately.
        """
        if self.is_zero():
            return None
        syms = [str(s) for s in self.field.symbols]
        idx = [syms.index(n) for n in names]
        degs = set()
        for part in (self.re, self.im):
            if not part:
                continue
            dn = {sum(m[i] for i in idx) for m in part.numer.monoms()}
            dd = {sum(m[i] for i in idx) for m in part.denom.monoms()}
            if len(dn) != 1 or len(dd) != 1:
                return None
            degs.add(dn.pop() - dd.pop())
        if len(degs) != 1:
            return None
        return degs.pop()

    def permute(self, perm, names=("s1", "s2", "s3")) -> RatFunc:
        """Apply the variable permutation ``names[k] -> names[perm[k]]``."""
        syms = [str(s) for s in self.field.symbols]
        idx = [syms.index(n) for n in names]

        def act(poly):
            ring = poly.ring
            out = {}
            for monom, coeff in poly.terms():
                m = list(monom)
                for k, src in enumerate(idx):
                    m[idx[perm[k]]] = monom[src]
                out[tuple(m)] = coeff
            return ring.from_dict(out)

        def act_frac(f):
            return self.field(act(f.numer)) / self.field(act(f.denom))

        return RatFunc(act_frac(self.re), act_frac(self.im))

    def subs(self, mapping: dict) -> RatFunc:
        """Simultaneous substitution of real rational values for generators."""
        fld = self.field
        syms = [str(s) for s in fld.symbols]
        pairs = []
        dens = []
        # clear denominators of the images: substitute numerators and track scale
        for name, value in mapping.items():
            v = value if isinstance(value, RatFunc) else RatFunc.const(value, fld)
            if not v.is_real():
                raise AlgebraError("only real substitutions are supported")
            pairs.append((fld.ring.gens[syms.index(name)], v.re))
            dens.append(v.re)

        def sub_frac(f):
            if not f:
                return f
            return _sub_poly(f.numer, pairs, fld) / _sub_poly(f.denom, pairs, fld)

        try:
            return RatFunc(sub_frac(self.re), sub_frac(self.im))
        except ZeroDivisionError as exc:
            raise ZeroDivisionError(f"substitution {mapping} makes a denominator vanish") from exc

    # i/o --------------------------------------------------------------

    def combined(self):
        """Return ``(numerator_terms, denominator)``.

        The numerator is a Gaussian polynomial given as a dict from exponent
        tuple to :class:`GaussianRational`; the denominator is a real
        polynomial (sympy ``PolyElement``).
        """
        ring = self.field.ring
        a, b = self.re.numer, self.re.denom
        c, d = self.im.numer, self.im.denom
        g = b.gcd(d)
        den = (b * d).quo(g)
        re_num = a * den.quo(b)
        im_num = c * den.quo(d)
        terms: dict = {}
        for m, co in re_num.terms():
            terms[m] = GaussianRational(_frac(co), 0)
        for m, co in im_num.terms():
            terms[m] = terms.get(m, GaussianRational()) + GaussianRational(0, _frac(co))
        del ring
        return terms, den

    def to_json(self) -> dict:
        num, den = self.combined()
        return {
            "vars": [str(s) for s in self.field.symbols],
            "num": [[list(m), c.to_json()] for m, c in sorted(num.items(), reverse=True)],
            "den": [[list(m), _frac_str(_frac(c))] for m, c in sorted(den.terms(), reverse=True)],
        }

    @classmethod
    def from_json(cls, data) -> RatFunc:
        names = tuple(data["vars"])
        fld = FIELD_C if names == ("c1", "c2", "c3") else FIELD_S
        if tuple(str(s) for s in fld.symbols) != names:
            raise AlgebraError(f"unknown variable set {names}")
        ring = fld.ring
        re = ring.from_dict({tuple(m): QQ(*_nd(c["re"])) for m, c in data["num"]})
        im = ring.from_dict({tuple(m): QQ(*_nd(c["im"])) for m, c in data["num"]})
        den = ring.from_dict({tuple(m): QQ(*_nd(c)) for m, c in data["den"]})
        return cls(fld(re) / fld(den), fld(im) / fld(den))

    def __str__(self):
        if not self.im:
            return _fstr(self.re)
        if not self.re:
            return f"i*({_fstr(self.im)})"
        return f"({_fstr(self.re)}) + i*({_fstr(self.im)})"

    def __repr__(self):
        return f"RatFunc({self})"


def _nd(s: str):
    f = Fraction(s)
    return f.numerator, f.denominator


def _fstr(f) -> str:
    return str(f.as_expr()).replace("**", "^")


def _ground(f) -> Fraction:
    if not f:
        return Fraction(0)
    return _frac(f.numer.LC) / _frac(f.denom.LC)


def _symbol(fld, name):
    for s in fld.symbols:
        if str(s) == name:
            return s
    raise AlgebraError(f"no generator named {name!r}")


def _sub_poly(poly, pairs, fld):
    # compose accepts polynomial images only, so clear image denominators by
    # homogenising each monomial's contribution term by term.
    if all(img.denom.is_ground for _, img in pairs):
        ring = fld.ring
        return fld(poly.compose([(g, img.numer * (1 / img.denom.LC)) for g, img in pairs]))
    out = fld.zero
    gens = fld.ring.gens
    index = {g: k for k, g in enumerate(gens)}
    for monom, coeff in poly.terms():
        term = fld(coeff)
        m = list(monom)
        for g, img in pairs:
            k = index[g]
            if m[k]:
                term *= img ** m[k]
                m[k] = 0
        term *= fld(fld.ring.from_dict({tuple(m): QQ(1)}))
        out += term
    return out


S1 = RatFunc.gen("s1")
S2 = RatFunc.gen("s2")
S3 = RatFunc.gen("s3")
Q = RatFunc.gen("q")
ONE = RatFunc.const(1)
ZERO = RatFunc.const(0)
I = RatFunc.const(GaussianRational(0, 1))
C1 = RatFunc.gen("c1", FIELD_C)
C2 = RatFunc.gen("c2", FIELD_C)
C3 = RatFunc.gen("c3", FIELD_C)


# ---------------------------------------------------------------------------
# truncated Laurent series in u


def _to_coeff(x, fld=FIELD_S) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    return RatFunc.const(x, fld)


_INF = math.inf


class ULaurent:
    """Laurent series in ``u`` with rational-function coefficients.

    ``order`` is the highest power whose coefficient is known; everything
    above it is unknown (not zero).  ``order=None`` marks an exact Laurent
    polynomial.  Only the span of nonzero coefficients is stored.
    """

    __slots__ = ("min_pow", "coeffs", "order", "field")

    def __init__(self, min_pow: int, coeffs, order=None, fld=None):
        coeffs = [_to_coeff(c, fld or FIELD_S) for c in coeffs]
        if fld is None:
            fld = coeffs[0].field if coeffs else FIELD_S
        if order is not None:
            keep = max(0, order - min_pow + 1)
            coeffs = coeffs[:keep]
        start = 0
        while start < len(coeffs) and coeffs[start].is_zero():
            start += 1
        end = len(coeffs)
        while end > start and coeffs[end - 1].is_zero():
            end -= 1
        self.min_pow = min_pow + start if end > start else 0
        self.coeffs = tuple(coeffs[start:end])
        self.order = order
        self.field = fld

    # constructors -----------------------------------------------------

    @classmethod
    def monomial(cls, coeff, power: int, order=None, fld=None) -> ULaurent:
        c = _to_coeff(coeff, fld or (coeff.field if isinstance(coeff, RatFunc) else FIELD_S))
        return cls(power, [c], order, c.field)

    @classmethod
    def zero(cls, order=None, fld=FIELD_S) -> ULaurent:
        return cls(0, [], order, fld)

    @classmethod
    def one(cls, order=None, fld=FIELD_S) -> ULaurent:
        return cls(0, [RatFunc.const(1, fld)], order, fld)

    @classmethod
    def from_dict(cls, terms: dict, order=None, fld=None) -> ULaurent:
        if not terms:
            return cls.zero(order, fld or FIELD_S)
        lo, hi = min(terms), max(terms)
        sample = next(iter(terms.values()))
        fld = fld or (sample.field if isinstance(sample, RatFunc) else FIELD_S)
        zero = RatFunc.const(0, fld)
        return cls(lo, [terms.get(k, zero) for k in range(lo, hi + 1)], order, fld)

    # basic accessors --------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.order is None

    @property
    def max_pow(self) -> int:
        return self.min_pow + len(self.coeffs) - 1

    @property
    def valuation(self):
        """Lowest power with nonzero coefficient; past ``order`` if none known."""
        if self.coeffs:
            return self.min_pow
        return _INF if self.order is None else self.order + 1

    def _ord(self):
        return _INF if self.order is None else self.order

    def coeff(self, k: int) -> RatFunc:
        if self.order is not None and k > self.order:
            raise TruncationError(f"coefficient of u^{k} is beyond truncation order {self.order}")
        j = k - self.min_pow
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return RatFunc.const(0, self.field)

    def terms(self) -> dict:
        return {self.min_pow + j: c for j, c in enumerate(self.coeffs) if not c.is_zero()}

    def is_zero(self) -> bool:
        return not self.coeffs

    def truncate(self, order: int) -> ULaurent:
        new = order if self.order is None else min(order, self.order)
        return ULaurent(self.min_pow, self.coeffs, new, self.field)

    def map_coeffs(self, fn) -> ULaurent:
        return ULaurent.from_dict({k: fn(c) for k, c in self.terms().items()}, self.order, self.field)

    # arithmetic -------------------------------------------------------

    def _coerce(self, other) -> ULaurent:
        if isinstance(other, ULaurent):
            return other
        if isinstance(other, (RatFunc, int, Fraction, GaussianRational)) or isinstance(other, Rational):
            return ULaurent.monomial(_to_coeff(other, self.field), 0)
        raise TypeError(f"cannot coerce {type(other).__name__} to ULaurent")

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        order = _fin(min(self._ord(), o._ord()))
        terms = dict(self.terms())
        for k, c in o.terms().items():
            terms[k] = terms[k] + c if k in terms else c
        return ULaurent.from_dict(terms, order, self.field)

    __radd__ = __add__

    def __neg__(self):
        return ULaurent(self.min_pow, [-c for c in self.coeffs], self.order, self.field)

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, ULaurent):
            try:
                c = _to_coeff(other, self.field)
            except TypeError:
                return NotImplemented
            if isinstance(other, RatFunc) or isinstance(other, (int, Fraction, GaussianRational)):
                return ULaurent(self.min_pow, [x * c for x in self.coeffs], self.order, self.field)
            return NotImplemented
        o = other
        order = _fin(min(self._ord() + o.valuation, o._ord() + self.valuation))
        if not self.coeffs or not o.coeffs:
            return ULaurent.zero(order, self.field)
        lo = self.min_pow + o.min_pow
        hi = self.max_pow + o.max_pow
        if order is not None:
            hi = min(hi, order)
        out = []
        for k in range(lo, hi + 1):
            acc = None
            for i, a in enumerate(self.coeffs):
                j = k - lo - i
                if 0 <= j < len(o.coeffs):
                    b = o.coeffs[j]
                    if a.is_zero() or b.is_zero():
                        continue
                    acc = a * b if acc is None else acc + a * b
            out.append(acc if acc is not None else RatFunc.const(0, self.field))
        return ULaurent(lo, out, order, self.field)

    def __rmul__(self, other):
        return self.__mul__(other)

    def inverse(self, order=None) -> ULaurent:
        """Multiplicative inverse.

        For truncated input the relative precision is preserved.  Exact input
        with more than one term has an infinite inverse and needs ``order``.
        """
        if not self.coeffs:
            raise ZeroDivisionError("leading coefficient vanishes through the truncation window")
        m = self.min_pow
        c0 = self.coeffs[0]
        if self.exact and len(self.coeffs) == 1 and order is None:
            return ULaurent.monomial(c0.inverse(), -m)
        if order is None:
            order = self.order - 2 * m
        elif self.order is not None:
            order = min(order, self.order - 2 * m)
        n_terms = order + m + 1
        if n_terms <= 0:
            return ULaurent.zero(order, self.field)
        inv0 = c0.inverse()
        b = [inv0]
        a = self.coeffs
        for n in range(1, n_terms):
            acc = None
            for k in range(1, min(n, len(a) - 1) + 1):
                t = a[k] * b[n - k]
                acc = t if acc is None else acc + t
            b.append(RatFunc.const(0, self.field) if acc is None else -(acc * inv0))
        return ULaurent(-m, b, order, self.field)

    def __truediv__(self, other):
        if not isinstance(other, ULaurent):
            try:
                c = _to_coeff(other, self.field)
            except TypeError:
                return NotImplemented
            ci = c.inverse()
            return ULaurent(self.min_pow, [x * ci for x in self.coeffs], self.order, self.field)
        if other.exact and len(other.coeffs) == 1:
            return self * other.inverse()
        if self.exact and other.exact:
            raise TruncationError("quotient of exact series needs an explicit truncation; use .div(order=...)")
        if self.exact:
            return self * other.inverse()
        rel = self.order - self.valuation if self.coeffs else 0
        return self * other.inverse(order=rel - other.valuation)

    def div(self, other: ULaurent, order: int) -> ULaurent:
        """Quotient truncated at ``order``."""
        rel = order - (self.valuation - other.valuation) if self.coeffs else 0
        inv = other.inverse(order=rel - other.valuation)
        return (self * inv).truncate(order)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = ULaurent.one(None, self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, k: int) -> ULaurent:
        """Multiply by ``u**k``."""
        order = None if self.order is None else self.order + k
        return ULaurent(self.min_pow + k, self.coeffs, order, self.field)

    def derivative(self) -> ULaurent:
        return derivative_u(self)

    def subs(self, mapping: dict) -> ULaurent:
        return self.map_coeffs(lambda c: c.subs(mapping))

    def permute(self, perm) -> ULaurent:
        return self.map_coeffs(lambda c: c.permute(perm))

    # comparison -------------------------------------------------------

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        top = min(self._ord(), o._ord())
        a, b = self.terms(), o.terms()
        for k in set(a) | set(b):
            if k > top:
                continue
            if a.get(k, None) != b.get(k, None):
                if k in a and k in b:
                    return False
                if (a.get(k) or b.get(k)).is_zero():
                    continue
                return False
        return True

    __hash__ = None

    def first_difference(self, other):
        """Lowest power where ``self`` and ``other`` disagree, or ``None``."""
        diff = self - self._coerce(other)
        return diff.min_pow if diff.coeffs else None

    # i/o --------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "min_pow": self.min_pow,
            "truncation": self.order,
            "coeffs": [c.to_json() for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data) -> ULaurent:
        coeffs = [RatFunc.from_json(c) for c in data["coeffs"]]
        fld = coeffs[0].field if coeffs else FIELD_S
        return cls(data["min_pow"], coeffs, data["truncation"], fld)

    def __str__(self):
        parts = []
        for k, c in self.terms().items():
            cs = str(c)
            if k == 0:
                parts.append(f"({cs})")
            elif k == 1:
                parts.append(f"({cs})*u")
            else:
                parts.append(f"({cs})*u^{k}")
        body = " + ".join(parts) if parts else "0"
        if self.order is not None:
            body += f" + O(u^{self.order + 1})"
        return body

    def __repr__(self):
        return f"ULaurent({self})"


def _fin(x):
    return None if x == _INF else int(x)


# ---------------------------------------------------------------------------
# named series


def _exp_i_series(k: int, order: int) -> list[GaussianRational]:
    """Coefficients of exp(i*k*u) for powers 0..order."""
    out = []
    term = GaussianRational(1)
    ik = GaussianRational(0, k)
    for j in range(order + 1):
        if j:
            term = term * ik / j
        out.append(term)
    return out


def sin_half_ratio(order: int, fld=FIELD_S) -> ULaurent:
    """The series ``(u/2) / sin(u/2)`` through ``u**order``."""
    # sin(x)/x with x = u/2 has coefficient (-1)^k / (2k+1)! / 4^k at u^{2k}
    terms = {}
    for k in range(order // 2 + 1):
        terms[2 * k] = RatFunc.const(Fraction((-1) ** k, math.factorial(2 * k + 1) * 4**k), fld)
    sinc = ULaurent.from_dict(terms, order, fld)
    return sinc.inverse()


# ---------------------------------------------------------------------------
# the variable change -q = exp(iu)


def _poly_in_q(poly):
    """Split a polynomial in (s1,s2,s3,q) into {q-power: s-polynomial}."""
    ring = poly.ring
    qi = len(ring.gens) - 1
    out: dict = {}
    for monom, coeff in poly.terms():
        k = monom[qi]
        m = monom[:qi] + (0,)
        out.setdefault(k, {})[m] = coeff
    return {k: ring.from_dict(v) for k, v in out.items()}


def _divide_by_q_plus_one(parts: dict):
    """Synthetic division of sum_k parts[k] q^k by (q + 1); returns (quotient, remainder)."""
    ring = next(iter(parts.values())).ring
    deg = max(parts)
    coeffs = [parts.get(k, ring.zero) for k in range(deg + 1)]
    # Horner from the top: dividing by q - (-1)
    quot = [ring.zero] * deg
    carry = ring.zero
    for k in range(deg, -1, -1):
        carry = coeffs[k] - carry if k < deg else coeffs[k]
        if k == 0:
            return quot, carry
        quot[k - 1] = carry
    return quot, carry


def _q_poly_series(parts: dict, order: int) -> ULaurent:
    """Series of sum_k c_k(s) q^k under q = -exp(iu), through u^order."""
    fld = FIELD_S
    re_terms = [fld.zero] * (order + 1)
    im_terms = [fld.zero] * (order + 1)
    for k, c in parts.items():
        if not c:
            continue
        cf = fld(c)
        sign = -1 if k % 2 else 1
        for j, g in enumerate(_exp_i_series(k, order)):
            if g.re:
                re_terms[j] += cf * QQ(sign * g.re.numerator, g.re.denominator)
            if g.im:
                im_terms[j] += cf * QQ(sign * g.im.numerator, g.im.denominator)
    return ULaurent(0, [RatFunc(r, i) for r, i in zip(re_terms, im_terms)], order)


def _expand_real(f, order: int, pole_limit: int) -> ULaurent:
    if not f:
        return ULaurent.zero(order)
    num = _poly_in_q(f.numer)
    den = _poly_in_q(f.denom)
    m = 0
    while max(den) > 0:
        quot, rem = _divide_by_q_plus_one(den)
        if rem:
            break
        den = {k: c for k, c in enumerate(quot) if c}
        m += 1
        if m > pole_limit:
            raise AlgebraError(f"pole at q = -1 exceeds the limit of order {pole_limit}")
    work = order + m
    n_ser = _q_poly_series(num, work)
    d_ser = _q_poly_series(den, work)
    ratio = n_ser.div(d_ser, work)
    if m == 0:
        return ratio.truncate(order)
    # 1 + q = 1 - exp(iu) = -iu * g(u) with g = (exp(iu) - 1)/(iu)
    g_terms = {j: RatFunc.const(GaussianRational(0, 1) ** j / math.factorial(j + 1)) for j in range(work + 1)}
    g = ULaurent.from_dict(g_terms, work)
    lead = ULaurent.monomial(RatFunc.const(GaussianRational(0, -1)), 1)
    pole = (lead * g) ** m
    return ratio.div(pole, order)


def expand_q_to_u(f: RatFunc, order: int, pole_limit: int = 8) -> ULaurent:
    """Substitute ``q = -exp(iu)`` into ``f`` and expand through ``u**order``.

    ``f`` may carry coefficients in ``s1, s2, s3``; a pole at ``q = -1`` of
    order at most ``pole_limit`` becomes a pole at ``u = 0``.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    if not isinstance(f, RatFunc):
        f = RatFunc.const(f)
    re = _expand_real(f.re, order, pole_limit)
    if not f.im:
        return re
    im = _expand_real(f.im, order, pole_limit)
    return re + im * I


def series_pow(f: ULaurent, x, order: int) -> ULaurent:
    """``f ** x`` for a series with constant term 1, through ``u**order``.

    Uses the recurrence obtained from ``f * P' = x * f' * P``.
    """
    fld = f.field
    x = _to_coeff(x, fld)
    if f.min_pow < 0 or f.coeff(0) != RatFunc.const(1, fld):
        raise AlgebraError("series_pow needs a series with constant term 1")
    if f.order is not None:
        order = min(order, f.order)
    if x.is_zero():
        return ULaurent.one(order, fld)
    a = [f.coeff(k) for k in range(order + 1)]
    p = [RatFunc.const(1, fld)]
    xp1 = x + 1
    for n in range(1, order + 1):
        acc = RatFunc.const(0, fld)
        for k in range(1, n + 1):
            if a[k].is_zero():
                continue
            acc = acc + (xp1 * k - n) * a[k] * p[n - k]
        p.append(acc / n)
    return ULaurent(0, p, order, fld)


def derivative_u(f: ULaurent) -> ULaurent:
    terms = {k - 1: c * k for k, c in f.terms().items() if k != 0}
    order = None if f.order is None else f.order - 1
    return ULaurent.from_dict(terms, order, f.field)


# ---------------------------------------------------------------------------
# small expression grammar for the command line

_NAMES = {"i": I, "q": Q, "s1": S1, "s2": S2, "s3": S3}


def parse_expr(text: str) -> RatFunc:
    """Parse rationals, ``i, q, s1, s2, s3``, ``+ - * / ^`` and parentheses."""
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return RatFunc.const(node.value)
        if isinstance(node, ast.Name):
            if node.id not in _NAMES:
                raise ValueError(f"unknown symbol {node.id!r}")
            return _NAMES[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            left = ev(node.left)
            if isinstance(node.op, ast.Pow):
                exp = node.right
                sign = 1
                if isinstance(exp, ast.UnaryOp) and isinstance(exp.op, ast.USub):
                    sign, exp = -1, exp.operand
                if not (isinstance(exp, ast.Constant) and isinstance(exp.value, int)):
                    raise ValueError("exponents must be integer literals")
                return left ** (sign * exp.value)
            right = ev(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                return left / right
        raise ValueError(f"unsupported expression element: {ast.dump(node)}")

    return ev(tree)
