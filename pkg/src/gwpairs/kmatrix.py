"""The correspondence matrix K: storage, the part-1 extension, structural
checks, and order-by-order solving from cap/vertex series."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import permutations

from .algebra import (
    ONE,
    Q,
    S1,
    S2,
    S3,
    GaussianRational,
    I,
    RatFunc,
    ULaurent,
    expand_q_to_u,
)
from .descendents import add_part_one, monomial_partition
from .partitions import Partition, partitions_of, partitions_up_to
from .symfunc import field_det

__all__ = [
    "CorrMatrixK",
    "Violation",
    "seed_entries",
    "extend_by_part_one",
    "check_structure",
    "VertexMatrixPair",
    "solve_row",
    "SingularLeadingMatrix",
    "InconsistentSystem",
    "top_block_fixtures",
    "top_block_invertible",
    "iu_power",
]

SEED = "seed"
DERIVED = "derived-rule"
SOLVED = "solved"


def iu_power(n: int) -> ULaurent:
    """(iu)^n as an exact monomial."""
    return ULaurent.monomial(RatFunc.const(GaussianRational(0, 1) ** n), n)


class CorrMatrixK:
    """Sparse table of K entries; absent entries in stored rows are zero."""

    def __init__(self, entries=None, provenance=None, rows=None):
        self.entries: dict = dict(entries or {})
        self.provenance: dict = dict(provenance or {})
        self.rows: set = set(rows or {a for a, _ in self.entries})

    @property
    def max_degree(self) -> int:
        return max((a.size for a in self.rows), default=0)

    def row(self, alpha) -> dict:
        alpha = Partition(alpha)
        if alpha not in self.rows:
            raise KeyError(alpha)
        return {ah: v for (a, ah), v in self.entries.items() if a == alpha and not v.is_zero()}

    def get(self, alpha, alpha_hat) -> ULaurent:
        alpha, alpha_hat = Partition(alpha), Partition(alpha_hat)
        if alpha not in self.rows:
            raise KeyError(alpha)
        return self.entries.get((alpha, alpha_hat), ULaurent.zero())

    def with_row(self, alpha, row: dict, provenance: str) -> CorrMatrixK:
        alpha = Partition(alpha)
        entries = {k: v for k, v in self.entries.items() if k[0] != alpha}
        prov = {k: v for k, v in self.provenance.items() if k[0] != alpha}
        for ah, v in row.items():
            ah = Partition(ah)
            if not v.is_zero():
                entries[(alpha, ah)] = v
                prov[(alpha, ah)] = provenance
        return CorrMatrixK(entries, prov, self.rows | {alpha})

    def with_entry(self, alpha, alpha_hat, value: ULaurent, provenance: str = "manual") -> CorrMatrixK:
        alpha, alpha_hat = Partition(alpha), Partition(alpha_hat)
        entries = dict(self.entries)
        prov = dict(self.provenance)
        entries[(alpha, alpha_hat)] = value
        prov[(alpha, alpha_hat)] = provenance
        return CorrMatrixK(entries, prov, self.rows | {alpha})

    def sorted_rows(self) -> list:
        return sorted(self.rows, key=lambda p: (p.size, [-x for x in p]))

    def to_json(self) -> dict:
        records = []
        for alpha in self.sorted_rows():
            for ah, v in sorted(self.row(alpha).items(), key=lambda kv: (kv[0].size, [-x for x in kv[0]])):
                records.append(
                    {
                        "alpha": str(alpha),
                        "alpha_hat": str(ah),
                        "coeff": v.to_json(),
                        "provenance": self.provenance.get((alpha, ah), "unknown"),
                    }
                )
        return {"rows": [str(a) for a in self.sorted_rows()], "max_degree": self.max_degree, "entries": records}

    @classmethod
    def from_json(cls, data) -> CorrMatrixK:
        entries, prov = {}, {}
        for rec in data["entries"]:
            key = (Partition.parse(rec["alpha"]), Partition.parse(rec["alpha_hat"]))
            entries[key] = ULaurent.from_json(rec["coeff"])
            prov[key] = rec.get("provenance", "unknown")
        rows = {Partition.parse(r) for r in data.get("rows", [])} or {k[0] for k in entries}
        return cls(entries, prov, rows)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def seed_entries() -> CorrMatrixK:
    """Rows (1) and (2) as computed in the degree-one example."""
    one, two, ones = Partition((1,)), Partition((2,)), Partition((1, 1))
    entries = {
        (one, one): ULaurent.one(),
        (two, two): ULaurent.monomial(ONE / I, -1),
        (two, one): ULaurent.monomial((S1 + S2 + S3) / I, -1),
    }
    k = CorrMatrixK(entries, {key: SEED for key in entries}, {one, two})
    del ones  # K_{(2),(1,1)} = 0 is implicit
    return k


def extend_by_part_one(K: CorrMatrixK, max_degree: int = 4) -> CorrMatrixK:
    """Add rows (1)+alpha, (1,1)+alpha, ... up to size max_degree."""
    out = K
    frontier = sorted(K.rows, key=lambda p: p.size)
    while frontier:
        nxt = []
        for alpha in frontier:
            if alpha.size + 1 > max_degree:
                continue
            new = alpha + (1,)
            if new in out.rows:
                continue
            poly = add_part_one(alpha, out)
            row = {monomial_partition(m): c for m, c in poly.terms.items()}
            out = out.with_row(new, row, DERIVED)
            nxt.append(new)
        frontier = nxt
    return out


@dataclass(frozen=True)
class Violation:
    rule: str
    alpha: Partition
    alpha_hat: Partition
    detail: str

    def to_json(self):
        return {"rule": self.rule, "alpha": str(self.alpha), "alpha_hat": str(self.alpha_hat), "detail": self.detail}


_S_NAMES = ("s1", "s2", "s3")


def _check_entry(alpha, ah, v: ULaurent) -> list:
    out = []
    if ah == alpha:
        expected = iu_power(alpha.length - alpha.size)
        if v != expected:
            out.append(Violation("diagonal", alpha, ah, f"expected {expected}, found {v}"))
        return out
    if v.is_zero():
        return out
    if ah.size > alpha.size:
        out.append(Violation("size", alpha, ah, "entry with |alpha_hat| > |alpha|"))
    if alpha.size <= ah.size + abs(alpha.length - ah.length):
        out.append(Violation("vanishing-region", alpha, ah, "nonzero inside |a| <= |a^| + |l - l^|"))
    d, dh = alpha.size - alpha.length, ah.size - ah.length
    if d < dh:
        out.append(Violation("lower-order", alpha, ah, "nonzero although alpha is below alpha_hat in |.|-l(.)"))
    elif d == dh:
        out.append(Violation("equal-rank", alpha, ah, "nonzero off-diagonal entry with equal |.|-l(.)"))
    if alpha.size + alpha.length <= ah.size + ah.length:
        out.append(Violation("star-order", alpha, ah, "nonzero although |a|+l(a) <= |a^|+l(a^)"))
    degree = alpha.size + alpha.length - ah.size - ah.length
    for k, c in v.terms().items():
        if not c.is_polynomial():
            out.append(Violation("polynomial", alpha, ah, f"u^{k} coefficient {c} has a denominator"))
        if not c.free_of("q"):
            out.append(Violation("polynomial", alpha, ah, f"u^{k} coefficient {c} depends on q"))
        deg = c.homogeneous_degree(_S_NAMES)
        if deg != degree:
            out.append(Violation("homogeneity", alpha, ah, f"u^{k} coefficient {c} is not homogeneous of degree {degree}"))
        for perm in permutations(range(3)):
            if c.permute(perm) != c:
                out.append(Violation("symmetry", alpha, ah, f"u^{k} coefficient {c} changes under {perm}"))
                break
    return out


def check_structure(K: CorrMatrixK) -> list:
    """All constraint violations over stored rows; empty when K passes."""
    violations = []
    for alpha in K.sorted_rows():
        row = K.row(alpha)
        candidates = set(row) | {alpha}
        for ah in sorted(candidates, key=lambda p: (p.size, [-x for x in p])):
            violations.extend(_check_entry(alpha, ah, K.get(alpha, ah)))
    return violations


# ---------------------------------------------------------------------------
# solving from cap/vertex data


class SingularLeadingMatrix(ArithmeticError):
    pass


class InconsistentSystem(ArithmeticError):
    pass


@dataclass
class VertexMatrixPair:
    """Stable-pairs and GW series indexed by (descendent partition, relative partition)."""

    d: int
    c_p: dict = field(default_factory=dict)
    c_gw: dict = field(default_factory=dict)

    def columns(self, alpha) -> list:
        alpha = Partition(alpha)
        cols = {lam for (a, lam) in self.c_p if a == alpha}
        return sorted(cols, key=lambda p: (p.size, [-x for x in p]))


def _solve_left(g0, rhs):
    """Solve x * g0 = rhs for the row vector x over a field of RatFunc."""
    n_unk = len(g0)
    n_col = len(rhs)
    # transpose: A x = b with A[c][u] = g0[u][c]
    aug = [[g0[u][c] for u in range(n_unk)] + [rhs[c]] for c in range(n_col)]
    piv_cols = []
    r = 0
    for col in range(n_unk):
        piv = next((i for i in range(r, n_col) if not aug[i][col].is_zero()), None)
        if piv is None:
            raise SingularLeadingMatrix(f"leading coefficient matrix is singular in column {col}")
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = aug[r][col].inverse()
        aug[r] = [x * inv for x in aug[r]]
        for i in range(n_col):
            if i != r and not aug[i][col].is_zero():
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        piv_cols.append(col)
        r += 1
    for i in range(r, n_col):
        if not aug[i][-1].is_zero():
            raise InconsistentSystem("overdetermined system has no solution at this order")
    return [aug[i][-1] for i in range(n_unk)]


def solve_row(alpha, data: VertexMatrixPair, order: int, known=None, unknowns=None) -> dict:
    """Solve sum_ahat K[alpha, ahat] C_GW(ahat, lam) = b_lam order by order in u.

    b_lam = expand((-q)^-|lam| C_P(alpha, lam)) * (-iu)^-(|lam|+l(lam)).
    Entries in ``known`` are moved to the right side.  Returns the unknown
    entries truncated at ``order`` (or lower if the data are shorter).
    """
    alpha = Partition(alpha)
    known = {Partition(k): v for k, v in (known or {}).items()}
    cols = data.columns(alpha)
    if unknowns is None:
        unknowns = [p for p in partitions_up_to(data.d) if p not in known and p.size <= alpha.size]
    unknowns = sorted((Partition(p) for p in unknowns), key=lambda p: (p.size, [-x for x in p]))
    if not cols:
        raise InconsistentSystem(f"no data columns for {alpha}")

    zero = ULaurent.zero()
    val = {}
    for lam in cols:
        vs = [data.c_gw.get((ah, lam), zero).valuation for ah in unknowns]
        v = min(vs)
        if v == float("inf"):
            raise SingularLeadingMatrix(f"column {lam} has no GW data for the unknowns")
        val[lam] = int(v)

    b = {}
    for lam in cols:
        k = lam.size + lam.length
        exp_order = max(0, order + k + val[lam] + 2)
        lhs = expand_q_to_u((-Q) ** (-lam.size) * data.c_p[(alpha, lam)], exp_order)
        scale = ULaurent.monomial(RatFunc.const(GaussianRational(0, -1) ** (-k)), -k)
        rhs = lhs * scale
        for ah, kv in known.items():
            g = data.c_gw.get((ah, lam))
            if g is not None and not kv.is_zero():
                rhs = rhs - kv * g
        b[lam] = rhs.shift(-val[lam])
    g = {(ah, lam): data.c_gw.get((ah, lam), zero).shift(-val[lam]) for ah in unknowns for lam in cols}

    n0 = min(int(x.valuation) if x.coeffs else x.order + 1 for x in b.values())
    top = order
    for lam in cols:
        if b[lam].order is not None:
            top = min(top, b[lam].order)
        for ah in unknowns:
            o = g[(ah, lam)].order
            if o is not None:
                top = min(top, o + n0)
    g0 = [[g[(ah, lam)].coeff(0) for lam in cols] for ah in unknowns]
    sol = {ah: {} for ah in unknowns}
    for n in range(n0, top + 1):
        rhs = []
        for lam in cols:
            r = b[lam].coeff(n)
            for j in range(1, n - n0 + 1):
                for ah in unknowns:
                    kc = sol[ah].get(n - j)
                    if kc is not None and not kc.is_zero():
                        r = r - kc * g[(ah, lam)].coeff(j)
            rhs.append(r)
        xs = _solve_left(g0, rhs)
        for ah, x in zip(unknowns, xs):
            sol[ah][n] = x
    return {ah: ULaurent.from_dict(terms, top) for ah, terms in sol.items()}


# ---------------------------------------------------------------------------
# invertibility of the top-degree stable-pairs block after s3 = 0


def top_block_fixtures() -> dict:
    """Top-degree stable-pairs blocks for d = 1, 2.

    d = 1: tau_0(N_0) against (1) is q.  d = 2: the diagonal comes from the
    one-part cap formula and the divisor equation applied to the tube
    1/(2 (s1 s2)^2) q^2; the single lower-triangular entry is synthetic.
    """
    p1, p2, p11 = Partition((1,)), Partition((2,)), Partition((1, 1))
    return {
        1: {(p1, p1): Q},
        2: {
            (p2, p2): Q**2 / 2,
            (p2, p11): Q**2 / 2,
            (p11, p11): 4 * Q**2 / (2 * (S1 * S2) ** 2),
        },
    }


def top_block_invertible(block: dict, d: int) -> bool:
    parts = partitions_of(d)
    mat = [[block.get((a, lam), RatFunc.const(0)).subs({"s3": 0}) for lam in parts] for a in parts]
    det = field_det(mat)
    return not det.is_zero()
