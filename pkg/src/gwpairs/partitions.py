"""Integer partitions, orderings on them, and set partitions."""

from __future__ import annotations

import math
from collections import Counter
from enum import Enum
from functools import lru_cache
from typing import Iterator

__all__ = [
    "Partition",
    "Ordering",
    "Comparison",
    "compare",
    "partitions_of",
    "partitions_up_to",
    "set_partitions",
    "bell_number",
    "eta_plus",
    "eta_minus",
    "sim_class",
    "one_free_partitions_up_to",
]


class Partition(tuple):
    """A weakly decreasing tuple of positive integers.

    >>> Partition([1, 3, 1])
    Partition(3,1,1)
    """

    def __new__(cls, parts=()):
        if isinstance(parts, Partition):
            return parts
        parts = tuple(int(p) for p in parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"partition parts must be positive: {parts}")
        return super().__new__(cls, sorted(parts, reverse=True))

    @classmethod
    def parse(cls, text: str) -> Partition:
        text = text.strip()
        if text in ("", "()", "empty", "0"):
            return cls(())
        return cls(int(t) for t in text.replace("(", "").replace(")", "").split(",") if t.strip())

    @property
    def size(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    @property
    def ell_plus(self) -> int:
        """Number of parts strictly larger than 1."""
        return sum(1 for p in self if p > 1)

    def multiplicities(self) -> Counter:
        return Counter(self)

    def aut_order(self) -> int:
        return math.prod(math.factorial(m) for m in Counter(self).values())

    def z(self) -> int:
        """Centralizer order of a permutation with this cycle type."""
        return self.aut_order() * math.prod(self)

    def conjugate(self) -> Partition:
        if not self:
            return self
        return Partition(sum(1 for p in self if p > j) for j in range(self[0]))

    def contains(self, other: Partition) -> bool:
        """Young-diagram containment ``other ⊆ self``."""
        if len(other) > len(self):
            return False
        return all(a >= b for a, b in zip(self, other))

    def without_ones(self) -> Partition:
        return Partition(p for p in self if p != 1)

    def ones(self) -> int:
        return sum(1 for p in self if p == 1)

    def union(self, other) -> Partition:
        return Partition(tuple(self) + tuple(other))

    def sub(self, indices) -> Partition:
        """Subpartition formed by the parts at the given 0-based positions."""
        return Partition(self[i] for i in indices)

    def __add__(self, other):
        return self.union(other)

    def __repr__(self):
        return f"Partition({str(self)})"

    def __str__(self):
        return ",".join(map(str, self)) if self else "()"


class Ordering(str, Enum):
    D = "D"
    S = "S"
    DSTAR = "Dstar"
    SIM = "SIM"


class Comparison(str, Enum):
    GREATER = "greater"
    EQUAL = "equal-rank"
    LESS = "less"
    EQUIVALENT = "equivalent"
    INCOMPARABLE = "incomparable"


def _rank(p: Partition, ordering: Ordering) -> int:
    if ordering is Ordering.D:
        return p.size - p.length
    if ordering is Ordering.S:
        return p.ell_plus
    if ordering is Ordering.DSTAR:
        return p.size + p.length
    raise ValueError(ordering)


def compare(lam, mu, ordering) -> Comparison:
    lam, mu = Partition(lam), Partition(mu)
    ordering = Ordering(ordering)
    if ordering is Ordering.SIM:
        same = lam.without_ones() == mu.without_ones()
        return Comparison.EQUIVALENT if same else Comparison.INCOMPARABLE
    a, b = _rank(lam, ordering), _rank(mu, ordering)
    if a > b:
        return Comparison.GREATER
    if a < b:
        return Comparison.LESS
    return Comparison.EQUAL


@lru_cache(maxsize=None)
def _partitions_of(n: int, largest: int) -> tuple:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions_of(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def partitions_of(n: int) -> list[Partition]:
    """Partitions of ``n`` in descending lexicographic order."""
    if n < 0:
        return []
    return [Partition(p) for p in _partitions_of(n, n)]


def partitions_up_to(d: int) -> list[Partition]:
    """All partitions of size 1..d, by size then descending lex."""
    if d < 1:
        raise ValueError("d must be at least 1")
    return [p for n in range(1, d + 1) for p in partitions_of(n)]


def one_free_partitions_up_to(d: int) -> list[Partition]:
    """Partitions of size 0..d with no part equal to 1 (the empty one included)."""
    return [p for n in range(0, d + 1) for p in partitions_of(n) if 1 not in p]


def set_partitions(n: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Set partitions of {1..n} as tuples of 1-based blocks.

    Generated from restricted growth strings, so the order is deterministic
    and each block lists its elements increasingly.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        yield ()
        return
    rgs = [0] * n

    def rec(i, top):
        if i == n:
            blocks = [[] for _ in range(top + 1)]
            for idx, b in enumerate(rgs):
                blocks[b].append(idx + 1)
            yield tuple(tuple(b) for b in blocks)
            return
        for b in range(top + 2):
            rgs[i] = b
            yield from rec(i + 1, max(top, b))

    rgs[0] = 0
    yield from rec(1, 0)


@lru_cache(maxsize=None)
def bell_number(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def eta_plus(eta, n: int) -> Partition:
    """Add ``n`` to the largest part; the empty partition becomes ``(n)``."""
    if n < 1:
        raise ValueError("N must be at least 1")
    eta = Partition(eta)
    if not eta:
        return Partition((n,))
    return Partition((eta[0] + n,) + tuple(eta[1:]))


def eta_minus(eta) -> Partition:
    """Remove the largest part."""
    eta = Partition(eta)
    return Partition(eta[1:])


def sim_class(gamma, d: int) -> list[Partition]:
    """Members of 𝒫_d equivalent to the 1-free partition ``gamma`` (gamma ∪ 1^k)."""
    gamma = Partition(gamma)
    if 1 in gamma:
        raise ValueError("gamma must not contain parts equal to 1")
    out = [gamma + (1,) * k for k in range(0, d - gamma.size + 1)]
    return [p for p in out if p.size >= 1]
