"""Capped localization: toric graph data, capped markings, gluing factors,
the assembly sum, and the degeneration pairing.

Capped vertex and capped edge series come from a :class:`BlockProvider`;
nothing here invents building blocks.  Stable-pairs values are
:class:`RatFunc` in ``q``, Gromov-Witten values are :class:`ULaurent`.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol

from .algebra import ONE, Q, RatFunc, ULaurent, parse_expr
from .partitions import Partition, partitions_of

__all__ = [
    "Vertex",
    "Edge",
    "Leg",
    "ToricGraph",
    "Marking",
    "MarkingError",
    "IsolatedDescendentError",
    "UnsupportedInput",
    "BlockProvider",
    "KroneckerEdgeProvider",
    "ClosedFormCapProvider",
    "enumerate_markings",
    "edge_degree_vectors",
    "gluing_P",
    "gluing_GW",
    "gluing",
    "assemble",
    "degeneration_kernel",
    "degenerate_combine",
]

PT, GW = "pt", "gw"


class MarkingError(ValueError):
    pass


class IsolatedDescendentError(ValueError):
    """A vertex carries descendents but all three relative conditions are empty."""


class UnsupportedInput(LookupError):
    pass


@dataclass(frozen=True)
class Vertex:
    name: str
    weights: tuple  # three RatFunc tangent weights

    def weight_product(self) -> RatFunc:
        w = self.weights
        return w[0] * w[1] * w[2]


@dataclass(frozen=True)
class Edge:
    """Compact edge joining slot ``slot_a`` of ``a`` with slot ``slot_b`` of ``b``."""

    name: str
    a: str
    slot_a: int
    b: str
    slot_b: int
    cls: tuple  # ((generator, coefficient), ...)

    def class_dict(self) -> dict:
        return dict(self.cls)

    def halves(self):
        return ((self.name, self.a, self.slot_a), (self.name, self.b, self.slot_b))


@dataclass(frozen=True)
class Leg:
    """Noncompact edge at a vertex slot with a fixed relative condition."""

    vertex: str
    slot: int
    partition: Partition


@dataclass
class ToricGraph:
    vertices: list
    edges: list = field(default_factory=list)
    legs: list = field(default_factory=list)

    def __post_init__(self):
        names = [v.name for v in self.vertices]
        if len(set(names)) != len(names):
            raise MarkingError("duplicate vertex names")
        used = set()
        for e in self.edges:
            for _, v, s in e.halves():
                self._claim(used, v, s, names)
        for leg in self.legs:
            self._claim(used, leg.vertex, leg.slot, names)

    @staticmethod
    def _claim(used, v, s, names):
        if v not in names:
            raise MarkingError(f"unknown vertex {v}")
        if s not in (0, 1, 2):
            raise MarkingError(f"slot {s} out of range")
        if (v, s) in used:
            raise MarkingError(f"half-edge slot {(v, s)} used twice")
        used.add((v, s))

    def vertex(self, name) -> Vertex:
        return next(v for v in self.vertices if v.name == name)

    def generators(self) -> set:
        return {g for e in self.edges for g, _ in e.cls}

    @classmethod
    def from_json(cls, data) -> ToricGraph:
        verts = [Vertex(v["name"], tuple(parse_expr(w) for w in v["weights"])) for v in data["vertices"]]
        edges = [
            Edge(e["name"], e["a"], int(e["slot_a"]), e["b"], int(e["slot_b"]), tuple(sorted(e["class"].items())))
            for e in data.get("edges", [])
        ]
        legs = [Leg(l["vertex"], int(l["slot"]), Partition.parse(l["partition"])) for l in data.get("legs", [])]
        return cls(verts, edges, legs)


@dataclass(frozen=True)
class Marking:
    """Partitions on the halves of compact edges, keyed by (edge, vertex, slot)."""

    assignment: tuple

    def as_dict(self) -> dict:
        return dict(self.assignment)

    def edge_degree(self, edge: Edge) -> int:
        return self.as_dict()[edge.halves()[0]].size


def edge_degree_vectors(g: ToricGraph, beta: dict):
    """All (d_e) with sum_e d_e [C_e] = beta."""
    gens = g.generators()
    for k, v in beta.items():
        if k not in gens and v:
            raise MarkingError(f"curve class generator {k!r} is not carried by any edge")
        if v < 0:
            raise MarkingError(f"curve class must be effective, got {k}={v}")
    bounds = []
    for e in g.edges:
        cd = e.class_dict()
        pos = [(gen, c) for gen, c in cd.items() if c > 0]
        if not pos or any(c < 0 for c in cd.values()):
            raise MarkingError(f"edge {e.name} has a class that does not bound its degree")
        bounds.append(min(beta.get(gen, 0) // c for gen, c in pos))
    target = {k: v for k, v in beta.items() if v}
    for degs in itertools.product(*(range(b + 1) for b in bounds)):
        total: dict = {}
        for e, d in zip(g.edges, degs):
            for gen, c in e.cls:
                total[gen] = total.get(gen, 0) + c * d
        if {k: v for k, v in total.items() if v} == target:
            yield degs


def enumerate_markings(g: ToricGraph, beta: dict) -> list:
    """Balanced partition assignments to compact half-edges meeting the degree condition."""
    out = []
    for degs in edge_degree_vectors(g, beta):
        choices = []
        for e, d in zip(g.edges, degs):
            h1, h2 = e.halves()
            ps = partitions_of(d)
            choices.append([((h1, l1), (h2, l2)) for l1 in ps for l2 in ps])
        for combo in itertools.product(*choices):
            assignment = tuple(pair for pairs in combo for pair in pairs)
            out.append(Marking(assignment))
    return out


def _slot_factor(v: Vertex, slot: int) -> RatFunc:
    return v.weight_product() / v.weights[slot]


def gluing_P(v: Vertex, slot: int, lam) -> RatFunc:
    lam = Partition(lam)
    if v.weights[slot].is_zero():
        raise ZeroDivisionError(f"zero tangent weight at {v.name} slot {slot}")
    sign = (-1) ** (lam.size - lam.length)
    return _slot_factor(v, slot) ** lam.length * (sign * lam.z()) * Q ** (-lam.size)


def gluing_GW(v: Vertex, slot: int, lam) -> ULaurent:
    lam = Partition(lam)
    if v.weights[slot].is_zero():
        raise ZeroDivisionError(f"zero tangent weight at {v.name} slot {slot}")
    return ULaurent.monomial(_slot_factor(v, slot) ** lam.length * lam.z(), 2 * lam.length)


def gluing(theory: str, v: Vertex, slot: int, lam):
    return gluing_P(v, slot, lam) if theory == PT else gluing_GW(v, slot, lam)


class BlockProvider(Protocol):
    thread_safe: bool

    def capped_vertex(self, vertex: Vertex, descendents: Partition, lams: tuple, theory: str): ...

    def capped_edge(self, edge: Edge, lam: Partition, lam2: Partition, theory: str): ...


class KroneckerEdgeProvider:
    """Wraps a vertex function; the capped edge is the Kronecker delta."""

    thread_safe = True

    def __init__(self, vertex_fn):
        self._vertex_fn = vertex_fn

    def capped_vertex(self, vertex, descendents, lams, theory):
        return self._vertex_fn(vertex, descendents, lams, theory)

    def capped_edge(self, edge, lam, lam2, theory):
        return 1 if lam == lam2 else 0


class ClosedFormCapProvider(KroneckerEdgeProvider):
    """Demonstration provider built from the closed-form cap series.

    Supports a vertex with one nonempty relative condition: descendents
    gamma (no parts 1) against gamma, or no descendents against (1^e).
    Everything else is reported as unsupported.
    """

    def __init__(self):
        super().__init__(self._vertex)

    @staticmethod
    def _vertex(vertex, descendents, lams, theory):
        from .caps import gw_cap_pure, pt_cap_pure, pt_tube_ones

        nonempty = [l for l in lams if l]
        if len(nonempty) != 1:
            raise UnsupportedInput(f"vertex {vertex.name}: needs exactly one nonempty relative condition")
        lam = nonempty[0]
        subs = {"s1": vertex.weights[0], "s2": vertex.weights[1], "s3": vertex.weights[2]}
        if descendents and descendents == lam and 1 not in lam:
            return pt_cap_pure(lam) if theory == PT else gw_cap_pure(lam)
        if not descendents and set(lam) == {1} and theory == PT:
            return pt_tube_ones(lam.size, with_q=True).subs(subs)
        raise UnsupportedInput(f"vertex {vertex.name}: no closed form for {descendents} | {lams} ({theory})")


def _vertex_slots(g: ToricGraph, marking: Marking) -> dict:
    slots = {v.name: [Partition(()), Partition(()), Partition(())] for v in g.vertices}
    for (_, vname, slot), lam in marking.assignment:
        slots[vname][slot] = lam
    for leg in g.legs:
        slots[leg.vertex][leg.slot] = leg.partition
    return slots


def _marking_term(g, placement, marking, provider, theory):
    slots = _vertex_slots(g, marking)
    term = ONE if theory == PT else ULaurent.one()
    for v in g.vertices:
        desc = Partition(placement.get(v.name, ()))
        lams = tuple(slots[v.name])
        if not any(lams):
            if desc:
                raise IsolatedDescendentError(f"vertex {v.name} has descendents {desc} but empty relative conditions")
            continue
        try:
            val = provider.capped_vertex(v, desc, lams, theory)
        except UnsupportedInput as exc:
            raise UnsupportedInput(f"{exc} [marking {marking.assignment}]") from exc
        term = term * val
    md = marking.as_dict()
    for e in g.edges:
        h1, h2 = e.halves()
        if not md[h1] and not md[h2]:
            continue
        ev = provider.capped_edge(e, md[h1], md[h2], theory)
        if isinstance(ev, int) and ev == 0:
            return None
        term = term * ev
    for e in g.edges:
        for h in e.halves():
            lam = md[h]
            if lam:
                term = term * gluing(theory, g.vertex(h[1]), h[2], lam)
    return term


def assemble(g: ToricGraph, placement: dict, beta: dict, provider, theory: str = PT, threads: int | None = None):
    """Sum over capped markings of vertex, edge and gluing products.

    ``placement`` maps vertex names to the descendent partition placed there.
    """
    theory = theory.lower()
    if theory not in (PT, GW):
        raise ValueError(f"unknown theory {theory!r}")
    markings = enumerate_markings(g, beta)
    if threads is None:
        threads = int(os.environ.get("GWPAIRS_THREADS", "1") or 1)
    if threads > 1 and getattr(provider, "thread_safe", False) and len(markings) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            terms = list(pool.map(lambda m: _marking_term(g, placement, m, provider, theory), markings))
    else:
        terms = [_marking_term(g, placement, m, provider, theory) for m in markings]
    total = RatFunc.const(0) if theory == PT else ULaurent.zero()
    for t in terms:
        if t is not None:
            total = total + t
    return total


def degeneration_kernel(mu, theory: str):
    """Weight joining relative conditions mu and its dual in the degeneration formula."""
    mu = Partition(mu)
    if theory.lower() == GW:
        return ULaurent.monomial(RatFunc.const(mu.z()), 2 * mu.length)
    return Q ** (-mu.size) * ((-1) ** (mu.size - mu.length) * mu.z())


def degenerate_combine(z1: dict, z2: dict, theory: str):
    """sum_mu Z1(mu) * kernel(mu) * Z2(mu dual); both tables keyed by the same partitions."""
    k1 = {Partition(k) for k in z1}
    k2 = {Partition(k) for k in z2}
    if k1 != k2:
        raise MarkingError(f"relative condition sets differ: {sorted(map(str, k1 ^ k2))}")
    z1 = {Partition(k): v for k, v in z1.items()}
    z2 = {Partition(k): v for k, v in z2.items()}
    total = None
    for mu in sorted(k1, key=lambda p: (p.size, [-x for x in p])):
        kern = degeneration_kernel(mu, theory)
        t = z1[mu] * kern * z2[mu]
        total = t if total is None else total + t
    if total is None:
        return RatFunc.const(0) if theory.lower() == PT else ULaurent.zero()
    return total
