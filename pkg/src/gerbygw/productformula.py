"""Product targets and the comparison coefficient between graph triples."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm, prod
from typing import Mapping

from .errors import GraphError, InputError
from .graphs import (
    GerbyGraph,
    GerbyXGraph,
    InertiaLabelSet,
    ModularGraph,
    TargetModel,
    gerby_graph_from_json,
    isomorphic,
    target_from_json,
)
from .stabilize import absolute_stabilize, project_gerby


def product_label(u1, u2) -> str:
    return f"({u1},{u2})"


@dataclass(frozen=True)
class ProductTargetModel(TargetModel):
    """X1 x X2: labels are pairs with lcm order and summed age; classes concatenate."""

    factors: tuple = ()
    pairs: Mapping[str, tuple] = field(default_factory=dict)

    @classmethod
    def of(cls, t1: TargetModel, t2: TargetModel) -> "ProductTargetModel":
        ords, ages, pairs = {}, {}, {}
        for u1 in t1.inertia.labels:
            for u2 in t2.inertia.labels:
                u = product_label(u1, u2)
                ords[u] = lcm(t1.inertia.ord[u1], t2.inertia.ord[u2])
                ages[u] = t1.inertia.age[u1] + t2.inertia.age[u2]
                pairs[u] = (u1, u2)
        return cls(
            dim=t1.dim + t2.dim,
            inertia=InertiaLabelSet(ords, ages),
            untwisted=product_label(t1.untwisted, t2.untwisted),
            class_rank=t1.class_rank + t2.class_rank,
            canonical_degree=t1.canonical_degree + t2.canonical_degree,
            factors=(t1, t2),
            pairs=pairs,
        )

    def _span(self, side):
        r1 = self.factors[0].class_rank
        return (0, r1) if side == 1 else (r1, self.class_rank)

    def project_class(self, side, beta) -> tuple:
        lo, hi = self._span(side)
        return self.normalize_class(beta)[lo:hi]

    def project_label(self, side, u) -> str:
        return self.pairs[u][side - 1]

    def projection_matrix(self, side) -> tuple:
        lo, hi = self._span(side)
        return tuple(tuple(int(c == i) for c in range(self.class_rank)) for i in range(lo, hi))

    def label_projection(self, side) -> dict:
        return {u: p[side - 1] for u, p in self.pairs.items()}


@dataclass(frozen=True)
class GraphTriple:
    """A gerby graph over a product target together with its two projections."""

    product: GerbyXGraph
    side1: GerbyXGraph
    side2: GerbyXGraph
    records: tuple = ()

    @classmethod
    def from_product(cls, x: GerbyXGraph) -> "GraphTriple":
        x1, r1 = project_gerby(x, 1)
        x2, r2 = project_gerby(x, 2)
        return cls(x, x1, x2, (r1, r2))

    def shares_absolute_stabilization(self) -> bool:
        base = absolute_stabilize(self.product.graph).graph
        return all(
            isomorphic(base, absolute_stabilize(s.graph).graph) for s in (self.side1, self.side2)
        )


def _edge_gammas(x: GerbyXGraph):
    return [x.gamma(f) for f, _ in x.graph.edges]


def coefficient_c(triple: GraphTriple) -> Fraction:
    """Degree of the comparison map: node orders of both factors over those of the product."""
    top = prod(_edge_gammas(triple.side1)) * prod(_edge_gammas(triple.side2))
    return Fraction(top, prod(_edge_gammas(triple.product)))


def weighted_prefactor(x: GerbyXGraph) -> int:
    return prod(x.gamma(f) for f in x.graph.tails)


def gwclass_prefactor(x: GerbyXGraph) -> int:
    return prod(_edge_gammas(x))


def product_correlator(value1, value2, triple: GraphTriple | None = None) -> Fraction:
    """Degree-zero shadow of the product formula: the cup product of two multiples
    of the fundamental class is the product of the multiples.  ``triple`` is
    accepted for symmetry with the class-level statement; its coefficient
    bookkeeping is available from :func:`coefficient_c`."""
    return Fraction(value1) * Fraction(value2)


def cut_edge(x: GerbyXGraph, edge) -> tuple:
    """Cut ``edge`` into two tails.

    Returns one graph for a non-separating edge and two for a separating one.
    """
    f, h = sorted(edge)
    g = x.graph
    if g.pair.get(f) != h or f == h:
        raise GraphError(f"{edge!r} is not an edge")
    pair = dict(g.pair)
    pair[f], pair[h] = f, h
    comps = _components(g, pair)
    out = []
    for verts in comps:
        flags = [fl for fl in g.flags if g.vertex_of[fl] in verts]
        sub = ModularGraph(
            {v: g.genus[v] for v in verts},
            {fl: g.vertex_of[fl] for fl in flags},
            {fl: pair[fl] for fl in flags},
            {v: g.alpha[v] for v in verts},
        )
        out.append(GerbyXGraph(GerbyGraph(sub, x.target.inertia, {fl: x.labels[fl] for fl in flags}), x.target))
    return tuple(out)


def _components(g: ModularGraph, pair) -> list:
    adj = {v: set() for v in g.genus}
    for a, b in pair.items():
        adj[g.vertex_of[a]].add(g.vertex_of[b])
    comps, seen = [], set()
    for v in g.vertices:
        if v in seen:
            continue
        stack, comp = [v], set()
        while stack:
            w = stack.pop()
            if w in comp:
                continue
            comp.add(w)
            stack.extend(adj[w] - comp)
        seen |= comp
        comps.append(sorted(comp))
    return comps


def splitting_factor(x: GerbyXGraph, edge) -> Fraction:
    """gamma(f)^2 times the universal-gerbe degree 1/gamma(f) at the cut node.

    The edge-order prefactor of ``x`` equals this factor times the prefactors
    of the pieces of :func:`cut_edge`.
    """
    gamma = x.gamma(edge[0])
    return Fraction(gamma) ** 2 * Fraction(1, gamma)


def triple_from_json(raw) -> GraphTriple:
    """``{"factors": [target, target], "graph": graph}``; flag labels may be
    ``[u1, u2]`` pairs, product label ids, or null."""
    if not isinstance(raw, Mapping):
        raise InputError("triple must be a JSON object", "")
    factors = raw.get("factors")
    if not isinstance(factors, list) or len(factors) != 2:
        raise InputError("need exactly two factor targets", "/factors")
    t1 = target_from_json(factors[0])
    t2 = target_from_json(factors[1])
    target = ProductTargetModel.of(t1, t2)
    graph = raw.get("graph")
    if not isinstance(graph, Mapping):
        raise InputError("missing product graph", "/graph")
    graph = dict(graph)
    flags = []
    for i, fl in enumerate(graph.get("flags", [])):
        fl = dict(fl)
        lab = fl.get("label")
        if isinstance(lab, list):
            if len(lab) != 2:
                raise InputError("pair label needs two entries", f"/graph/flags/{i}/label")
            fl["label"] = product_label(*lab)
        flags.append(fl)
    graph["flags"] = flags
    try:
        x = gerby_graph_from_json(graph, target)
    except GraphError as exc:
        exc.pointer = "/graph" + (exc.pointer or "")
        raise
    return GraphTriple.from_product(x)
