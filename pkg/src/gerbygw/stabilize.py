"""Stabilization of A-graphs by contracting unstable genus-0 vertices.

Unstable vertices have genus 0, zero class and valence at most two, so the
contracted locus is a disjoint union of chains.  Three local moves are
applied until none is left:

* splice: a valence-2 vertex between two edges merges them into one edge;
* migrate: a valence-2 vertex carrying a tail hands the tail to its neighbour;
* prune: a valence-1 vertex is deleted and its neighbour's flag becomes a tail.

Every flag of the stabilization is a flag of the input (the flag map of the
stabilization morphism is an inclusion), and the chains of input flags
absorbed into each edge or tail are returned as the long-edge and long-tail
tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import GraphError, StabilizationError
from .graphs import GerbyGraph, GerbyXGraph, ModularGraph, is_zero_class, vertex_stable


def _apply_matrix(matrix, beta):
    beta = tuple(beta)
    return tuple(sum(a * b for a, b in zip(row, beta + (0,) * (len(row) - len(beta)))) for row in matrix)


@dataclass(frozen=True)
class CombinatorialMorphism:
    """Flag and vertex maps from a source graph into a target graph.

    ``class_map`` is an integer matrix sending target classes to source
    classes (None for the identity).  ``label_map`` sends target labels to
    source labels (contravariant, as for gerby morphisms).
    """

    flag_map: Mapping[str, str]
    vertex_map: Mapping[str, str]
    class_map: tuple | None = None
    label_map: Mapping[str, str] | None = None

    def pull_class(self, beta):
        if self.class_map is None:
            return tuple(beta)
        return _apply_matrix(self.class_map, beta)

    def violations(self, source: ModularGraph, target: ModularGraph) -> list:
        """Conditions 1, 2 and 4 of a combinatorial morphism; empty list means all hold."""
        out = []
        for f in source.flags:
            if target.vertex_of[self.flag_map[f]] != self.vertex_map[source.vertex_of[f]]:
                out.append(f"boundary square fails at flag {f}")
        for v in source.vertices:
            images = [self.flag_map[f] for f in source.flags_at(v)]
            if len(set(images)) != len(images):
                out.append(f"flag map not injective at vertex {v}")
            w = self.vertex_map[v]
            if source.genus[v] != target.genus[w]:
                out.append(f"genus differs at vertex {v}")
            a = self.pull_class(target.alpha[w])
            if not _same_class(a, source.alpha[v]):
                out.append(f"class differs at vertex {v}")
        return out


def _same_class(a, b) -> bool:
    n = max(len(a), len(b))
    return tuple(a) + (0,) * (n - len(a)) == tuple(b) + (0,) * (n - len(b))


@dataclass(frozen=True)
class LongTail:
    flags: tuple

    @property
    def parity(self) -> str:
        """'odd' ends in a tail of the input, 'even' at a valence-one vertex."""
        return "odd" if len(self.flags) % 2 else "even"

    @property
    def factors(self) -> tuple:
        fl = self.flags
        edges = tuple((fl[i], fl[i + 1]) for i in range(0, len(fl) - 1, 2))
        return edges + (((fl[-1],),) if len(fl) % 2 else ())


@dataclass(frozen=True)
class StabilizationRecord:
    source: ModularGraph
    graph: ModularGraph
    morphism: CombinatorialMorphism
    long_edges: Mapping[tuple, tuple] = field(default_factory=dict)
    long_tails: Mapping[str, LongTail] = field(default_factory=dict)
    contracted: tuple = ()

    def is_identity(self) -> bool:
        return (
            not self.contracted
            and not self.long_edges
            and not self.long_tails
            and all(k == v for k, v in self.morphism.flag_map.items())
            and all(k == v for k, v in self.morphism.vertex_map.items())
        )

    def absorbed_edges(self) -> list:
        """Edges of the input appearing as factors, in table order, as sorted pairs."""
        out = []
        for factors in self.long_edges.values():
            out.extend(tuple(sorted(e)) for e in factors)
        for lt in self.long_tails.values():
            out.extend(tuple(sorted(e)) for e in lt.factors if len(e) == 2)
        return out


def stabilize(graph: ModularGraph, order=None) -> StabilizationRecord:
    """Contract the unstable vertices of ``graph``.

    ``order`` optionally fixes the sequence in which unstable vertices are
    contracted; the result does not depend on it.
    """
    unstable = [v for v in graph.vertices if not vertex_stable(graph, v)]
    for v in unstable:
        if graph.genus[v] > 0:
            raise StabilizationError(f"unstable vertex {v!r} of positive genus is unsupported")
    if len(unstable) == len(graph.genus):
        raise StabilizationError("no stabilization: every vertex is unstable")
    bad = set(unstable)
    for e in graph.edges:
        if graph.is_loop(e) and graph.vertex_of[e[0]] in bad:
            raise StabilizationError(f"loop {e} on unstable vertex is unsupported")
    if order is None:
        order = unstable
    elif sorted(order) != sorted(unstable):
        raise ValueError("order must be a permutation of the unstable vertices")

    j = dict(graph.pair)
    run = {f: (f, h) for f, h in j.items() if f != h}
    tail_run = {f: (f,) for f, h in j.items() if f == h}
    alive = set(j)

    for u in order:
        here = sorted(f for f in graph.flags_at(u) if f in alive)
        edge_flags = [f for f in here if j[f] != f]
        tails = [f for f in here if j[f] == f]
        if len(here) == 1 and edge_flags:
            (x,) = edge_flags
            p = j[x]
            tail_run[p] = run.pop(p)
            del run[x]
            j[p] = p
        elif len(edge_flags) == 2:
            x, y = edge_flags
            p, q = j[x], j[y]
            if p == y:
                raise StabilizationError(f"loop on unstable vertex {u!r} is unsupported")
            merged = run.pop(p) + run.pop(y)
            del run[x], run[q]
            run[p] = merged
            run[q] = merged[::-1]
            j[p], j[q] = q, p
        elif len(edge_flags) == 1 and len(tails) == 1:
            (x,), (t,) = edge_flags, tails
            p = j[x]
            tail_run[p] = run.pop(p) + tail_run.pop(t)
            del run[x]
            j[p] = p
        else:
            raise StabilizationError(f"vertex {u!r} cannot be contracted (isolated unstable component)")
        alive.difference_update(here)
        del_flags = set(here)
        for f in del_flags:
            j.pop(f, None)

    keep_v = [v for v in graph.vertices if v not in bad]
    keep_f = sorted(alive)
    stable = ModularGraph(
        {v: graph.genus[v] for v in keep_v},
        {f: graph.vertex_of[f] for f in keep_f},
        {f: j[f] for f in keep_f},
        {v: graph.alpha[v] for v in keep_v},
    )
    long_edges = {}
    for f, h in stable.edges:
        seq = run[f]
        if len(seq) > 2:
            long_edges[(f, h)] = tuple((seq[i], seq[i + 1]) for i in range(0, len(seq), 2))
    long_tails = {t: LongTail(tail_run[t]) for t in stable.tails if len(tail_run[t]) > 1}
    morphism = CombinatorialMorphism({f: f for f in keep_f}, {v: v for v in keep_v})
    return StabilizationRecord(graph, stable, morphism, long_edges, long_tails, tuple(sorted(bad)))


def absolute_stabilize(graph: ModularGraph, order=None) -> StabilizationRecord:
    return stabilize(graph.with_alpha({}), order)


def project_gerby(x: GerbyXGraph, side: int):
    """Push classes and labels of a gerby graph over a product target to one factor.

    Returns ``(projected_graph, record)`` where ``record`` is the stabilization
    relative to the projected classes, its morphism carrying the class and
    label projections.
    """
    from .productformula import ProductTargetModel

    target = x.target
    if not isinstance(target, ProductTargetModel):
        raise GraphError("project_gerby needs a graph over a product target")
    if side not in (1, 2):
        raise ValueError("side must be 1 or 2")
    factor = target.factors[side - 1]
    pushed = x.graph.with_alpha({v: target.project_class(side, a) for v, a in x.graph.alpha.items()})
    rec = stabilize(pushed)
    labels = {f: target.project_label(side, x.labels[rec.morphism.flag_map[f]]) for f in rec.graph.flags}
    try:
        gerby = GerbyGraph(rec.graph, factor.inertia, labels)
    except GraphError as exc:
        raise GraphError(f"projected labels disagree along a long edge: {exc}") from exc
    morphism = CombinatorialMorphism(
        rec.morphism.flag_map,
        rec.morphism.vertex_map,
        target.projection_matrix(side),
        target.label_projection(side),
    )
    rec = StabilizationRecord(rec.source, rec.graph, morphism, rec.long_edges, rec.long_tails, rec.contracted)
    return GerbyXGraph(gerby, factor), rec


def record_to_json(rec: StabilizationRecord) -> dict:
    from .graphs import graph_to_json

    return {
        "graph": graph_to_json(rec.graph),
        "morphism": {
            "flags": dict(sorted(rec.morphism.flag_map.items())),
            "vertices": dict(sorted(rec.morphism.vertex_map.items())),
        },
        "contracted": list(rec.contracted),
        "long_edges": [
            {"edge": list(e), "factors": [list(p) for p in factors]}
            for e, factors in sorted(rec.long_edges.items())
        ],
        "long_tails": [
            {"tail": t, "flags": list(lt.flags), "parity": lt.parity}
            for t, lt in sorted(rec.long_tails.items())
        ],
    }
