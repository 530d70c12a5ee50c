"""Modular graphs and their gerby decorations.

A graph is stored as flags with an involution ``pair`` (fixed points are
tails) and a boundary map ``vertex_of``; each vertex has a genus.  Vertices also
carry an A-structure ``alpha``: a curve class given as a tuple of
non-negative integers over the target's class basis.  The empty tuple and
any all-zero tuple both denote the zero class.

Identifiers are opaque strings; every ordered output is lexicographic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import networkx as nx

from .errors import GraphError, InputError

CurveClass = tuple


def is_zero_class(beta) -> bool:
    return all(c == 0 for c in beta)


def add_classes(a, b) -> tuple:
    n = max(len(a), len(b))
    a = tuple(a) + (0,) * (n - len(a))
    b = tuple(b) + (0,) * (n - len(b))
    return tuple(x + y for x, y in zip(a, b))


def parse_fraction(value, pointer=None) -> Fraction:
    """Accept ints, "p/q" strings and plain integer strings. Floats are refused."""
    if isinstance(value, bool):
        raise InputError(f"expected a rational, got {value!r}", pointer)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise InputError(f"expected a rational like 'p/q', got {value!r}", pointer)


def format_fraction(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class InertiaLabelSet:
    """Finite label set with an order and an age for every label."""

    ord: Mapping[str, int]
    age: Mapping[str, Fraction]

    def __post_init__(self):
        if set(self.ord) != set(self.age):
            raise InputError("ord and age must be defined on the same labels")
        for u, o in self.ord.items():
            if not isinstance(o, int) or o < 1:
                raise InputError(f"label {u!r} has order {o!r}; orders must be positive integers")
        object.__setattr__(self, "age", {u: Fraction(a) for u, a in self.age.items()})

    @property
    def labels(self) -> tuple:
        return tuple(sorted(self.ord))

    def __contains__(self, u) -> bool:
        return u in self.ord


@dataclass(frozen=True)
class TargetModel:
    """Abstract target: inertia labels plus the numerical data the dimension formula needs.

    ``canonical_degree`` is the vector of values of the canonical-class
    integral on the basis of curve classes, so the degree of a class is a dot
    product.
    """

    dim: int
    inertia: InertiaLabelSet
    untwisted: str
    class_rank: int
    canonical_degree: tuple = ()

    def __post_init__(self):
        if self.dim < 0:
            raise InputError("target dimension must be non-negative")
        if self.untwisted not in self.inertia:
            raise InputError(f"untwisted label {self.untwisted!r} missing from inertia labels")
        if self.inertia.ord[self.untwisted] != 1 or self.inertia.age[self.untwisted] != 0:
            raise InputError("untwisted label must have order 1 and age 0")
        deg = tuple(Fraction(x) for x in self.canonical_degree)
        if not deg:
            deg = (Fraction(0),) * self.class_rank
        if len(deg) != self.class_rank:
            raise InputError("canonical_degree length must equal class_rank")
        object.__setattr__(self, "canonical_degree", deg)

    @classmethod
    def point(cls) -> "TargetModel":
        return cls(0, InertiaLabelSet({"1": 1}, {"1": 0}), "1", 0, ())

    def normalize_class(self, beta) -> tuple:
        beta = tuple(beta)
        if len(beta) > self.class_rank and not is_zero_class(beta[self.class_rank:]):
            raise InputError(f"curve class {beta!r} has more than {self.class_rank} coordinates")
        if any(c < 0 for c in beta):
            raise InputError(f"curve class {beta!r} is not effective")
        beta = beta[: self.class_rank]
        return beta + (0,) * (self.class_rank - len(beta))

    def degree(self, beta) -> Fraction:
        beta = self.normalize_class(beta)
        return sum((w * c for w, c in zip(self.canonical_degree, beta)), Fraction(0))


@dataclass(frozen=True)
class ModularGraph:
    """Validated modular graph with an A-structure. Connected by construction."""

    genus: Mapping[str, int]
    vertex_of: Mapping[str, str]
    pair: Mapping[str, str]
    alpha: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        genus = dict(self.genus)
        vertex_of = dict(self.vertex_of)
        pair = dict(self.pair)
        alpha = {v: tuple(self.alpha.get(v, ())) for v in genus}
        extra = set(self.alpha) - set(genus)
        if extra:
            raise GraphError(f"alpha given for unknown vertices {sorted(extra)}")
        if not genus:
            raise GraphError("graph has no vertices")
        for v, g in genus.items():
            if not isinstance(g, int) or isinstance(g, bool) or g < 0:
                raise GraphError(f"vertex {v!r} has invalid genus {g!r}")
        for f, v in vertex_of.items():
            if v not in genus:
                raise GraphError(f"dangling flag {f!r}: unknown vertex {v!r}")
        if set(pair) != set(vertex_of):
            raise GraphError("pairing must be defined on exactly the flags")
        for f, h in pair.items():
            if h not in pair:
                raise GraphError(f"dangling flag {f!r}: paired with unknown flag {h!r}")
            if pair[h] != f:
                raise GraphError(f"non-involutive pairing at {f!r} -> {h!r} -> {pair[h]!r}")
        object.__setattr__(self, "genus", genus)
        object.__setattr__(self, "vertex_of", vertex_of)
        object.__setattr__(self, "pair", pair)
        object.__setattr__(self, "alpha", alpha)
        if not self._connected():
            raise GraphError("disconnected geometric realization")

    def _connected(self) -> bool:
        adj = {v: set() for v in self.genus}
        for f, h in self.pair.items():
            adj[self.vertex_of[f]].add(self.vertex_of[h])
        start = min(adj)
        seen = {start}
        todo = deque([start])
        while todo:
            v = todo.popleft()
            for w in adj[v] - seen:
                seen.add(w)
                todo.append(w)
        return len(seen) == len(adj)

    @property
    def vertices(self) -> tuple:
        return tuple(sorted(self.genus))

    @property
    def flags(self) -> tuple:
        return tuple(sorted(self.vertex_of))

    @property
    def tails(self) -> tuple:
        return tuple(f for f in self.flags if self.pair[f] == f)

    @property
    def edges(self) -> tuple:
        """Edges as pairs ``(f, j(f))`` with ``f < j(f)``."""
        return tuple((f, h) for f in self.flags for h in (self.pair[f],) if f < h)

    def flags_at(self, v) -> tuple:
        return tuple(f for f in self.flags if self.vertex_of[f] == v)

    def valence(self, v) -> int:
        return sum(1 for w in self.vertex_of.values() if w == v)

    def is_loop(self, edge) -> bool:
        f, h = edge
        return self.vertex_of[f] == self.vertex_of[h]

    def beta(self) -> tuple:
        total = ()
        for v in self.vertices:
            total = add_classes(total, self.alpha[v])
        return total

    def with_alpha(self, alpha) -> "ModularGraph":
        return ModularGraph(self.genus, self.vertex_of, self.pair, alpha)

    def relabel(self, vmap, fmap) -> "ModularGraph":
        return ModularGraph(
            {vmap[v]: g for v, g in self.genus.items()},
            {fmap[f]: vmap[v] for f, v in self.vertex_of.items()},
            {fmap[f]: fmap[h] for f, h in self.pair.items()},
            {vmap[v]: a for v, a in self.alpha.items()},
        )


@dataclass(frozen=True)
class GerbyGraph:
    graph: ModularGraph
    labelset: InertiaLabelSet
    labels: Mapping[str, str]

    def __post_init__(self):
        labels = dict(self.labels)
        if set(labels) != set(self.graph.vertex_of):
            raise GraphError("every flag needs exactly one label")
        for f, u in labels.items():
            if u not in self.labelset:
                raise GraphError(f"flag {f!r} carries unknown label {u!r}")
        for f, h in self.graph.edges:
            if labels[f] != labels[h]:
                raise GraphError(
                    f"edge ({f!r}, {h!r}) has different labels {labels[f]!r} and {labels[h]!r}"
                )
        object.__setattr__(self, "labels", labels)

    def gamma(self, f) -> int:
        return self.labelset.ord[self.labels[f]]

    def age(self, f) -> Fraction:
        return self.labelset.age[self.labels[f]]


@dataclass(frozen=True)
class GerbyXGraph:
    """Gerby graph whose labels and classes live in a target model."""

    gerby: GerbyGraph
    target: TargetModel

    def __post_init__(self):
        if self.gerby.labelset != self.target.inertia:
            raise GraphError("gerby labels must come from the target's inertia labels")
        alpha = {v: self.target.normalize_class(a) for v, a in self.gerby.graph.alpha.items()}
        if alpha != self.gerby.graph.alpha:
            g = self.gerby.graph.with_alpha(alpha)
            object.__setattr__(self, "gerby", GerbyGraph(g, self.gerby.labelset, self.gerby.labels))

    @classmethod
    def build(cls, graph: ModularGraph, labels: Mapping, target: TargetModel) -> "GerbyXGraph":
        """Labels missing from ``labels`` (or mapped to None) default to untwisted."""
        full = {f: (labels.get(f) or target.untwisted) for f in graph.flags}
        return cls(GerbyGraph(graph, target.inertia, full), target)

    @property
    def graph(self) -> ModularGraph:
        return self.gerby.graph

    @property
    def labels(self) -> Mapping[str, str]:
        return self.gerby.labels

    def gamma(self, f) -> int:
        return self.gerby.gamma(f)


# -- operations --------------------------------------------------------------


def validate_graph(raw) -> ModularGraph:
    """Build a graph from the JSON form used throughout the CLI.

    ``{"vertices": [{"id", "genus", "alpha"}], "flags": [{"id", "vertex", "pair", "label"}]}``;
    ``pair`` null marks a tail.  Labels are ignored here; see :func:`gerby_graph_from_json`.
    """
    if not isinstance(raw, Mapping):
        raise GraphError("graph must be a JSON object", "")
    genus, alpha, vertex_of, pair = {}, {}, {}, {}
    vertices = raw.get("vertices")
    if not isinstance(vertices, list):
        raise GraphError("missing vertex list", "/vertices")
    for i, v in enumerate(vertices):
        ptr = f"/vertices/{i}"
        if not isinstance(v, Mapping) or not isinstance(v.get("id"), str):
            raise GraphError("vertex needs a string id", ptr + "/id")
        if v["id"] in genus:
            raise GraphError(f"duplicate vertex {v['id']!r}", ptr + "/id")
        g = v.get("genus", 0)
        if not isinstance(g, int) or isinstance(g, bool) or g < 0:
            raise GraphError(f"invalid genus {g!r}", ptr + "/genus")
        a = v.get("alpha", [])
        if not isinstance(a, list) or not all(isinstance(c, int) and c >= 0 for c in a):
            raise GraphError("alpha must be a list of non-negative integers", ptr + "/alpha")
        genus[v["id"]] = g
        alpha[v["id"]] = tuple(a)
    flags = raw.get("flags", [])
    if not isinstance(flags, list):
        raise GraphError("flags must be a list", "/flags")
    index = {}
    for i, f in enumerate(flags):
        ptr = f"/flags/{i}"
        if not isinstance(f, Mapping) or not isinstance(f.get("id"), str):
            raise GraphError("flag needs a string id", ptr + "/id")
        if f["id"] in vertex_of:
            raise GraphError(f"duplicate flag {f['id']!r}", ptr + "/id")
        if f.get("vertex") not in genus:
            raise GraphError(f"dangling flag {f['id']!r}: unknown vertex {f.get('vertex')!r}", ptr + "/vertex")
        vertex_of[f["id"]] = f["vertex"]
        index[f["id"]] = i
    for i, f in enumerate(flags):
        other = f.get("pair")
        pair[f["id"]] = f["id"] if other is None else other
    for fid, other in pair.items():
        ptr = f"/flags/{index[fid]}/pair"
        if other not in pair:
            raise GraphError(f"dangling flag {fid!r}: paired with unknown flag {other!r}", ptr)
        if pair[other] != fid:
            raise GraphError(f"non-involutive pairing at {fid!r} -> {other!r} -> {pair[other]!r}", ptr)
    try:
        return ModularGraph(genus, vertex_of, pair, alpha)
    except GraphError as exc:
        if exc.pointer is None:
            exc.pointer = ""
        raise


def graph_to_json(graph: ModularGraph, labels=None, untwisted=None) -> dict:
    labels = labels or {}
    return {
        "vertices": [
            {"id": v, "genus": graph.genus[v], "alpha": list(graph.alpha[v])} for v in graph.vertices
        ],
        "flags": [
            {
                "id": f,
                "vertex": graph.vertex_of[f],
                "pair": None if graph.pair[f] == f else graph.pair[f],
                "label": None if labels.get(f, untwisted) == untwisted else labels[f],
            }
            for f in graph.flags
        ],
    }


def target_from_json(raw) -> TargetModel:
    if not isinstance(raw, Mapping):
        raise InputError("target must be a JSON object", "")
    labels = raw.get("labels", [{"id": "1", "ord": 1, "age": 0}])
    ords, ages = {}, {}
    for i, lab in enumerate(labels):
        if not isinstance(lab, Mapping) or not isinstance(lab.get("id"), str):
            raise InputError("label needs a string id", f"/labels/{i}/id")
        o = lab.get("ord", 1)
        if not isinstance(o, int) or o < 1:
            raise InputError("ord must be a positive integer", f"/labels/{i}/ord")
        ords[lab["id"]] = o
        ages[lab["id"]] = parse_fraction(lab.get("age", 0), f"/labels/{i}/age")
    dim = raw.get("dim", 0)
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
        raise InputError("dim must be a non-negative integer", "/dim")
    rank = raw.get("class_rank", 0)
    if not isinstance(rank, int) or isinstance(rank, bool) or rank < 0:
        raise InputError("class_rank must be a non-negative integer", "/class_rank")
    deg = [parse_fraction(x, f"/canonical_degree/{i}") for i, x in enumerate(raw.get("canonical_degree", []))]
    return TargetModel(
        dim=dim,
        inertia=InertiaLabelSet(ords, ages),
        untwisted=raw.get("untwisted", "1"),
        class_rank=rank,
        canonical_degree=tuple(deg),
    )


def gerby_graph_from_json(raw, target: TargetModel) -> GerbyXGraph:
    graph = validate_graph(raw)
    labels = {}
    for i, f in enumerate(raw.get("flags", [])):
        u = f.get("label")
        if u is not None and u not in target.inertia:
            raise GraphError(f"flag {f['id']!r} carries unknown label {u!r}", f"/flags/{i}/label")
        labels[f["id"]] = u
    for i, v in enumerate(raw["vertices"]):
        if len(v.get("alpha", [])) > target.class_rank and not is_zero_class(v["alpha"][target.class_rank:]):
            raise GraphError("alpha longer than the target class rank", f"/vertices/{i}/alpha")
    return GerbyXGraph.build(graph, labels, target)


def euler_characteristic(graph: ModularGraph) -> int:
    # tails retract onto their vertex and do not change chi(|tau|)
    return len(graph.genus) - len(graph.edges) - sum(graph.genus.values())


def vertex_stable(graph: ModularGraph, v) -> bool:
    return not is_zero_class(graph.alpha[v]) or 2 * graph.genus[v] + graph.valence(v) >= 3


def stable_vertices(graph: ModularGraph) -> dict:
    return {v: vertex_stable(graph, v) for v in graph.vertices}


def is_stable(graph: ModularGraph) -> bool:
    return all(stable_vertices(graph).values())


def dimension(x: GerbyXGraph) -> Fraction:
    graph = x.graph
    t = x.target
    for f in graph.flags:
        if x.labels[f] not in t.inertia:
            raise GraphError(f"flag {f!r} label {x.labels[f]!r} missing from target labels")
    ages = sum((x.gerby.age(f) for f in graph.tails), Fraction(0))
    return (
        euler_characteristic(graph) * (t.dim - 3)
        - t.degree(graph.beta())
        + len(graph.tails)
        - len(graph.edges)
        - ages
    )


def _nx_form(graph: ModularGraph, labels=None) -> nx.Graph:
    labels = labels or {}
    h = nx.Graph()
    for v in graph.vertices:
        h.add_node(("v", v), kind="v", genus=graph.genus[v], alpha=graph.alpha[v])
    for f in graph.flags:
        h.add_node(("f", f), kind="f", tail=graph.pair[f] == f, label=labels.get(f))
        h.add_edge(("v", graph.vertex_of[f]), ("f", f))
    for f, g in graph.edges:
        h.add_edge(("f", f), ("f", g))
    return h


def isomorphic(a: ModularGraph, b: ModularGraph, labels_a=None, labels_b=None) -> bool:
    """Isomorphism of graphs with genus, A-structure and (optionally) flag labels."""
    if (len(a.genus), len(a.vertex_of), len(a.edges)) != (len(b.genus), len(b.vertex_of), len(b.edges)):
        return False
    return nx.is_isomorphic(_nx_form(a, labels_a), _nx_form(b, labels_b), node_match=lambda x, y: x == y)
