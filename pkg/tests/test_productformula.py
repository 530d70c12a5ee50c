import random
from fractions import Fraction
from math import prod

import pytest
from hypothesis import given, settings, strategies as st

from gerbygw.errors import GraphError, InputError, StabilizationError
from gerbygw.graphs import GerbyXGraph, ModularGraph, target_from_json
from gerbygw.productformula import (
    GraphTriple,
    ProductTargetModel,
    coefficient_c,
    cut_edge,
    gwclass_prefactor,
    product_correlator,
    product_label,
    splitting_factor,
    triple_from_json,
    weighted_prefactor,
)
from strategies import random_product_graph, random_relabel

T1 = {"labels": [{"id": "1"}, {"id": "a", "ord": 2, "age": "1/2"}, {"id": "u2", "ord": 2}], "class_rank": 1}
T2 = {"labels": [{"id": "1"}, {"id": "u3", "ord": 3, "age": "1/3"}, {"id": "b", "ord": 5}], "class_rank": 1}


def product_target():
    return ProductTargetModel.of(target_from_json(T1), target_from_json(T2))


def half_example():
    """w -e_c- v1 -e_a- u -e_b- v2 with e_a, e_b labeled (a, 1) and e_c untwisted."""
    lab = ["a", "1"]
    return {
        "factors": [T1, T2],
        "graph": {
            "vertices": [
                {"id": "w", "genus": 2, "alpha": [0, 0]},
                {"id": "v1", "alpha": [1, 0]},
                {"id": "u", "alpha": [0, 1]},
                {"id": "v2", "alpha": [1, 0]},
            ],
            "flags": [
                {"id": "c1", "vertex": "w", "pair": "c2"},
                {"id": "c2", "vertex": "v1", "pair": "c1"},
                {"id": "a1", "vertex": "v1", "pair": "a2", "label": lab},
                {"id": "a2", "vertex": "u", "pair": "a1", "label": lab},
                {"id": "b1", "vertex": "u", "pair": "b2", "label": lab},
                {"id": "b2", "vertex": "v2", "pair": "b1", "label": lab},
            ],
        },
    }


def one_example():
    lab = ["u2", "u3"]
    return {
        "factors": [T1, T2],
        "graph": {
            "vertices": [{"id": "p", "genus": 1}, {"id": "q", "genus": 1}],
            "flags": [
                {"id": "x", "vertex": "p", "pair": "y", "label": lab},
                {"id": "y", "vertex": "q", "pair": "x", "label": lab},
            ],
        },
    }


def test_half_example():
    t = triple_from_json(half_example())
    assert [len(t.product.graph.edges), len(t.side1.graph.edges), len(t.side2.graph.edges)] == [3, 2, 1]
    assert sorted(t.side1.gamma(e[0]) for e in t.side1.graph.edges) == [1, 2]
    assert t.side2.gamma(t.side2.graph.edges[0][0]) == 1
    assert gwclass_prefactor(t.product) == 4
    assert coefficient_c(t) == Fraction(1, 2)
    assert t.shares_absolute_stabilization()


def test_one_example():
    t = triple_from_json(one_example())
    assert coefficient_c(t) == 1
    assert gwclass_prefactor(t.product) == 6
    assert [gwclass_prefactor(t.side1), gwclass_prefactor(t.side2)] == [2, 3]


def test_hand_built_triple():
    """The formula alone: two order-2 edges over one order-2 edge and an empty side."""
    t1 = target_from_json(T1)
    t2 = target_from_json(T2)
    pt = ProductTargetModel.of(t1, t2)
    lab = product_label("a", "1")
    chain = ModularGraph(
        {"p": 1, "m": 0, "q": 1},
        {"e1": "p", "e2": "m", "e3": "m", "e4": "q"},
        {"e1": "e2", "e2": "e1", "e3": "e4", "e4": "e3"},
        {"m": (0, 1)},
    )
    prod_x = GerbyXGraph.build(chain, {f: lab for f in chain.flags}, pt)
    one_edge = ModularGraph({"p": 1, "q": 1}, {"e1": "p", "e4": "q"}, {"e1": "e4", "e4": "e1"})
    s1 = GerbyXGraph.build(one_edge, {"e1": "a", "e4": "a"}, t1)
    s2 = GerbyXGraph.build(ModularGraph({"m": 0}, {}, {}, {"m": (1,)}), {}, t2)
    assert coefficient_c(GraphTriple(prod_x, s1, s2)) == Fraction(1, 2)


def test_sixfold_edge_by_hand():
    pt = product_target()
    lab = product_label("u2", "u3")
    assert pt.inertia.ord[lab] == 6
    assert pt.inertia.age[lab] == Fraction(1, 3)


def test_prefactor_examples():
    t = target_from_json({"labels": [{"id": "1"}, {"id": "b", "ord": 2}, {"id": "c", "ord": 3}, {"id": "d", "ord": 5}]})
    star = ModularGraph({"v": 0}, {"s1": "v", "s2": "v", "s3": "v"}, {"s1": "s1", "s2": "s2", "s3": "s3"})
    assert weighted_prefactor(GerbyXGraph.build(star, {}, t)) == 1
    assert weighted_prefactor(GerbyXGraph.build(star, {"s1": "b", "s2": "c", "s3": "c"}, t)) == 18
    lone = ModularGraph({"v": 2}, {}, {})
    assert weighted_prefactor(GerbyXGraph.build(lone, {}, t)) == 1
    assert gwclass_prefactor(GerbyXGraph.build(lone, {}, t)) == 1
    two = ModularGraph(
        {"a": 1, "b": 1},
        {"x": "a", "y": "b", "p": "a", "q": "b"},
        {"x": "y", "y": "x", "p": "q", "q": "p"},
    )
    assert gwclass_prefactor(GerbyXGraph.build(two, {f: "b" for f in "xypq"}, t)) == 4
    single = ModularGraph({"a": 1, "b": 1}, {"x": "a", "y": "b"}, {"x": "y", "y": "x"})
    assert gwclass_prefactor(GerbyXGraph.build(single, {"x": "d", "y": "d"}, t)) == 5


def test_product_correlator_examples():
    assert product_correlator(3, 0) == 0
    assert product_correlator(Fraction(5, 7), Fraction(1, 2)) == Fraction(5, 14)
    assert product_correlator(1, 1) == 1


def test_triple_json_errors():
    raw = half_example()
    raw["graph"]["flags"][2]["label"] = ["a"]
    with pytest.raises(InputError) as err:
        triple_from_json(raw)
    assert err.value.pointer == "/graph/flags/2/label"
    raw = half_example()
    raw["factors"] = [T1]
    with pytest.raises(InputError):
        triple_from_json(raw)


def _triples(rng, twisted, count):
    pt = product_target()
    out = []
    while len(out) < count:
        x = random_product_graph(rng, pt, twisted=twisted)
        try:
            out.append(GraphTriple.from_product(x))
        except (GraphError, StabilizationError):
            continue
    return out


def test_behrend_recovery_random():
    for t in _triples(random.Random(11), False, 60):
        assert coefficient_c(t) == 1
        assert t.shares_absolute_stabilization()


def test_twisted_coefficients_positive_and_invariant():
    rng = random.Random(3)
    for t in _triples(rng, True, 40):
        c = coefficient_c(t)
        assert c > 0
        assert t.shares_absolute_stabilization()
        g, vmap, fmap = random_relabel(t.product.graph, rng)
        x = GerbyXGraph.build(g, {fmap[f]: u for f, u in t.product.labels.items()}, t.product.target)
        assert coefficient_c(GraphTriple.from_product(x)) == c


def test_identical_factor_gives_one():
    t1 = target_from_json(T1)
    t2 = target_from_json({"labels": [{"id": "1"}], "class_rank": 1})
    pt = ProductTargetModel.of(t1, t2)
    g = ModularGraph({"a": 1, "b": 2}, {"x": "a", "y": "b"}, {"x": "y", "y": "x"})
    lab = product_label("a", "1")
    t = GraphTriple.from_product(GerbyXGraph.build(g, {"x": lab, "y": lab}, pt))
    assert len(t.side1.graph.edges) == 1
    assert coefficient_c(t) == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_prefactor_flag_identity(seed):
    # tails contribute one factor, edges two, so prod over flags = weighted * gw^2
    x = random_product_graph(random.Random(seed), product_target(), twisted=True)
    flags = prod(x.gamma(f) for f in x.graph.flags)
    assert weighted_prefactor(x) * gwclass_prefactor(x) ** 2 == flags
    assert Fraction(weighted_prefactor(x) * gwclass_prefactor(x)) == Fraction(flags, gwclass_prefactor(x))


def test_prefactor_product_not_a_flag_multiset_function():
    # one order-2 edge and two order-2 tails have the same gamma multiset on flags
    t = target_from_json({"labels": [{"id": "1"}, {"id": "b", "ord": 2}]})
    edge = ModularGraph({"a": 1, "c": 1}, {"x": "a", "y": "c"}, {"x": "y", "y": "x"})
    tails = ModularGraph({"a": 1}, {"x": "a", "y": "a"}, {"x": "x", "y": "y"})
    e = GerbyXGraph.build(edge, {"x": "b", "y": "b"}, t)
    s = GerbyXGraph.build(tails, {"x": "b", "y": "b"}, t)
    assert sorted(e.gamma(f) for f in "xy") == sorted(s.gamma(f) for f in "xy")
    assert weighted_prefactor(e) * gwclass_prefactor(e) == 2
    assert weighted_prefactor(s) * gwclass_prefactor(s) == 4


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_splitting_factor_identity(seed):
    rng = random.Random(seed)
    x = random_product_graph(rng, product_target(), twisted=True)
    if not x.graph.edges:
        return
    e = rng.choice(x.graph.edges)
    pieces = cut_edge(x, e)
    assert 1 <= len(pieces) <= 2
    assert sum(len(p.graph.flags) for p in pieces) == len(x.graph.flags)
    assert gwclass_prefactor(x) == splitting_factor(x, e) * prod(gwclass_prefactor(p) for p in pieces)
    assert weighted_prefactor(x) * x.gamma(e[0]) ** 2 == prod(weighted_prefactor(p) for p in pieces)


def test_cut_edge_rejects_non_edge():
    pt = product_target()
    g = ModularGraph({"a": 1}, {"t": "a"}, {"t": "t"})
    with pytest.raises(GraphError):
        cut_edge(GerbyXGraph.build(g, {}, pt), ("t", "t"))
