from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gerbygw.cyclotomic import Cyclotomic
from gerbygw.errors import GroupError, InputError
from gerbygw.groups import (
    ClassFunction,
    alternating,
    class_name,
    cyclic,
    dihedral,
    dixon_prime,
    f_basis,
    group_from_cayley,
    group_from_generators,
    group_from_json,
    klein,
    orthogonality_defects,
    parse_class_list,
    parse_cycles,
    quaternion,
    standard_group,
    symmetric,
)

CORPUS = {
    "trivial": lambda: cyclic(1),
    "Z2": lambda: cyclic(2),
    "Z3": lambda: cyclic(3),
    "Z2xZ2": klein,
    "S3": lambda: symmetric(3),
    "D4": lambda: dihedral(4),
    "Q8": quaternion,
    "A4": lambda: alternating(4),
}

# class counts of the corpus, frozen from standard tables
CLASS_COUNTS = {"trivial": 1, "Z2": 2, "Z3": 3, "Z2xZ2": 4, "S3": 3, "D4": 5, "Q8": 5, "A4": 4}
ORDERS = {"trivial": 1, "Z2": 2, "Z3": 3, "Z2xZ2": 4, "S3": 6, "D4": 8, "Q8": 8, "A4": 12}


def test_closure_examples():
    assert group_from_generators(["(1 2)"]).order == 2
    assert group_from_generators(["(1 2)", "(1 2 3)"]).order == 6
    d4 = group_from_generators(["(1 2 3 4)", "(1 3)"])
    assert d4.order == 8 and not d4.is_abelian()
    # flat list and list-of-cycles spellings agree
    assert group_from_generators([[1, 2, 3]]).order == group_from_generators([[[1, 2, 3]]]).order == 3


def test_closure_bound():
    with pytest.raises(GroupError, match="bound"):
        group_from_generators(["(1 2)", "(1 2 3 4 5 6 7 8)"], bound=100)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_orders_and_classes(name):
    g = CORPUS[name]()
    assert g.order == ORDERS[name]
    assert len(g.conjugacy) == CLASS_COUNTS[name]


def test_standard_names():
    assert standard_group("S4").order == 24
    assert standard_group("D5").order == 10
    assert standard_group("Z12").order == 12
    assert standard_group("V4").order == 4
    assert standard_group("trivial").order == 1
    with pytest.raises(InputError):
        standard_group("PSL27")


def test_conjugacy_examples():
    z2 = cyclic(2).conjugacy
    assert (len(z2), z2.sizes, z2.centralizers) == (2, (1, 1), (2, 2))
    s3 = symmetric(3).conjugacy
    assert sorted(s3.sizes) == [1, 2, 3]
    assert dict(zip(s3.sizes, s3.centralizers)) == {1: 6, 3: 2, 2: 3}
    z3 = cyclic(3).conjugacy
    assert z3.sizes == (1, 1, 1)
    assert z3.inverse == (0, 2, 1)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_inverse_class_involution(name):
    conj = CORPUS[name]().conjugacy
    assert all(conj.inverse[conj.inverse[k]] == k for k in range(len(conj)))
    assert sum(conj.sizes) == ORDERS[name]


def test_z2_table():
    t = cyclic(2).character_table
    assert t.dims == (1, 1)
    assert [[v.to_fraction() for v in row] for row in t.values] == [[1, 1], [1, -1]]
    assert t.nu == (Fraction(1, 4), Fraction(1, 4))


def test_s3_table():
    g = symmetric(3)
    t = g.character_table
    assert t.dims == (1, 1, 2)
    assert t.nu == (Fraction(1, 36), Fraction(1, 36), Fraction(1, 9))
    k3 = g.conjugacy.sizes.index(3)
    assert [t.chi(a, k3).to_fraction() for a in range(3)] == [1, -1, 0]


def test_z3_table_is_cyclotomic():
    t = cyclic(3).character_table
    z = Cyclotomic.zeta(3)
    vals = {t.chi(a, 1) for a in range(3)}
    assert vals == {Cyclotomic.rational(3, 1), z, z * z}
    assert orthogonality_defects(t) == []


@pytest.mark.parametrize("name", sorted(CORPUS) + ["S4", "A5", "Z12"])
def test_exact_orthogonality(name):
    g = CORPUS[name]() if name in CORPUS else standard_group(name)
    t = g.character_table
    assert orthogonality_defects(t) == []
    assert sum(d * d for d in t.dims) == g.order
    assert len(t) == len(g.conjugacy)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_nu_identity(name):
    t = CORPUS[name]().character_table
    n = t.group.order
    assert all(v > 0 for v in t.nu)
    assert sum(v * Fraction(n, d) ** 2 for v, d in zip(t.nu, t.dims)) == len(t)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_inverse_is_conjugate(name):
    t = CORPUS[name]().character_table
    for a in range(len(t)):
        for k in range(len(t)):
            assert t.chi_inv(a, k) == t.chi(a, k).conjugate()


def test_z2_f_basis():
    t = cyclic(2).character_table
    fb = f_basis(t)
    half = Fraction(1, 2)
    assert [[v.to_fraction() for v in row] for row in fb.f] == [[half, half], [half, -half]]
    assert [v.to_fraction() for v in fb.c[0]] == [1, 1]


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_f_basis_round_trip(name):
    t = CORPUS[name]().character_table
    fb = f_basis(t)
    r = len(t)
    for k in range(r):
        for l in range(r):
            s = sum((fb.c[k][a] * fb.f[a][l] for a in range(r)), Cyclotomic(t.conductor))
            assert s == int(k == l)
    for a in range(r):
        for b in range(r):
            s = sum((fb.f[a][k] * fb.c[k][b] for k in range(r)), Cyclotomic(t.conductor))
            assert s == int(a == b)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_f_sum_is_identity_indicator(name):
    t = CORPUS[name]().character_table
    total = ClassFunction.f(t, 0)
    for a in range(1, len(t)):
        total = total + ClassFunction.f(t, a)
    assert total == ClassFunction.indicator(t, 0)


def test_class_function_arithmetic():
    t = cyclic(2).character_table
    two_f = ClassFunction.f(t, 0) * 2
    assert two_f == ClassFunction.f(t, 0) + ClassFunction.f(t, 0)
    assert 2 * ClassFunction.f(t, 1) == ClassFunction.f(t, 1) + ClassFunction.f(t, 1)


def test_dixon_prime():
    assert dixon_prime(1, 1, 1) >= 3
    p = dixon_prime(6, 6, 3)
    assert p % 6 == 1 and p > 2 * 3 * 3


@settings(max_examples=25, deadline=None)
@given(st.lists(st.permutations(range(1, 6)), min_size=1, max_size=3))
def test_random_permutation_groups(perms):
    # permutation images become explicit cycle lists
    cyc = []
    for p in perms:
        seen, cycles = set(), []
        for s in range(1, 6):
            if s in seen:
                continue
            c, x = [], s
            while x not in seen:
                seen.add(x)
                c.append(x)
                x = p[x - 1]
            if len(c) > 1:
                cycles.append(c)
        if cycles:
            cyc.append(cycles)
    if not cyc:
        return
    g = group_from_generators(cyc)
    assert 120 % g.order == 0
    t = g.character_table
    assert orthogonality_defects(t) == []
    assert sum(d * d for d in t.dims) == g.order


def test_cayley_input():
    z3 = group_from_cayley([[0, 1, 2], [1, 2, 0], [2, 0, 1]])
    assert z3.order == 3 and z3.is_abelian()
    with pytest.raises(GroupError):
        group_from_cayley([[0, 1], [0, 1]])
    with pytest.raises(GroupError):
        group_from_cayley([[1, 0], [0, 1]])
    with pytest.raises(GroupError) as err:
        group_from_cayley([[0, 1], [1, "x"]])
    assert err.value.pointer == "/cayley/1"
    # a Latin square that is not associative
    bad = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(GroupError):
        group_from_cayley(bad)


def test_group_json():
    assert group_from_json({"generators": ["(1 2)", [[1, 2, 3]]]}).order == 6
    assert group_from_json({"name": "Q8"}).order == 8
    assert group_from_json({"cayley": [[0, 1], [1, 0]]}).order == 2
    with pytest.raises(GroupError) as err:
        group_from_json({"generators": ["(1 2)", 7]})
    assert err.value.pointer == "/generators/1"
    with pytest.raises(GroupError):
        group_from_json({"nothing": 1})


def test_cycle_parsing():
    assert parse_cycles("(1 2)(3 4 5)") == [[1, 2], [3, 4, 5]]
    assert parse_cycles("(12)") == [[1, 2]]
    with pytest.raises(InputError):
        parse_cycles("1 2")


def test_class_lists():
    g = symmetric(3)
    ks = parse_class_list(g, "(1),(1 2),(1 2 3)")
    assert [g.conjugacy.sizes[k] for k in ks] == [1, 3, 2]
    assert parse_class_list(g, "(2 3)") == parse_class_list(g, "(1 2)")
    assert parse_class_list(g, "c0, c2") == [0, 2]
    assert parse_class_list(g, "0") == [0]
    with pytest.raises(InputError):
        parse_class_list(g, "c9")
    with pytest.raises(InputError):
        parse_class_list(g, "(1 4)")
    assert class_name(g, 0) == "(1)"
    cay = group_from_cayley([[0, 1], [1, 0]])
    with pytest.raises(InputError):
        parse_class_list(cay, "(1 2)")
    assert parse_class_list(cay, "c1") == [1]
