"""Finite groups by Cayley table, with their exact character tables.

Character tables are computed with the Burnside-Dixon-Schneider class-sum
method: simultaneous eigenvectors of the class multiplication matrices over
GF(p) for a prime p = 1 (mod exponent), lifted to Q(zeta_m) through
eigenvalue multiplicities, then checked exactly with both orthogonality
relations.  An unverified table is never returned.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import isqrt, lcm
from typing import Mapping, Sequence

import numpy as np

from .cyclotomic import Cyclotomic
from .errors import GroupError, InputError, VerificationError

DEFAULT_BOUND = 5040


class FiniteGroup:
    """Group on element indices ``0..n-1`` with identity 0.

    ``elements`` holds the permutations (as tuples over ``points``) when the
    group was generated from permutations.
    """

    def __init__(self, table, elements=None, points=None, generators=None, check=True):
        table = tuple(tuple(int(x) for x in row) for row in table)
        self.order = len(table)
        self.table = table
        self.elements = elements
        self.points = points
        self.generators = generators
        if check:
            _check_table(table)
        inv = [0] * self.order
        for a, row in enumerate(table):
            inv[a] = row.index(0)
        self.inverses = tuple(inv)

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    def mul(self, a, b) -> int:
        return self.table[a][b]

    def inv(self, a) -> int:
        return self.inverses[a]

    def power(self, a, k) -> int:
        out = 0
        for _ in range(k % self.element_order(a) if k >= 0 else 0):
            out = self.table[out][a]
        if k < 0:
            return self.power(self.inv(a), -k)
        return out

    def element_order(self, a) -> int:
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    @cached_property
    def np_table(self):
        return np.asarray(self.table, dtype=np.int32)

    @cached_property
    def conjugacy(self) -> "ConjugacyData":
        return conjugacy(self)

    @cached_property
    def character_table(self) -> "CharacterTable":
        return character_table(self)

    def is_abelian(self) -> bool:
        return all(self.table[a][b] == self.table[b][a] for a in range(self.order) for b in range(a))

    def element_name(self, a) -> str:
        if self.elements is None:
            return f"#{a}"
        return format_cycles(self.elements[a], self.points)

    def find_permutation(self, perm) -> int:
        if self.elements is None:
            raise InputError("group has no permutation provenance; name classes as c<k> or element indices")
        try:
            return self.elements.index(perm)
        except ValueError:
            raise InputError(f"permutation {format_cycles(perm, self.points)} is not in the group") from None


def _check_table(table, samples=20000):
    n = len(table)
    if n == 0:
        raise GroupError("empty Cayley table")
    full = set(range(n))
    for i, row in enumerate(table):
        if len(row) != n:
            raise GroupError(f"row {i} has length {len(row)}, expected {n}", f"/cayley/{i}")
        if set(row) != full:
            raise GroupError(f"row {i} is not a permutation of the elements", f"/cayley/{i}")
    for j in range(n):
        if {table[i][j] for i in range(n)} != full:
            raise GroupError(f"column {j} is not a permutation of the elements", "/cayley")
    if any(table[0][j] != j or table[j][0] != j for j in range(n)):
        raise GroupError("element 0 must be the identity", "/cayley/0")
    if n <= 64:
        triples = ((a, b, c) for a in range(n) for b in range(n) for c in range(n))
    else:
        rng = random.Random(0)
        triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(samples))
    for a, b, c in triples:
        if table[table[a][b]][c] != table[a][table[b][c]]:
            raise GroupError(f"not associative at ({a}, {b}, {c})", "/cayley")


# -- permutations --------------------------------------------------------------

_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str) -> list:
    """Parse "(1 2)(3 4)" or "(12)(34)" (single-character points) into cycles."""
    text = text.strip()
    if not text or _CYCLE.sub("", text).strip():
        raise InputError(f"cannot parse permutation {text!r}")
    cycles = []
    for body in _CYCLE.findall(text):
        parts = [p for p in re.split(r"[\s,]+", body.strip()) if p]
        if len(parts) == 1 and len(parts[0]) > 1 and parts[0].isdigit():
            parts = list(parts[0])
        cycles.append([int(p) if p.lstrip("-").isdigit() else p for p in parts])
    return cycles


def _perm_from_cycles(cycles, points) -> tuple:
    where = {p: i for i, p in enumerate(points)}
    img = list(range(len(points)))
    seen = set()
    for cyc in cycles:
        for p in cyc:
            if p in seen:
                raise InputError(f"point {p!r} repeated in {cycles!r}")
            seen.add(p)
        if len(cyc) < 2:
            continue
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if a not in where or b not in where:
                raise InputError(f"point outside the permutation domain in {cycles!r}")
            img[where[a]] = where[b]
    return tuple(img)


def format_cycles(perm, points) -> str:
    seen, out = set(), []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(points[j])
            j = perm[j]
        out.append("(" + " ".join(str(c) for c in cyc) + ")")
    return "".join(out) or f"({points[0]})" if points else "()"


def group_from_generators(perms: Sequence, bound: int = DEFAULT_BOUND) -> FiniteGroup:
    """Close permutation generators under composition.

    Each generator is a list of cycles or a cycle string.  Elements are
    indexed breadth-first from the identity, generators taken in the given
    order; the product ``p*q`` applies ``p`` first.
    """
    cycle_lists = []
    for p in perms:
        if isinstance(p, str):
            cycle_lists.append(parse_cycles(p))
        elif p and not isinstance(p[0], (list, tuple)):
            cycle_lists.append([list(p)])  # a single flat cycle
        else:
            cycle_lists.append([list(c) for c in p])
    points = sorted({x for cycles in cycle_lists for c in cycles for x in c}, key=lambda x: (str(type(x)), x))
    if not points:
        points = [1]
    gens = [_perm_from_cycles(c, points) for c in cycle_lists]
    k = len(points)
    ident = tuple(range(k))
    elements = [ident]
    index = {ident: 0}
    head = 0
    while head < len(elements):
        x = elements[head]
        head += 1
        for s in gens:
            y = tuple(s[x[i]] for i in range(k))
            if y not in index:
                if len(elements) >= bound:
                    raise GroupError(f"closure exceeds the bound of {bound} elements")
                index[y] = len(elements)
                elements.append(y)
    n = len(elements)
    arr = np.asarray(elements, dtype=np.int64)
    table = []
    for i in range(n):
        # (x*y)(p) = y(x(p)): compose row i with every element
        comp = arr[:, arr[i]]
        table.append([index[tuple(row)] for row in comp.tolist()])
    return FiniteGroup(table, elements, tuple(points), tuple(gens), check=False)


def group_from_cayley(rows) -> FiniteGroup:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise GroupError("cayley must be a list of rows", "/cayley")
    for i, r in enumerate(rows):
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in r):
            raise GroupError("Cayley entries must be integers", f"/cayley/{i}")
    return FiniteGroup(rows)


def cyclic(n) -> FiniteGroup:
    return group_from_generators([[list(range(1, n + 1))]] if n > 1 else [])


def symmetric(n) -> FiniteGroup:
    if n < 2:
        return cyclic(1)
    return group_from_generators([[[1, 2]], [list(range(1, n + 1))]])


def alternating(n) -> FiniteGroup:
    gens = [[[1, 2, k]] for k in range(3, n + 1)]
    return group_from_generators(gens) if gens else cyclic(1)


def dihedral(n) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n."""
    if n == 2:
        return klein()
    if n < 2:
        return cyclic(2 * n)
    refl = [[1 + i, n + 1 - i] for i in range(1, (n + 1) // 2)]
    return group_from_generators([[list(range(1, n + 1))], refl])


def quaternion() -> FiniteGroup:
    return group_from_generators(["(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)"])


def klein() -> FiniteGroup:
    return group_from_generators(["(1 2)(3 4)", "(1 3)(2 4)"])


def standard_group(name: str) -> FiniteGroup:
    """Names: trivial, Z<n>, S<n>, A<n>, D<n> (order 2n), Q8, Z2xZ2/V4."""
    key = name.strip().upper().replace("/", "").replace(" ", "")
    if key in ("1", "TRIVIAL", "Z1", "C1"):
        return cyclic(1)
    if key in ("Q8",):
        return quaternion()
    if key in ("Z2XZ2", "V4", "KLEIN"):
        return klein()
    m = re.fullmatch(r"([ZCSAD])(\d+)", key)
    if m:
        kind, n = m.group(1), int(m.group(2))
        return {"Z": cyclic, "C": cyclic, "S": symmetric, "A": alternating, "D": dihedral}[kind](n)
    raise InputError(f"unknown group name {name!r}")


def group_from_json(raw) -> FiniteGroup:
    if not isinstance(raw, Mapping):
        raise GroupError("group must be a JSON object", "")
    if "generators" in raw:
        gens = raw["generators"]
        if not isinstance(gens, list):
            raise GroupError("generators must be a list", "/generators")
        for i, g in enumerate(gens):
            ok = isinstance(g, str) or (
                isinstance(g, list)
                and (all(isinstance(c, list) for c in g) or all(isinstance(c, (int, str)) for c in g))
            )
            if not ok:
                raise GroupError("generator must be a list of cycles or a cycle string", f"/generators/{i}")
        try:
            return group_from_generators(gens, raw.get("bound", DEFAULT_BOUND))
        except InputError as exc:
            if exc.pointer is None:
                exc.pointer = "/generators"
            raise
    if "cayley" in raw:
        return group_from_cayley(raw["cayley"])
    if "name" in raw:
        return standard_group(raw["name"])
    raise GroupError("group needs 'generators', 'cayley' or 'name'", "")


# -- conjugacy -----------------------------------------------------------------


@dataclass(frozen=True)
class ConjugacyData:
    classes: tuple
    class_of: tuple
    sizes: tuple
    centralizers: tuple
    inverse: tuple
    exponent: int

    @property
    def reps(self) -> tuple:
        return tuple(c[0] for c in self.classes)

    def __len__(self):
        return len(self.classes)


def conjugacy(group: FiniteGroup) -> ConjugacyData:
    n = group.order
    t, inv = group.table, group.inverses
    class_of = [-1] * n
    classes = []
    for x in range(n):
        if class_of[x] >= 0:
            continue
        orbit = sorted({t[t[g][x]][inv[g]] for g in range(n)})
        for y in orbit:
            class_of[y] = len(classes)
        classes.append(tuple(orbit))
    sizes = tuple(len(c) for c in classes)
    inverse = tuple(class_of[inv[c[0]]] for c in classes)
    exponent = lcm(*(group.element_order(c[0]) for c in classes))
    return ConjugacyData(
        tuple(classes), tuple(class_of), sizes, tuple(n // s for s in sizes), inverse, exponent
    )


def parse_class_list(group: FiniteGroup, text: str) -> list:
    """Class indices from "(1),(1 2)" style text; also accepts c<k> and element indices."""
    tokens, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            tokens.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        tokens.append(cur)
    conj = group.conjugacy
    out = []
    for tok in (t.strip() for t in tokens):
        if not tok:
            continue
        if re.fullmatch(r"c\d+", tok):
            k = int(tok[1:])
            if k >= len(conj):
                raise InputError(f"class index {tok} out of range")
            out.append(k)
        elif tok.isdigit():
            a = int(tok)
            if a >= group.order:
                raise InputError(f"element index {a} out of range")
            out.append(conj.class_of[a])
        else:
            cycles = parse_cycles(tok)
            if all(len(c) < 2 for c in cycles):
                out.append(conj.class_of[0])
                continue
            if group.points is None:
                raise InputError("cycle notation needs a permutation group")
            perm = _perm_from_cycles(cycles, group.points)
            out.append(conj.class_of[group.find_permutation(perm)])
    return out


def class_name(group: FiniteGroup, k: int) -> str:
    return group.element_name(group.conjugacy.reps[k])


# -- modular linear algebra ----------------------------------------------------


def _rref(rows, p):
    rows = [list(r) for r in rows]
    pivots = []
    ncols = len(rows[0]) if rows else 0
    r = 0
    for c in range(ncols):
        sel = next((i for i in range(r, len(rows)) if rows[i][c] % p), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        iv = pow(rows[r][c], -1, p)
        rows[r] = [(x * iv) % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def _nullspace(mat, p):
    """Right nullspace of ``mat`` as a list of row vectors."""
    n = len(mat[0])
    red, piv = _rref(mat, p)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for fcol in free:
        v = [0] * n
        v[fcol] = 1
        for row, pc in zip(red, piv):
            v[pc] = (-row[fcol]) % p
        basis.append(v)
    return basis


def _matmul(a, b, p):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) % p for col in bt] for row in a]


def _charpoly(a, p):
    """Characteristic polynomial mod p (lowest degree first), Faddeev-LeVerrier."""
    n = len(a)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        mk = _matmul(a, mk, p)
        for i in range(n):
            mk[i][i] = (mk[i][i] + coeffs[n - k + 1]) % p
        am = _matmul(a, mk, p)
        tr = sum(am[i][i] for i in range(n)) % p
        coeffs[n - k] = (-tr * pow(k, -1, p)) % p
    return coeffs


def _roots(poly, p):
    out = []
    for x in range(p):
        acc = 0
        for c in reversed(poly):
            acc = (acc * x + c) % p
        if acc == 0:
            out.append(x)
    return out


def dixon_prime(order: int, exponent: int, max_class: int) -> int:
    from sympy import nextprime

    bound = 2 * isqrt(order - 1) + 2 if order > 1 else 2  # 2*ceil(sqrt(order))
    if order > 1 and isqrt(order) ** 2 == order:
        bound = 2 * isqrt(order)
    bound *= max_class
    p = nextprime(bound)
    while p % exponent != 1 % exponent:
        p = nextprime(p)
    return int(p)


# -- characters ------------------------------------------------------------------


@dataclass(frozen=True)
class CharacterTable:
    group: FiniteGroup
    conductor: int
    values: tuple  # values[alpha][k] = chi_alpha(g_k)
    dims: tuple
    prime: int

    @property
    def conjugacy(self) -> ConjugacyData:
        return self.group.conjugacy

    def __len__(self):
        return len(self.values)

    @property
    def nu(self) -> tuple:
        n = self.group.order
        return tuple(Fraction(d, n) ** 2 for d in self.dims)

    def chi(self, alpha, k) -> Cyclotomic:
        return self.values[alpha][k]

    def chi_inv(self, alpha, k) -> Cyclotomic:
        return self.values[alpha][self.conjugacy.inverse[k]]


def class_matrices(group: FiniteGroup):
    """M[j][k][l] = #{x in C_j : x^-1 z_l in C_k}, z_l the representative of C_l."""
    conj = group.conjugacy
    r = len(conj)
    t, inv = group.table, group.inverses
    mats = []
    for j in range(r):
        m = [[0] * r for _ in range(r)]
        for l, z in enumerate(conj.reps):
            for x in conj.classes[j]:
                m[conj.class_of[t[inv[x]][z]]][l] += 1
        mats.append(m)
    return mats


def _simultaneous_eigenvectors(mats, p):
    r = len(mats[0])
    spaces = [[[int(i == j) for j in range(r)] for i in range(r)]]
    for m in mats[1:]:
        if all(len(s) == 1 for s in spaces):
            break
        b = [list(col) for col in zip(*m)]  # row vectors v with v b = lambda v
        refined = []
        for s in spaces:
            if len(s) == 1:
                refined.append(s)
                continue
            s, piv = _rref(s, p)
            sb = _matmul(s, b, p)
            restr = [[row[c] for c in piv] for row in sb]
            k = len(restr)
            dim = 0
            for lam in _roots(_charpoly(restr, p), p):
                shifted = [[(restr[i][j] - (lam if i == j else 0)) % p for i in range(k)] for j in range(k)]
                coords = _nullspace(shifted, p)
                dim += len(coords)
                refined.append(_rref(_matmul(coords, s, p), p)[0])
            if dim != k:
                raise VerificationError("class matrices not diagonalizable mod p")
        spaces = refined
    if len(spaces) != r or any(len(s) != 1 for s in spaces):
        raise VerificationError("class matrices do not separate the characters")
    return [s[0] for s in spaces]


def character_table(group: FiniteGroup) -> CharacterTable:
    from sympy import primitive_root

    conj = group.conjugacy
    n, r, m = group.order, len(conj), conj.exponent
    p = dixon_prime(n, m, max(conj.sizes))
    vecs = _simultaneous_eigenvectors(class_matrices(group), p)
    z = pow(int(primitive_root(p)), (p - 1) // m, p)
    powmap = []
    for k, rep in enumerate(conj.reps):
        e = group.element_order(rep)
        cls, x = [], 0
        for _ in range(e):
            cls.append(conj.class_of[x])
            x = group.table[x][rep]
        powmap.append(cls)
    rows = []
    for v in vecs:
        iv0 = pow(v[0], -1, p)
        omega = [(x * iv0) % p for x in v]
        tot = sum(omega[k] * omega[conj.inverse[k]] * pow(conj.sizes[k], -1, p) for k in range(r)) % p
        d2 = (n * pow(tot, -1, p)) % p
        d = next((d for d in range(1, isqrt(n) + 1) if d * d % p == d2), None)
        if d is None:
            raise VerificationError("no integer degree matches mod p")
        chi_p = [(d * omega[k] * pow(conj.sizes[k], -1, p)) % p for k in range(r)]
        row = []
        for k in range(r):
            e = len(powmap[k])
            ze = pow(z, m // e, p)
            ie = pow(e, -1, p)
            val = Cyclotomic(m)
            for l in range(e):
                s = sum(chi_p[powmap[k][i]] * pow(ze, (-i * l) % e, p) for i in range(e)) % p
                mult = (s * ie) % p
                if mult > d:
                    raise VerificationError("eigenvalue multiplicity out of range")
                if mult:
                    val = val + Cyclotomic.zeta(m, l * (m // e)) * mult
            row.append(val)
        rows.append((d, tuple(row)))

    def key(item):
        d, row = item
        trivial = all(v == 1 for v in row)
        return (d, not trivial, tuple(v.coeffs for v in row))

    rows.sort(key=key)
    table = CharacterTable(group, m, tuple(r_ for _, r_ in rows), tuple(d for d, _ in rows), p)
    verify_character_table(table)
    return table


def orthogonality_defects(table: CharacterTable) -> list:
    conj = table.conjugacy
    n, r = table.group.order, len(conj)
    out = []
    for a in range(r):
        for b in range(r):
            s = sum((table.chi(a, k) * table.chi_inv(b, k) * conj.sizes[k] for k in range(r)), Cyclotomic(table.conductor))
            if s != (n if a == b else 0):
                out.append(("row", a, b, s))
    for k in range(r):
        for l in range(r):
            s = sum((table.chi_inv(a, k) * table.chi(a, l) for a in range(r)), Cyclotomic(table.conductor))
            if s != (conj.centralizers[k] if k == l else 0):
                out.append(("column", k, l, s))
    if sum(d * d for d in table.dims) != n:
        out.append(("dims", sum(d * d for d in table.dims)))
    if any(table.values[a][0] != table.dims[a] for a in range(r)):
        out.append(("identity column",))
    return out


def verify_character_table(table: CharacterTable) -> None:
    bad = orthogonality_defects(table)
    if bad:
        raise VerificationError(f"character table failed exact verification: {bad[:3]}")


# -- class functions and the f basis ----------------------------------------------


@dataclass(frozen=True)
class ClassFunction:
    values: tuple  # one Cyclotomic per conjugacy class

    @classmethod
    def indicator(cls, table: CharacterTable, k: int) -> "ClassFunction":
        m = table.conductor
        return cls(tuple(Cyclotomic.rational(m, int(i == k)) for i in range(len(table))))

    @classmethod
    def f(cls, table: CharacterTable, alpha: int) -> "ClassFunction":
        return cls(f_basis(table).f[alpha])

    def __add__(self, other):
        return ClassFunction(tuple(a + b for a, b in zip(self.values, other.values)))

    def __mul__(self, scalar):
        return ClassFunction(tuple(a * scalar for a in self.values))

    __rmul__ = __mul__


@dataclass(frozen=True)
class FBasis:
    f: tuple  # f[alpha][k]: coefficient of 1_(g_k) in f_alpha
    c: tuple  # c[k][alpha]: coefficient of f_alpha in 1_(g_k)


def f_basis(table: CharacterTable) -> FBasis:
    conj = table.conjugacy
    n, r = table.group.order, len(conj)
    f = tuple(
        tuple(table.chi_inv(a, k) * Fraction(table.dims[a], n) for k in range(r)) for a in range(r)
    )
    c = tuple(
        tuple(table.chi(a, k) * Fraction(n, table.dims[a] * conj.centralizers[k]) for a in range(r))
        for k in range(r)
    )
    return FBasis(f, c)
