"""The BG cohomological field theory in degree zero.

Omega_g(c_1, ..., c_n) is computed two ways: by counting tuples
(a_1, b_1, ..., a_g, b_g, x_1, ..., x_n) with x_j in c_j and
[a_1, b_1]...[a_g, b_g] x_1...x_n = 1, divided by |G|; and from the
character table through the f basis, where the theory is diagonal.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product
import random

import numpy as np

from .cyclotomic import Cyclotomic
from .errors import BudgetExceeded, InputError, VerificationError
from .groups import ClassFunction, FiniteGroup, f_basis

DEFAULT_BUDGET = 10**8


def budget() -> int:
    raw = os.environ.get("GERBYGW_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(float(raw))
    except ValueError:
        raise InputError(f"GERBYGW_BUDGET must be a number, got {raw!r}") from None


@dataclass(frozen=True)
class OmegaQuery:
    group: FiniteGroup
    genus: int
    classes: tuple

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(int(c) for c in self.classes))
        if self.genus < 0:
            raise InputError("genus must be non-negative", "/genus")
        if 2 * self.genus - 3 + len(self.classes) < 0:
            raise InputError(
                f"unstable: 2g-3+n = {2 * self.genus - 3 + len(self.classes)} < 0", "/classes"
            )
        r = len(self.group.conjugacy)
        for i, c in enumerate(self.classes):
            if not 0 <= c < r:
                raise InputError(f"class index {c} out of range", f"/classes/{i}")

    @property
    def size(self) -> int:
        return self.group.order ** (2 * self.genus + len(self.classes))


# -- brute force -----------------------------------------------------------------


def _step_matrix(group: FiniteGroup, weights):
    """M[x, z] = weights[x^-1 z]: right multiplication by a weighted element set."""
    t = group.np_table
    inv = np.asarray(group.inverses)
    return weights[t[inv, :]]


def _weights(group, elements):
    w = np.zeros(group.order, dtype=object)
    for e in elements:
        w[e] += 1
    return w


def _commutators(group):
    """Multiplicity of each element as a commutator a b a^-1 b^-1 over all pairs (a, b)."""
    t = group.np_table
    inv = np.asarray(group.inverses)
    ab = t
    ab_ainv = t[ab, inv[:, None]]
    comm = t[ab_ainv, inv[None, :]]
    return np.bincount(comm.ravel(), minlength=group.order).astype(object)


def _count_from(group, start, steps, last):
    v = start
    for m in steps:
        v = v.dot(m)
    if last is None:
        return int(v[0])
    return int(sum(v[x] for x in last))


def omega_bruteforce(q: OmegaQuery, threads: int = 1, limit: int | None = None) -> Fraction:
    """Exact tuple count over |G|.

    Tuples are aggregated by prefix product, so the work is linear in the
    number of factors; the last factor is forced by the prefix.  With
    ``threads > 1`` the first factor is split into disjoint ranges.
    """
    limit = budget() if limit is None else limit
    if q.size > limit:
        raise BudgetExceeded(f"|G|^(2g+n) = {q.size} exceeds the budget {limit}")
    group = q.group
    conj = group.conjugacy
    n = group.order
    factors = []
    if q.genus:
        cw = _commutators(group)
        factors += [cw] * q.genus
    classes = list(q.classes)
    last = None
    if classes:
        # the final x_n must equal the inverse of the prefix
        last = conj.classes[conj.inverse[classes.pop()]]
    factors += [_weights(group, conj.classes[c]) for c in classes]
    if not factors:
        start = np.zeros(n, dtype=object)
        start[0] = 1
        return Fraction(_count_from(group, start, [], last), n)
    first, rest = factors[0], [_step_matrix(group, w) for w in factors[1:]]
    support = [x for x in range(n) if first[x]]
    threads = max(1, min(int(threads), len(support)))
    chunks = [support[i::threads] for i in range(threads)]

    def run(chunk):
        start = np.zeros(n, dtype=object)
        for x in chunk:
            start[x] = first[x]
        return _count_from(group, start, rest, last)

    if threads == 1:
        total = run(chunks[0])
    else:
        with ThreadPoolExecutor(threads) as pool:
            total = sum(pool.map(run, chunks))
    return Fraction(total, n)


def omega_bruteforce_all(group: FiniteGroup, genus: int, n: int, limit: int | None = None):
    """Tuple counts for every ordered class tuple at once.

    Returns an integer array of shape (r,)*n whose entry at (c_1..c_n) is
    |G| * Omega_g(c_1..c_n), each computed by the same prefix aggregation
    as :func:`omega_bruteforce` but sharing prefixes across tuples.
    """
    limit = budget() if limit is None else limit
    size = group.order ** (2 * genus + n)
    if size > limit:
        raise BudgetExceeded(f"|G|^(2g+n) = {size} exceeds the budget {limit}")
    if 2 * genus - 3 + n < 0:
        raise InputError("unstable: 2g-3+n < 0")
    conj = group.conjugacy
    N, r = group.order, len(conj)
    dtype = np.int64 if size < 2**62 else object
    state = np.zeros((1, N), dtype=dtype)
    state[0, 0] = 1
    if genus:
        comm = _step_matrix(group, _commutators(group)).astype(dtype)
        for _ in range(genus):
            state = state.dot(comm)
    if n == 0:
        return np.asarray(state[0, 0], dtype=dtype)
    steps = np.stack([_step_matrix(group, _weights(group, cl)).astype(dtype) for cl in conj.classes])
    for _ in range(n - 1):
        state = np.einsum("ax,cxz->acz", state, steps).reshape(-1, N)
    close = np.zeros((N, r), dtype=dtype)
    for c in range(r):
        for x in conj.classes[conj.inverse[c]]:
            close[x, c] = 1
    return state.dot(close).reshape((r,) * n)


# -- character route ---------------------------------------------------------------


def _char_cache(group):
    return group.__dict__.setdefault("_omega_character_cache", {})


def omega_character(q: OmegaQuery) -> Fraction:
    """Sum over irreducibles of nu^(1-g) times the product of the f-basis coordinates."""
    group = q.group
    key = (q.genus, tuple(sorted(q.classes)))
    cache = _char_cache(group)
    if key in cache:
        return cache[key]
    table = group.character_table
    c = f_basis(table).c
    total = Cyclotomic(table.conductor)
    for a, nu in enumerate(table.nu):
        term = Cyclotomic.rational(table.conductor, nu ** (1 - q.genus))
        for k in q.classes:
            term = term * c[k][a]
        total = total + term
    if not total.is_rational():
        raise VerificationError(f"character sum is not rational: {total}")
    cache[key] = total.to_fraction()
    return cache[key]


def omega(group, genus, classes, method="char", threads=1) -> Fraction:
    """``method``: 'brute', 'char', or 'auto' (brute force when within budget)."""
    q = OmegaQuery(group, genus, tuple(classes))
    if method == "auto":
        method = "brute" if q.size <= budget() else "char"
    if method == "brute":
        return omega_bruteforce(q, threads)
    if method == "char":
        return omega_character(q)
    raise ValueError(f"unknown method {method!r}")


# -- pairing -------------------------------------------------------------------------


def _inverse(matrix):
    n = len(matrix)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c]), None)
        if piv is None:
            raise VerificationError("pairing matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return tuple(tuple(row[n:]) for row in aug)


@dataclass(frozen=True)
class PairingMatrix:
    h: tuple
    inverse: tuple

    def __len__(self):
        return len(self.h)


def pairing_closed_form(group: FiniteGroup) -> tuple:
    conj = group.conjugacy
    r = len(conj)
    return tuple(
        tuple(Fraction(int(l == conj.inverse[k]), conj.centralizers[k]) for l in range(r)) for k in range(r)
    )


def pairing(group: FiniteGroup, method="brute") -> PairingMatrix:
    """h(1_(g), 1_(h)) as the three-point genus-zero value with a unit insertion."""
    cache = group.__dict__.setdefault("_pairing_cache", {})
    if method not in cache:
        cache[method] = _pairing(group, method)
    return cache[method]


def _pairing(group, method):
    r = len(group.conjugacy)
    h = tuple(tuple(omega(group, 0, (k, l, 0), method) for l in range(r)) for k in range(r))
    inv = _inverse(h)
    ident = all(
        sum(h[i][k] * inv[k][j] for k in range(r)) == (i == j) for i in range(r) for j in range(r)
    )
    if not ident:
        raise VerificationError("pairing inverse check failed")
    return PairingMatrix(h, inv)


# -- multilinear correlators ----------------------------------------------------------


def lambda_correlator(group, genus, inputs, method="char") -> Cyclotomic:
    """Multilinear extension of Omega to class-function inputs."""
    table = group.character_table
    r = len(group.conjugacy)
    m = table.conductor
    for u in inputs:
        if len(u.values) != r:
            raise InputError("class function does not match the group's classes")
    total = Cyclotomic(m)
    supports = [[k for k in range(r) if u.values[k]] for u in inputs]
    for ks in product(*supports):
        coeff = Cyclotomic.rational(m, 1)
        for u, k in zip(inputs, ks):
            coeff = coeff * u.values[k]
        total = total + coeff * omega(group, genus, ks, method)
    return total


# -- axiom checks ------------------------------------------------------------------------


@dataclass
class CheckReport:
    name: str
    params: dict
    lhs: object
    rhs: object
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = self.lhs == self.rhs

    def to_json(self):
        from .graphs import format_fraction

        return {
            "check": self.name,
            "params": self.params,
            "lhs": format_fraction(self.lhs),
            "rhs": format_fraction(self.rhs),
            "passed": self.passed,
        }


def _stable(g, n):
    return 2 * g - 3 + n >= 0


def check_splitting(group, g1, g2, s1, s2, method="auto") -> CheckReport:
    s1, s2 = tuple(s1), tuple(s2)
    if not (_stable(g1, len(s1) + 1) and _stable(g2, len(s2) + 1)):
        raise InputError("both sides of the splitting must be stable")
    pair = pairing(group, "char" if method == "char" else "brute")
    r = len(group.conjugacy)
    lhs = omega(group, g1 + g2, s1 + s2, method)
    rhs = Fraction(0)
    for a in range(r):
        for b in range(r):
            hab = pair.inverse[a][b]
            if hab:
                rhs += hab * omega(group, g1, s1 + (a,), method) * omega(group, g2, s2 + (b,), method)
    params = {"g1": g1, "g2": g2, "S1": list(s1), "S2": list(s2)}
    return CheckReport("splitting", params, lhs, rhs)


def check_genus_reduction(group, genus, classes, method="auto") -> CheckReport:
    classes = tuple(classes)
    if genus < 1 or not _stable(genus, len(classes)) or not _stable(genus - 1, len(classes) + 2):
        raise InputError("genus reduction needs g >= 1 and both sides stable")
    pair = pairing(group, "char" if method == "char" else "brute")
    r = len(group.conjugacy)
    lhs = omega(group, genus, classes, method)
    rhs = Fraction(0)
    for a in range(r):
        for b in range(r):
            hab = pair.inverse[a][b]
            if hab:
                rhs += hab * omega(group, genus - 1, classes + (a, b), method)
    return CheckReport("genus_reduction", {"g": genus, "classes": list(classes)}, lhs, rhs)


def check_covariance(group, genus, classes, rng=None, trials=3, method="auto") -> CheckReport:
    rng = rng or random.Random(0)
    classes = list(classes)
    base = omega(group, genus, classes, method)
    worst = base
    for _ in range(trials):
        perm = classes[:]
        rng.shuffle(perm)
        val = omega(group, genus, perm, method)
        if val != base:
            worst = val
            break
    return CheckReport("covariance", {"g": genus, "classes": classes}, base, worst)


def cohft_checks(group, max_genus=2, max_points=4, method="auto", rng=None) -> list:
    """Every axiom check in range, one report per check.

    Class lists run over multisets; covariance covers the orderings.
    """
    rng = rng or random.Random(0)
    r = len(group.conjugacy)
    out = []
    for n in range(max_points + 1):
        for n1 in range(n + 1):
            for g1 in range(max_genus + 1):
                for g2 in range(max_genus - g1 + 1):
                    if not (_stable(g1, n1 + 1) and _stable(g2, n - n1 + 1)):
                        continue
                    for s1 in combinations_with_replacement(range(r), n1):
                        for s2 in combinations_with_replacement(range(r), n - n1):
                            out.append(check_splitting(group, g1, g2, s1, s2, method))
        for g in range(1, max_genus + 1):
            if _stable(g, n) and _stable(g - 1, n + 2):
                for cl in combinations_with_replacement(range(r), n):
                    out.append(check_genus_reduction(group, g, cl, method))
        for g in range(max_genus + 1):
            if _stable(g, n) and n > 1:
                for cl in combinations_with_replacement(range(r), n):
                    out.append(check_covariance(group, g, cl, rng, method=method))
    return out


def f_inputs(group, alphas) -> list:
    table = group.character_table
    return [ClassFunction.f(table, a) for a in alphas]
