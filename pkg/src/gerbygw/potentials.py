"""Truncated descendant potentials built from toy correlator tables, with the decomposition check.

Monomial convention: F^g sums over ordered insertion tuples and divides by
n!, so the monomial prod t_v^{m_v} carries value / prod(m_v!).

Truncation: a term hbar^h Q^beta t^m has weight 3h + 2|m|.  Every term of
hbar^{g-1} F^g has weight 3g - 3 + 2n >= 2, weight is additive, so keeping
weight <= 3(gmax - 1) + 2 tdeg and |m| <= tdeg is closed under products and
exp/log are exact in the window.  Every term of genus <= gmax and t-degree
<= tdeg survives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import factorial, prod
from typing import Mapping

from .errors import BudgetExceeded, InputError
from .graphs import add_classes, format_fraction, is_zero_class, parse_fraction

MAX_TERMS = 2_000_000


@dataclass(frozen=True)
class CorrelatorTable:
    """Toy correlators <prod tau_k(gamma_j)>_{g,beta}; j is 1-based."""

    basis_rank: int
    entries: Mapping[tuple, Fraction]
    class_rank: int = 0

    def get(self, g, beta, insertions):
        key = (g, _norm_beta(beta, self.class_rank), tuple(sorted(tuple(x) for x in insertions)))
        return self.entries.get(key)

    @classmethod
    def from_entries(cls, basis_rank, entries, class_rank=None):
        """``entries``: iterable of (g, beta, insertions, value)."""
        out = {}
        entries = list(entries)
        if class_rank is None:
            class_rank = max((len(e[1]) for e in entries), default=0)
        for g, beta, ins, value in entries:
            key = (g, _norm_beta(beta, class_rank), tuple(sorted(tuple(x) for x in ins)))
            value = Fraction(value)
            if key in out and out[key] != value:
                raise InputError(f"conflicting values for {key}")
            out[key] = value
        table = cls(basis_rank, out, class_rank)
        table.validate()
        return table

    def validate(self):
        for g, beta, ins in self.entries:
            if g < 0 or 2 * g - 3 + len(ins) < 0:
                raise InputError(f"unstable correlator key g={g}, n={len(ins)}")
            for j, k in ins:
                if not 1 <= j <= self.basis_rank or k < 0:
                    raise InputError(f"insertion ({j}, {k}) out of range")
            if any(b < 0 for b in beta):
                raise InputError("curve classes must be effective")

    @property
    def genera(self) -> set:
        return {k[0] for k in self.entries}

    def to_json(self) -> dict:
        return {
            "basis_rank": self.basis_rank,
            "entries": [
                {"g": g, "beta": list(beta), "insertions": [list(x) for x in ins], "value": format_fraction(v)}
                for (g, beta, ins), v in sorted(self.entries.items())
            ],
        }


def _norm_beta(beta, rank) -> tuple:
    beta = tuple(int(b) for b in beta)
    if len(beta) > rank and any(beta[rank:]):
        raise InputError(f"curve class {beta} longer than the class rank {rank}")
    return (beta + (0,) * rank)[:rank]


def table_from_json(raw) -> CorrelatorTable:
    if not isinstance(raw, Mapping):
        raise InputError("correlator table must be a JSON object", "")
    r = raw.get("basis_rank")
    if not isinstance(r, int) or isinstance(r, bool) or r < 1:
        raise InputError("basis_rank must be a positive integer", "/basis_rank")
    entries = raw.get("entries")
    if not isinstance(entries, list):
        raise InputError("entries must be a list", "/entries")
    rows, rank = [], None
    for i, e in enumerate(entries):
        ptr = f"/entries/{i}"
        if not isinstance(e, Mapping):
            raise InputError("entry must be an object", ptr)
        g = e.get("g")
        if not isinstance(g, int) or isinstance(g, bool) or g < 0:
            raise InputError("g must be a non-negative integer", ptr + "/g")
        beta = e.get("beta", [])
        if not isinstance(beta, list) or not all(isinstance(b, int) and not isinstance(b, bool) and b >= 0 for b in beta):
            raise InputError("beta must be a list of non-negative integers", ptr + "/beta")
        if rank is None:
            rank = len(beta)
        elif len(beta) != rank:
            raise InputError("all beta vectors must share one length", ptr + "/beta")
        ins = e.get("insertions")
        if not isinstance(ins, list):
            raise InputError("insertions must be a list", ptr + "/insertions")
        for k, x in enumerate(ins):
            ok = isinstance(x, list) and len(x) == 2 and all(isinstance(y, int) and not isinstance(y, bool) for y in x)
            if not ok or not 1 <= x[0] <= r or x[1] < 0:
                raise InputError("insertion must be [j, k] with 1 <= j <= basis_rank, k >= 0", f"{ptr}/insertions/{k}")
        if 2 * g - 3 + len(ins) < 0:
            raise InputError("unstable correlator (2g-3+n < 0)", ptr)
        if "value" not in e:
            raise InputError("missing value", ptr + "/value")
        rows.append((g, tuple(beta), [tuple(x) for x in ins], parse_fraction(e["value"], ptr + "/value")))
    try:
        return CorrelatorTable.from_entries(r, rows, rank or 0)
    except InputError as exc:
        exc.pointer = exc.pointer or "/entries"
        raise


# -- product theory ----------------------------------------------------------------


def _lambda_f(group, genus, alphas, method):
    """Lambda on f-basis inputs, expanded through the 1-basis values of Omega."""
    from .bgcohft import lambda_correlator
    from .groups import ClassFunction

    key = (genus, tuple(sorted(alphas)), method)
    cache = group.__dict__.setdefault("_lambda_f_cache", {})
    if key not in cache:
        table = group.character_table
        val = lambda_correlator(group, genus, [ClassFunction.f(table, a) for a in alphas], method)
        cache[key] = val.to_fraction()
    return cache[key]


def product_value(table, group, g, beta, insertions, basis="f", method="char", missing=None) -> Fraction:
    """Correlator of X x BG; ``insertions`` are ((j, k), label) with label an
    irreducible index (f basis) or a class index (1 basis)."""
    from .bgcohft import omega

    insertions = list(insertions)
    base = table.get(g, beta, [jk for jk, _ in insertions])
    if base is None:
        if missing is not None:
            missing.append((g, tuple(beta), tuple(sorted(insertions))))
        return Fraction(0)
    labels = [lab for _, lab in insertions]
    if basis == "one":
        return base * omega(group, g, labels, method)
    if basis == "f":
        return base * _lambda_f(group, g, labels, method)
    raise ValueError(f"unknown basis {basis!r}")


def _label_assignments(insertions, r):
    """Distinct multisets of ((j, k), label) over a multiset of (j, k)."""
    groups = {}
    for x in insertions:
        groups[x] = groups.get(x, 0) + 1
    keys = sorted(groups)
    for choice in product(*(combinations_with_replacement(range(r), groups[k]) for k in keys)):
        yield tuple(sorted((k, lab) for k, labs in zip(keys, choice) for lab in labs))


@dataclass
class ProductTable:
    basis: str
    entries: dict
    missing: list = field(default_factory=list)


def product_table(table: CorrelatorTable, group, basis="f", method="char", max_genus=None) -> ProductTable:
    r = len(group.conjugacy)
    out = ProductTable(basis, {})
    for (g, beta, ins), _ in sorted(table.entries.items()):
        if max_genus is not None and g > max_genus:
            continue
        for lab in _label_assignments(ins, r):
            out.entries[(g, beta, lab)] = product_value(table, group, g, beta, lab, basis, method, out.missing)
    return out


# -- truncated potentials -------------------------------------------------------------


@dataclass(frozen=True)
class Bounds:
    tdeg: int = 4
    gmax: int = 2

    def __post_init__(self):
        if self.tdeg < 0 or self.gmax < 0:
            raise InputError("truncation bounds must be non-negative")

    @property
    def weight(self) -> int:
        return 3 * (self.gmax - 1) + 2 * self.tdeg

    def admits(self, h, tdeg) -> bool:
        return tdeg <= self.tdeg and 3 * h + 2 * tdeg <= self.weight


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _tdeg(mono) -> int:
    return sum(e for _, e in mono)


def _weight(key) -> int:
    h, _, mono = key
    return 3 * h + 2 * _tdeg(mono)


class TruncatedPotential:
    """Finite sum of c * hbar^h Q^beta prod t_v^e; keys are (h, beta, monomial)."""

    def __init__(self, bounds: Bounds, terms=None, class_rank=0):
        self.bounds = bounds
        self.class_rank = class_rank
        self.terms = {}
        for key, c in (terms or {}).items():
            self._add(key, Fraction(c))

    def _add(self, key, c):
        h, beta, mono = key
        if not c or not self.bounds.admits(h, _tdeg(mono)):
            return
        beta = tuple(beta) + (0,) * (self.class_rank - len(beta))
        key = (h, beta, mono)
        v = self.terms.get(key, 0) + c
        if v:
            self.terms[key] = v
        else:
            self.terms.pop(key, None)

    @classmethod
    def one(cls, bounds, class_rank=0):
        return cls(bounds, {(0, (0,) * class_rank, ()): 1}, class_rank)

    def copy(self):
        out = TruncatedPotential(self.bounds, class_rank=self.class_rank)
        out.terms = dict(self.terms)
        return out

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return isinstance(other, TruncatedPotential) and self.terms == other.terms

    def __add__(self, other):
        out = self.copy()
        for key, c in other.terms.items():
            out._add(key, c)
        return out

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, q):
        q = Fraction(q)
        out = TruncatedPotential(self.bounds, class_rank=self.class_rank)
        if q:
            out.terms = {k: c * q for k, c in self.terms.items()}
        return out

    def __mul__(self, other):
        if not isinstance(other, TruncatedPotential):
            return self.scale(other)
        out = TruncatedPotential(self.bounds, class_rank=max(self.class_rank, other.class_rank))
        for (h1, b1, m1), c1 in self.terms.items():
            for (h2, b2, m2), c2 in other.terms.items():
                h = h1 + h2
                t = _tdeg(m1) + _tdeg(m2)
                if not self.bounds.admits(h, t):
                    continue
                out._add((h, add_classes(b1, b2), _mono_mul(m1, m2)), c1 * c2)
            if len(out.terms) > MAX_TERMS:
                raise BudgetExceeded("truncated potential grew past the term limit")
        return out

    def shift_hbar(self, k):
        out = TruncatedPotential(self.bounds, class_rank=self.class_rank)
        for (h, b, m), c in self.terms.items():
            out._add((h + k, b, m), c)
        return out

    def map_vars(self, fn):
        out = TruncatedPotential(self.bounds, class_rank=self.class_rank)
        for (h, b, m), c in self.terms.items():
            d = {}
            for v, e in m:
                w = fn(v)
                d[w] = d.get(w, 0) + e
            out._add((h, b, tuple(sorted(d.items()))), c)
        return out

    def components(self) -> dict:
        out = {}
        for key, c in self.terms.items():
            out.setdefault(_weight(key), {})[key] = c
        return {w: TruncatedPotential(self.bounds, t, self.class_rank) for w, t in out.items()}

    def constant(self) -> Fraction:
        return self.terms.get((0, (0,) * self.class_rank, ()), Fraction(0))

    def exp(self) -> "TruncatedPotential":
        comps = self.components()
        if any(w <= 0 for w in comps):
            raise ValueError("exp needs every term of positive weight")
        one = TruncatedPotential.one(self.bounds, self.class_rank)
        e = {0: one}
        for n in range(1, self.bounds.weight + 1):
            acc = TruncatedPotential(self.bounds, class_rank=self.class_rank)
            for i, fi in comps.items():
                if i <= n and (n - i) in e:
                    acc = acc + (fi * e[n - i]).scale(i)
            e[n] = acc.scale(Fraction(1, n))
        out = one
        for n in range(1, self.bounds.weight + 1):
            out = out + e[n]
        return out

    def log(self) -> "TruncatedPotential":
        comps = self.components()
        if comps.get(0) is None or comps[0].terms != TruncatedPotential.one(self.bounds, self.class_rank).terms:
            raise ValueError("log needs constant term 1")
        if any(w < 0 for w in comps):
            raise ValueError("log needs non-negative weights")
        f = {}
        for n in range(1, self.bounds.weight + 1):
            acc = comps.get(n, TruncatedPotential(self.bounds, class_rank=self.class_rank)).scale(n)
            for i in range(1, n):
                if i in f and (n - i) in comps:
                    acc = acc - (f[i] * comps[n - i]).scale(i)
            f[n] = acc.scale(Fraction(1, n))
        out = TruncatedPotential(self.bounds, class_rank=self.class_rank)
        for fn in f.values():
            out = out + fn
        return out

    def first_difference(self, other):
        keys = sorted(set(self.terms) | set(other.terms), key=_sort_key)
        for k in keys:
            a, b = self.terms.get(k, Fraction(0)), other.terms.get(k, Fraction(0))
            if a != b:
                return k, a, b
        return None

    def to_json(self) -> list:
        return [
            {"hbar": h, "beta": list(b), "monomial": format_monomial(m), "coeff": format_fraction(c)}
            for (h, b, m), c in sorted(self.terms.items(), key=lambda kc: _sort_key(kc[0]))
        ]


def _sort_key(key):
    h, b, m = key
    return (_weight(key), h, b, tuple((tuple(v), e) for v, e in m))


def format_monomial(mono) -> str:
    if not mono:
        return "1"
    parts = []
    for v, e in mono:
        name = "t[" + ",".join(str(x) for x in v) + "]"
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def format_term(key) -> str:
    h, b, m = key
    out = f"hbar^{h}"
    if not is_zero_class(b):
        out += " Q^(" + ",".join(str(x) for x in b) + ")"
    return out + " " + format_monomial(m)


def _monomial(insertions):
    d = {}
    for v in insertions:
        d[v] = d.get(v, 0) + 1
    return tuple(sorted(d.items())), prod(factorial(e) for e in d.values())


def genus_potential(table: CorrelatorTable, g: int, bounds: Bounds) -> TruncatedPotential:
    """F^g in the variables t[j,k], stored at hbar^0."""
    out = TruncatedPotential(bounds, class_rank=table.class_rank)
    for (gg, beta, ins), v in table.entries.items():
        if gg != g or len(ins) > bounds.tdeg:
            continue
        mono, sym = _monomial(ins)
        out._add((0, beta, mono), v / sym)
    return out


def total_potential(table: CorrelatorTable, bounds: Bounds, scale=None) -> TruncatedPotential:
    """sum_g hbar^(g-1) F^g, optionally with F^g weighted by ``scale(g)``."""
    out = TruncatedPotential(bounds, class_rank=table.class_rank)
    for g in range(bounds.gmax + 1):
        fg = genus_potential(table, g, bounds)
        if scale is not None:
            fg = fg.scale(scale(g))
        out = out + fg.shift_hbar(g - 1)
    return out


def descendant_potential(table: CorrelatorTable, bounds: Bounds) -> TruncatedPotential:
    return total_potential(table, bounds).exp()


@dataclass
class DecompositionReport:
    passed: bool
    lhs_terms: int
    rhs_terms: int
    mismatch: tuple | None
    missing: list

    def to_json(self):
        out = {"passed": self.passed, "lhs_terms": self.lhs_terms, "rhs_terms": self.rhs_terms}
        if self.mismatch is not None:
            key, a, b = self.mismatch
            out["first_mismatch"] = {"term": format_term(key), "lhs": format_fraction(a), "rhs": format_fraction(b)}
        else:
            out["first_mismatch"] = None
        out["missing"] = len(self.missing)
        return out


def check_decomposition(table: CorrelatorTable, group, bounds: Bounds | None = None, method="auto") -> DecompositionReport:
    """Compare D of X x BG, built from the f-basis product correlators, with the
    product over irreducibles of D_X in the variables t[alpha,j,k] with hbar -> hbar/nu.

    With the default ``method`` the left side uses tuple counts wherever the
    budget allows, so it does not share the nu values used on the right.
    """
    bounds = bounds or Bounds()
    ptab = product_table(table, group, "f", method, bounds.gmax)
    lhs_f = TruncatedPotential(bounds, class_rank=table.class_rank)
    for (g, beta, ins), v in ptab.entries.items():
        if len(ins) > bounds.tdeg:
            continue
        mono, sym = _monomial([(lab,) + tuple(jk) for jk, lab in ins])
        lhs_f._add((g - 1, beta, mono), v / sym)
    lhs = lhs_f.exp()
    rhs = TruncatedPotential.one(bounds, table.class_rank)
    for a, nu in enumerate(group.character_table.nu):
        fa = total_potential(table, bounds, scale=lambda g, nu=nu: nu ** (1 - g))
        fa = fa.map_vars(lambda v, a=a: (a,) + tuple(v))
        rhs = rhs * fa.exp()
    diff = lhs.first_difference(rhs)
    return DecompositionReport(diff is None, len(lhs), len(rhs), diff, ptab.missing)
