"""Exact arithmetic in Q(zeta_m), stored as coefficient vectors modulo Phi_m."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
import cmath


def _poly_divexact(num, den):
    """Exact division of integer polynomials (lowest degree first)."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(out) - 1, -1, -1):
        q, r = divmod(num[i + len(den) - 1], lead)
        if r:
            raise ArithmeticError("division is not exact")
        out[i] = q
        for k, d in enumerate(den):
            num[i + k] -= q * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("division is not exact")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple:
    """Phi_m as integer coefficients, lowest degree first, by dividing x^m - 1
    by Phi_d for the proper divisors d of m."""
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly = _poly_divexact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _field(m: int):
    phi = cyclotomic_polynomial(m)
    deg = len(phi) - 1
    # reduced form of x^e for 0 <= e < max(m, 2*deg - 1)
    top = max(m, 2 * deg - 1)
    powers = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(top):
        powers.append(tuple(cur))
        # multiply by x and reduce with x^deg = -sum phi[i] x^i
        carry = cur[-1]
        cur = [0] + cur[:-1]
        if carry:
            for i in range(deg):
                cur[i] -= carry * phi[i]
    return deg, tuple(powers)


_ZERO = Fraction(0)


class Cyclotomic:
    """An element of Q(zeta_m); ``z`` denotes zeta_m = exp(2 pi i / m)."""

    __slots__ = ("m", "coeffs")

    def __init__(self, m: int, coeffs=()):
        deg, powers = _field(m)
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) > deg:
            red = [_ZERO] * deg
            for e, c in enumerate(coeffs):
                if c:
                    p = powers[e] if e < len(powers) else powers[e % m]
                    for i, v in enumerate(p):
                        if v:
                            red[i] += c * v
            coeffs = red
        else:
            coeffs = coeffs + [_ZERO] * (deg - len(coeffs))
        self.m = m
        self.coeffs = tuple(coeffs)

    @classmethod
    def rational(cls, m, q) -> "Cyclotomic":
        return cls(m, [q])

    @classmethod
    def zeta(cls, m, k=1) -> "Cyclotomic":
        deg, powers = _field(m)
        return cls(m, powers[k % m])

    def _coerce(self, other):
        if isinstance(other, Cyclotomic):
            if other.m != self.m:
                raise ValueError(f"conductor mismatch {self.m} vs {other.m}")
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.m, [other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Cyclotomic(self.m, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.m, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Cyclotomic(self.m, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.m, [a * other for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        deg, powers = _field(self.m)
        out = [_ZERO] * deg
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if not b:
                    continue
                ab = a * b
                for k, v in enumerate(powers[i + j]):
                    if v:
                        out[k] += ab * v
        return Cyclotomic(self.m, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return Cyclotomic(self.m, [a / q for a in self.coeffs])
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        out = Cyclotomic(self.m, [1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if isinstance(other, Cyclotomic):
            return self.m == other.m and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.m, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def galois(self, k: int) -> "Cyclotomic":
        """Image under zeta -> zeta^k (k coprime to m)."""
        deg, powers = _field(self.m)
        out = [_ZERO] * deg
        for i, a in enumerate(self.coeffs):
            if a:
                for t, v in enumerate(powers[(i * k) % self.m]):
                    if v:
                        out[t] += a * v
        return Cyclotomic(self.m, out)

    def conjugate(self) -> "Cyclotomic":
        return self.galois(-1)

    def __complex__(self):
        z = cmath.exp(2j * cmath.pi / self.m)
        return complex(sum(float(a) * z**i for i, a in enumerate(self.coeffs)))

    def __repr__(self):
        return f"Cyclotomic({self.m}, {self})"

    def __str__(self):
        terms = []
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            if not mono:
                body = str(abs(a))
            elif abs(a) == 1:
                body = mono
            else:
                body = f"{abs(a)}*{mono}"
            terms.append(("-" if a < 0 else "+", body))
        if not terms:
            return "0"
        sign, body = terms[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out
