"""Exact arithmetic in the cyclotomic field Q(zeta_m).

Elements are dense rational coefficient vectors over the power basis
zeta^0 ... zeta^(phi(m)-1), reduced by the m-th cyclotomic polynomial, so
equality of elements is equality of vectors.  The conductors needed here
stay small (m <= 96), which keeps dense vectors cheap.  No floating point
enters this module except through `embed`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp

__all__ = [
    "NotCoprime",
    "CyclotomicElement",
    "cyclotomic_polynomial",
    "zeta_power",
    "tau",
    "tau_exponent",
    "galois_apply",
    "embed",
]

from math import gcd


class NotCoprime(ValueError):
    """Galois substitution index shares a factor with the conductor."""


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients of Phi_m(x), low degree first, computed recursively.

    Phi_m = (x^m - 1) / prod_{d | m, d < m} Phi_d, with exact integer
    polynomial division.
    """
    if m == 1:
        return (-1, 1)
    num = [0] * (m + 1)
    num[0] = -1
    num[m] = 1
    for d in range(1, m):
        if m % d == 0:
            num = _polydiv_exact(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    num = num[:]
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        q, r = divmod(num[i + len(den) - 1], den[-1])
        assert r == 0, "cyclotomic division must be exact"
        out[i] = q
        for j, c in enumerate(den):
            num[i + j] -= q * c
    assert not any(num), "cyclotomic division must be exact"
    return out


@lru_cache(maxsize=None)
def _phi(m: int) -> int:
    return len(cyclotomic_polynomial(m)) - 1


@lru_cache(maxsize=None)
def _power_reduction(m: int) -> tuple[tuple[Fraction, ...], ...]:
    """zeta^j as a basis vector for j in [0, m): table of coefficient rows."""
    deg = _phi(m)
    phi = cyclotomic_polynomial(m)
    rows: list[tuple[Fraction, ...]] = []
    for j in range(deg):
        rows.append(tuple(Fraction(int(i == j)) for i in range(deg)))
    for j in range(deg, m):
        # zeta^j = zeta * zeta^(j-1), then reduce the top term by Phi_m
        prev = rows[j - 1]
        shifted = [Fraction(0)] + list(prev[:-1])
        top = prev[-1]
        if top:
            for i in range(deg):
                shifted[i] -= top * phi[i]
        rows.append(tuple(shifted))
    return tuple(rows)


@dataclass(frozen=True)
class CyclotomicElement:
    """An element of Q(zeta_m) in the reduced power basis."""

    m: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) != _phi(self.m):
            raise ValueError("coefficient vector has wrong length")

    @classmethod
    def zero(cls, m: int) -> "CyclotomicElement":
        return cls(m, tuple(Fraction(0) for _ in range(_phi(m))))

    @classmethod
    def from_rational(cls, m: int, q) -> "CyclotomicElement":
        c = [Fraction(0)] * _phi(m)
        c[0] = Fraction(q)
        return cls(m, tuple(c))

    def __add__(self, other):
        other = _coerce(self.m, other)
        return CyclotomicElement(
            self.m, tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __sub__(self, other):
        other = _coerce(self.m, other)
        return CyclotomicElement(
            self.m, tuple(a - b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __neg__(self):
        return CyclotomicElement(self.m, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return CyclotomicElement(self.m, tuple(a * q for a in self.coeffs))
        other = _coerce(self.m, other)
        deg = _phi(self.m)
        prod = [Fraction(0)] * (2 * deg - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    prod[i + j] += a * b
        table = _power_reduction(self.m)
        out = list(prod[:deg])
        for e in range(deg, 2 * deg - 1):
            c = prod[e]
            if c:
                row = table[e % self.m]  # e < 2*phi(m) <= 2m, folding is exact
                for i in range(deg):
                    out[i] += c * row[i]
        return CyclotomicElement(self.m, tuple(out))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def conjugate(self) -> "CyclotomicElement":
        return galois_apply(self.m - 1, self)

    def __pow__(self, e: int) -> "CyclotomicElement":
        if e < 0:
            raise ValueError("negative powers not supported")
        result = CyclotomicElement.from_rational(self.m, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result


def _coerce(m: int, x) -> CyclotomicElement:
    if isinstance(x, CyclotomicElement):
        if x.m != m:
            raise ValueError("conductor mismatch")
        return x
    return CyclotomicElement.from_rational(m, x)


def zeta_power(m: int, e: int) -> CyclotomicElement:
    """zeta_m^e as a reduced element."""
    return CyclotomicElement(m, _power_reduction(m)[e % m])


def tau_exponent(d: int) -> tuple[int, int]:
    """(m, t) with tau = zeta_m^t, m = dbar = ord(tau)."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if d % 2:
        return d, ((d + 1) // 2) % d
    return 2 * d, d + 1


def tau(d: int) -> CyclotomicElement:
    """The exact root of unity -exp(i pi / d)."""
    m, t = tau_exponent(d)
    return zeta_power(m, t)


def galois_apply(k: int, x: CyclotomicElement) -> CyclotomicElement:
    """The field automorphism zeta -> zeta^k, for k coprime to the conductor."""
    if gcd(k, x.m) != 1:
        raise NotCoprime(f"{k} is not a unit mod {x.m}")
    table = _power_reduction(x.m)
    deg = _phi(x.m)
    out = [Fraction(0)] * deg
    for j, c in enumerate(x.coeffs):
        if c:
            row = table[(j * k) % x.m]
            for i in range(deg):
                out[i] += c * row[i]
    return CyclotomicElement(x.m, tuple(out))


def embed(x: CyclotomicElement, digits: int = 40) -> mp.mpc:
    """Numerical embedding zeta -> exp(2 pi i / m) at the stated precision."""
    with mp.workdps(digits + 10):
        z = mp.e ** (2j * mp.pi / x.m)
        acc = mp.mpc(0)
        zp = mp.mpc(1)
        for c in x.coeffs:
            if c:
                acc += mp.mpf(c.numerator) / mp.mpf(c.denominator) * zp
            zp *= z
        return +acc
