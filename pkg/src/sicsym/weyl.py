"""Displacement operators, the symplectic form, and the operator basis.

Operators come in three flavours sharing one set of index conventions:
fast complex128 arrays for scans, mpmath matrices at a configurable
precision for verification work, and exact cyclotomic matrices for oracle
comparisons.  Z acts as Z|r> = tau^(2r)|r> with tau = -exp(i pi / d), and
powers of tau are always taken mod 2d so lifted (unreduced) indices pick
up their correct signs.
"""

from __future__ import annotations

from functools import lru_cache

import mpmath as mp
import numpy as np

from .cyclotomic import CyclotomicElement, tau_exponent, zeta_power

__all__ = [
    "dbar",
    "symplectic_form",
    "tau_powers",
    "tau_powers_mp",
    "displacement",
    "displacement_mp",
    "displacement_exact",
    "expand",
    "expand_mp",
    "reconstruct",
    "reconstruct_mp",
    "trace_with_displacement",
    "trace_with_displacement_mp",
]


def dbar(d: int) -> int:
    """d for odd d, 2d for even d."""
    return d if d % 2 else 2 * d


def symplectic_form(p, q, modulus: int) -> int:
    """<p, q> = p2 q1 - p1 q2 mod modulus."""
    return (p[1] * q[0] - p[0] * q[1]) % modulus


@lru_cache(maxsize=None)
def tau_powers(d: int) -> np.ndarray:
    """tau^k for k in [0, 2d) as complex128."""
    k = np.arange(2 * d)
    return np.exp(1j * np.pi * (d + 1) * k / d)


@lru_cache(maxsize=None)
def _tau_powers_mp_cached(d: int, dps: int):
    tau = -mp.expjpi(mp.mpf(1) / d)
    out = [mp.mpc(1)]
    for _ in range(2 * d - 1):
        out.append(out[-1] * tau)
    return tuple(out)


def tau_powers_mp(d: int, digits: int = 40):
    with mp.workdps(digits + 10):
        return _tau_powers_mp_cached(d, mp.mp.dps)


def displacement(p, d: int) -> np.ndarray:
    """D_p = tau^(p1 p2) X^p1 Z^p2 as a complex128 matrix.

    p may be any integer pair; entries use the exact 2d-periodic tau
    powers, so lifted indices give the d-bar-periodic operator.
    """
    p1, p2 = int(p[0]), int(p[1])
    pows = tau_powers(d)
    s = np.arange(d)
    out = np.zeros((d, d), dtype=complex)
    out[(s + p1) % d, s] = pows[(p1 * p2 + 2 * s * p2) % (2 * d)]
    return out


def displacement_mp(p, d: int, digits: int = 40):
    p1, p2 = int(p[0]), int(p[1])
    with mp.workdps(digits + 10):
        pows = _tau_powers_mp_cached(d, mp.mp.dps)
        out = mp.zeros(d, d)
        for s in range(d):
            out[(s + p1) % d, s] = pows[(p1 * p2 + 2 * s * p2) % (2 * d)]
        return out


def displacement_exact(p, d: int) -> list[list[CyclotomicElement]]:
    """D_p with exact cyclotomic entries (conductor dbar)."""
    p1, p2 = int(p[0]), int(p[1])
    m, t = tau_exponent(d)
    zero = CyclotomicElement.zero(m)
    out = [[zero] * d for _ in range(d)]
    for s in range(d):
        e = (p1 * p2 + 2 * s * p2) % (2 * d)
        out[(s + p1) % d][s] = zeta_power(m, t * e)
    return out


def trace_with_displacement(a: np.ndarray, p, d: int) -> complex:
    """Tr(A D_p), using the one-nonzero-per-column structure of D_p."""
    p1, p2 = int(p[0]), int(p[1])
    pows = tau_powers(d)
    s = np.arange(d)
    vals = pows[(p1 * p2 + 2 * s * p2) % (2 * d)]
    return complex(np.sum(a[s, (s + p1) % d] * vals))


def trace_with_displacement_mp(a, p, d: int, digits: int = 40):
    p1, p2 = int(p[0]), int(p[1])
    with mp.workdps(digits + 10):
        pows = _tau_powers_mp_cached(d, mp.mp.dps)
        acc = mp.mpc(0)
        for s in range(d):
            acc += a[s, (s + p1) % d] * pows[(p1 * p2 + 2 * s * p2) % (2 * d)]
        return +acc


def expand(a: np.ndarray) -> dict[tuple[int, int], complex]:
    """Coefficients A_p = (1/d) Tr(A D_p^dag) over p in Z_d^2.

    Uses D_p^dag = D_(-p).
    """
    d = a.shape[0]
    out = {}
    for p1 in range(d):
        for p2 in range(d):
            out[(p1, p2)] = trace_with_displacement(a, (-p1, -p2), d) / d
    return out


def expand_mp(a, d: int, digits: int = 40):
    out = {}
    with mp.workdps(digits + 10):
        for p1 in range(d):
            for p2 in range(d):
                out[(p1, p2)] = (
                    trace_with_displacement_mp(a, (-p1, -p2), d, digits) / d
                )
    return out


def reconstruct(coeffs: dict[tuple[int, int], complex], d: int) -> np.ndarray:
    """Sum A_p D_p over the coefficient map."""
    out = np.zeros((d, d), dtype=complex)
    for p, c in coeffs.items():
        out += c * displacement(p, d)
    return out


def reconstruct_mp(coeffs, d: int, digits: int = 40):
    with mp.workdps(digits + 10):
        out = mp.zeros(d, d)
        for p, c in coeffs.items():
            dp = displacement_mp(p, d, digits)
            for r in range(d):
                s = (r - int(p[0])) % d
                out[r, s] += c * dp[r, s]
        return out
