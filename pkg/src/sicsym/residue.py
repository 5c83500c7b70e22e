"""Exact linear algebra and group computation for 2x2 matrices over Z_n.

Everything in this module is integer arithmetic: matrices are stored with
entries reduced to [0, n) and compared entrywise, so there is no canonical
form ambiguity.  Group-valued results are returned with their elements in
lexicographic order, which keeps parallel callers observationally
deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "NonInvertible",
    "DecompositionFailed",
    "TooLarge",
    "NotNormal",
    "NotAbelian",
    "ResidueMatrix",
    "MatrixGroup",
    "classify",
    "invert",
    "is_prime_matrix",
    "prime_decompose",
    "generate",
    "centralizer",
    "normalizer",
    "quotient_invariants",
    "squarefree_part",
    "gl2_order",
    "sl2_order",
    "gl2_elements",
    "sl2_elements",
    "esl2_elements",
    "f_z",
    "f_a",
    "j_matrix",
]

DEFAULT_CLOSURE_CAP = 10**8
DEFAULT_SCAN_CAP = 4 * 10**6  # matrices, not bytes


class NonInvertible(ValueError):
    """Determinant shares a factor with the modulus."""


class DecompositionFailed(RuntimeError):
    """Prime-pair scan exhausted; indicates an implementation bug."""


class TooLarge(RuntimeError):
    """An enumeration or closure exceeded its configured cap."""


class NotNormal(ValueError):
    """Quotient requested by a non-normal subgroup."""


class NotAbelian(ValueError):
    """Invariant factors requested for a non-abelian quotient."""


@dataclass(frozen=True, order=True)
class ResidueMatrix:
    """A 2x2 matrix over Z_n with its determinant cached.

    Entries are reduced to [0, n) on construction.  The ordering is
    lexicographic on (n, alpha, beta, gamma, delta), matching the
    deterministic iteration order used throughout.
    """

    n: int
    alpha: int
    beta: int
    gamma: int
    delta: int
    det: int = field(init=False, compare=False)

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("modulus must be positive")
        for name in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, getattr(self, name) % self.n)
        object.__setattr__(
            self, "det", (self.alpha * self.delta - self.beta * self.gamma) % self.n
        )

    @classmethod
    def from_rows(cls, rows, n: int) -> "ResidueMatrix":
        (a, b), (c, d) = rows
        return cls(n, a, b, c, d)

    @classmethod
    def identity(cls, n: int) -> "ResidueMatrix":
        return cls(n, 1, 0, 0, 1)

    @property
    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.alpha, self.beta), (self.gamma, self.delta))

    @property
    def trace(self) -> int:
        return (self.alpha + self.delta) % self.n

    def __matmul__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        if self.n != other.n:
            raise ValueError("modulus mismatch")
        n = self.n
        return ResidueMatrix(
            n,
            self.alpha * other.alpha + self.beta * other.gamma,
            self.alpha * other.beta + self.beta * other.delta,
            self.gamma * other.alpha + self.delta * other.gamma,
            self.gamma * other.beta + self.delta * other.delta,
        )

    def __neg__(self) -> "ResidueMatrix":
        return ResidueMatrix(self.n, -self.alpha, -self.beta, -self.gamma, -self.delta)

    def scale(self, k: int) -> "ResidueMatrix":
        return ResidueMatrix(
            self.n, k * self.alpha, k * self.beta, k * self.gamma, k * self.delta
        )

    def pow(self, e: int) -> "ResidueMatrix":
        if e < 0:
            return invert(self).pow(-e)
        result = ResidueMatrix.identity(self.n)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def apply(self, p: tuple[int, int], modulus: int | None = None) -> tuple[int, int]:
        """Matrix action on a column vector, reduced mod `modulus` (default n)."""
        m = self.n if modulus is None else modulus
        return (
            (self.alpha * p[0] + self.beta * p[1]) % m,
            (self.gamma * p[0] + self.delta * p[1]) % m,
        )

    def to_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64)

    def __repr__(self):
        return f"ResidueMatrix(({self.alpha} {self.beta}; {self.gamma} {self.delta}) mod {self.n})"


def j_matrix(n: int) -> ResidueMatrix:
    """diag(1, -1) mod n, the complex-conjugation representative."""
    return ResidueMatrix(n, 1, 0, 0, -1)


def f_z(d: int) -> ResidueMatrix:
    """The canonical trace -1 symplectic (0, d-1; d+1, d-1) mod dbar."""
    dbar = d if d % 2 else 2 * d
    return ResidueMatrix(dbar, 0, d - 1, d + 1, d - 1)


def f_a(d: int) -> ResidueMatrix:
    """The alternative canonical trace -1 symplectic, defined for d = 9k+3."""
    if d % 9 != 3:
        raise ValueError("f_a requires d = 3 (mod 9)")
    k = (d - 3) // 9
    dbar = d if d % 2 else 2 * d
    return ResidueMatrix(dbar, 1, d + 3, d + 3 * k, d - 2)


def classify(m: ResidueMatrix, dbar: int) -> str:
    """Classify as 'symplectic' (det 1), 'antisymplectic' (det -1) or 'neither'."""
    if m.n != dbar:
        raise ValueError("matrix modulus does not match dbar")
    if m.det == 1 % dbar:
        return "symplectic"
    if m.det == (-1) % dbar:
        return "antisymplectic"
    return "neither"


def invert(m: ResidueMatrix) -> ResidueMatrix:
    """Inverse mod n.  Raises NonInvertible when det is not a unit."""
    g = math.gcd(m.det, m.n)
    if g != 1:
        raise NonInvertible(f"det {m.det} not a unit mod {m.n}")
    dinv = pow(m.det, -1, m.n)
    return ResidueMatrix(
        m.n, dinv * m.delta, -dinv * m.beta, -dinv * m.gamma, dinv * m.alpha
    )


def is_prime_matrix(f: ResidueMatrix, dbar: int) -> bool:
    """True iff the upper-right entry is a unit mod dbar."""
    if f.n != dbar:
        raise ValueError("matrix modulus does not match dbar")
    return math.gcd(f.beta, dbar) == 1


def _decompose_candidates(n: int):
    # S0 = (0,-1;1,0), then (1,c;0,1) @ S0 = (c,-1;1,0) for c = 1, 2, ...
    yield ResidueMatrix(n, 0, -1, 1, 0)
    for c in range(1, n):
        yield ResidueMatrix(n, c, -1, 1, 0)


def prime_decompose(f: ResidueMatrix, dbar: int) -> tuple[ResidueMatrix, ResidueMatrix]:
    """Split a non-prime symplectic F into a product of two prime matrices.

    The candidate list for the right factor is fixed, so the returned pair
    is deterministic: F2 runs through (0,-1;1,0), (1,c;0,1)(0,-1;1,0) for
    c = 1, 2, ... and the first F2 making F @ F2^-1 prime wins.
    """
    if classify(f, dbar) != "symplectic":
        raise ValueError("prime_decompose expects a symplectic matrix")
    for f2 in _decompose_candidates(dbar):
        f1 = f @ invert(f2)
        if is_prime_matrix(f1, dbar):
            return f1, f2
    raise DecompositionFailed(f"no prime pair found for {f}")


@dataclass(frozen=True)
class MatrixGroup:
    """A finite set of ResidueMatrix closed under product and inverse."""

    modulus: int
    elements: tuple[ResidueMatrix, ...]
    generators: tuple[ResidueMatrix, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(sorted(set(self.elements))))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, m: ResidueMatrix):
        return m in set(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def element_set(self) -> frozenset:
        return frozenset(self.elements)

    def is_subgroup_of(self, other: "MatrixGroup") -> bool:
        return self.element_set() <= other.element_set()

    def is_abelian(self) -> bool:
        els = self.elements
        return all(a @ b == b @ a for i, a in enumerate(els) for b in els[i + 1 :])

    def conjugate(self, w: ResidueMatrix) -> "MatrixGroup":
        winv = invert(w)
        return MatrixGroup(
            self.modulus,
            tuple(w @ m @ winv for m in self.elements),
            tuple(w @ g @ winv for g in self.generators),
        )


def generate(generators, cap: int = DEFAULT_CLOSURE_CAP) -> MatrixGroup:
    """Closure of a set of invertible matrices under multiplication."""
    gens = tuple(generators)
    if not gens:
        raise ValueError("need at least one generator")
    n = gens[0].n
    for g in gens:
        if g.n != n:
            raise ValueError("generators must share a modulus")
        if math.gcd(g.det, n) != 1:
            raise NonInvertible(f"generator {g} is not invertible")
    seen = {ResidueMatrix.identity(n)}
    frontier = list(seen)
    while frontier:
        new = []
        for m in frontier:
            for g in gens:
                prod = m @ g
                if prod not in seen:
                    seen.add(prod)
                    new.append(prod)
                    if len(seen) > cap:
                        raise TooLarge(f"closure exceeded cap {cap}")
        frontier = new
    return MatrixGroup(n, tuple(seen), gens)


# --- Smith normal form for small integer matrices ------------------------

def _snf(mat: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Return (S, V) with S = U A V in Smith form; U is not tracked.

    Only the diagonal of S and the right transform V are needed to solve
    A x = 0 (mod n), since x = V z with S z = 0 (mod n).
    """
    a = [row[:] for row in mat]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        v[i], v[j] = v[j], v[i]

    def add_row(src, dst, k):
        for c in range(cols):
            a[dst][c] += k * a[src][c]

    def add_col(src, dst, k):
        # x = V z, so a column operation on A is mirrored on V's columns
        for r in a:
            r[dst] += k * r[src]
        for i in range(cols):
            v[i][dst] += k * v[i][src]

    t = 0
    while t < min(rows, cols):
        # find pivot: smallest nonzero |entry| in the remaining block
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < best):
                    best = abs(a[i][j])
                    pivot = (i, j)
        if pivot is None:
            break
        i, j = pivot
        swap_rows(t, i)
        swap_cols(t, j)
        # clear the row and column; restart if a reduction creates smaller entries
        dirty = False
        for i in range(t + 1, rows):
            if a[i][t] % a[t][t] == 0:
                add_row(t, i, -(a[i][t] // a[t][t]))
            else:
                add_row(t, i, -(a[i][t] // a[t][t]))
                dirty = True
        for j in range(t + 1, cols):
            if a[t][j] % a[t][t] == 0:
                add_col(t, j, -(a[t][j] // a[t][t]))
            else:
                add_col(t, j, -(a[t][j] // a[t][t]))
                dirty = True
        if dirty:
            continue
        t += 1
    diag = [a[i][i] if i < rows and i < cols else 0 for i in range(cols)]
    return diag, v


def _congruence_solutions(mat: list[list[int]], n: int, cap: int):
    """All x in Z_n^k with mat @ x = 0 (mod n), via Smith normal form."""
    cols = len(mat[0])
    diag, v = _snf(mat)
    per_axis = []
    for s in diag:
        g = math.gcd(s, n)
        g = n if g == 0 else g
        step = n // g
        per_axis.append([t * step % n for t in range(g)])
    total = 1
    for ax in per_axis:
        total *= len(ax)
        if total > cap:
            raise TooLarge(f"solution module has more than {cap} elements")
    sols = []

    def rec(idx, z):
        if idx == cols:
            x = [sum(v[i][j] * z[j] for j in range(cols)) % n for i in range(cols)]
            sols.append(tuple(x))
            return
        for val in per_axis[idx]:
            rec(idx + 1, z + [val])

    rec(0, [])
    return sols


def centralizer(h: MatrixGroup, ambient_modulus: int,
                cap: int = DEFAULT_CLOSURE_CAP) -> MatrixGroup:
    """Centralizer of h inside GL(2, Z_n), by solving XG = GX per generator.

    The commutation conditions are linear congruences in the four entries
    of X; the solution module is enumerated and filtered to unit
    determinant.
    """
    n = ambient_modulus
    gens = h.generators if h.generators else h.elements
    rows = []
    for g in gens:
        g11, g12, g21, g22 = g.alpha, g.beta, g.gamma, g.delta
        rows.append([0, g21, -g12, 0])
        rows.append([g12, g22 - g11, 0, -g12])
        rows.append([-g21, 0, g11 - g22, g21])
        rows.append([0, -g21, g12, 0])
    if not rows:
        raise ValueError("empty group")
    elements = []
    for x in _congruence_solutions(rows, n, cap):
        m = ResidueMatrix(n, *x)
        if math.gcd(m.det, n) == 1:
            elements.append(m)
    return MatrixGroup(n, tuple(elements))


@lru_cache(maxsize=None)
def _prime_factors(n: int) -> tuple[int, ...]:
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        out.append(m)
    return tuple(out)


def gl2_order(n: int) -> int:
    num = n**4
    for p in _prime_factors(n):
        num = num * (p - 1) // p * (p * p - 1) // (p * p)
    return num


def sl2_order(n: int) -> int:
    num = n**3
    for p in _prime_factors(n):
        num = num * (p * p - 1) // (p * p)
    return num


def _all_entry_rows(n: int, cap: int) -> np.ndarray:
    if n**4 > cap:
        raise TooLarge(f"enumerating {n}^4 matrices exceeds cap {cap}")
    r = np.arange(n, dtype=np.int64)
    grid = np.meshgrid(r, r, r, r, indexing="ij")
    return np.stack(grid, axis=-1).reshape(-1, 4)


def gl2_elements(n: int, cap: int = DEFAULT_SCAN_CAP) -> np.ndarray:
    """All of GL(2, Z_n) as an (N, 2, 2) int array in lexicographic order."""
    rows = _all_entry_rows(n, cap)
    det = (rows[:, 0] * rows[:, 3] - rows[:, 1] * rows[:, 2]) % n
    mask = np.gcd(det, n) == 1
    return rows[mask].reshape(-1, 2, 2)


def sl2_elements(n: int, cap: int = DEFAULT_SCAN_CAP) -> np.ndarray:
    rows = _all_entry_rows(n, cap)
    det = (rows[:, 0] * rows[:, 3] - rows[:, 1] * rows[:, 2]) % n
    return rows[det == 1 % n].reshape(-1, 2, 2)


def esl2_elements(n: int, cap: int = DEFAULT_SCAN_CAP) -> np.ndarray:
    rows = _all_entry_rows(n, cap)
    det = (rows[:, 0] * rows[:, 3] - rows[:, 1] * rows[:, 2]) % n
    mask = (det == 1 % n) | (det == (-1) % n)
    return rows[mask].reshape(-1, 2, 2)


def _encode(arr: np.ndarray, n: int) -> np.ndarray:
    flat = arr.reshape(-1, 4)
    return ((flat[:, 0] * n + flat[:, 1]) * n + flat[:, 2]) * n + flat[:, 3]


def _batch_inverse(arr: np.ndarray, n: int) -> np.ndarray:
    det = (arr[:, 0, 0] * arr[:, 1, 1] - arr[:, 0, 1] * arr[:, 1, 0]) % n
    inv_table = np.full(n, -1, dtype=np.int64)
    for u in range(n):
        if math.gcd(u, n) == 1:
            inv_table[u] = pow(u, -1, n)
    dinv = inv_table[det]
    if np.any(dinv < 0):
        raise NonInvertible("batch contains singular matrices")
    out = np.empty_like(arr)
    out[:, 0, 0] = dinv * arr[:, 1, 1] % n
    out[:, 0, 1] = -dinv * arr[:, 0, 1] % n
    out[:, 1, 0] = -dinv * arr[:, 1, 0] % n
    out[:, 1, 1] = dinv * arr[:, 0, 0] % n
    return out


def normalizer(h: MatrixGroup, ambient_modulus: int,
               cap: int = DEFAULT_SCAN_CAP) -> MatrixGroup:
    """Normalizer of h inside GL(2, Z_n), by filtered enumeration.

    Normalizers have no linear characterization, so the ambient group is
    scanned; the scan is vectorized and a matrix G is kept iff conjugation
    by G maps every generator of h back into h (a bijection argument makes
    this sufficient for finite groups).
    """
    n = ambient_modulus
    ambient = gl2_elements(n, cap)
    ambient_inv = _batch_inverse(ambient, n)
    h_encoded = np.sort(_encode(np.array([m.to_array() for m in h.elements]), n))
    gens = h.generators if h.generators else h.elements
    keep = np.ones(len(ambient), dtype=bool)
    for g in gens:
        garr = g.to_array()
        conj = np.einsum("nij,jk,nkl->nil", ambient, garr, ambient_inv) % n
        keep &= np.isin(_encode(conj, n), h_encoded)
    kept = ambient[keep]
    elements = tuple(ResidueMatrix(n, *row) for row in kept.reshape(-1, 4))
    return MatrixGroup(n, elements)


def _coset_table(g: MatrixGroup, n: MatrixGroup):
    n_set = n.element_set()
    if not n_set <= g.element_set():
        raise ValueError("N is not a subgroup of G")
    for a in g.elements:
        a_inv = invert(a)
        for x in n.elements:
            if a @ x @ a_inv not in n_set:
                raise NotNormal(f"{a} does not normalize N")
    cosets = {}
    for a in g.elements:
        key = min(a @ x for x in n.elements)
        cosets.setdefault(key, []).append(a)
    reps = sorted(cosets)
    index = {r: i for i, r in enumerate(reps)}

    def coset_of(m: ResidueMatrix) -> int:
        return index[min(m @ x for x in n.elements)]

    table = [[coset_of(a @ b) for b in reps] for a in reps]
    return reps, table


def quotient_invariants(g: MatrixGroup, n: MatrixGroup) -> tuple[int, ...]:
    """Invariant factor decomposition n1 | n2 | ... of the quotient G/N.

    Raises NotNormal / NotAbelian when the quotient is not defined.  The
    factors are recovered from the coset multiplication table via the
    p-primary element-order counts.
    """
    reps, table = _coset_table(g, n)
    k = len(reps)
    if k == 1:
        return ()
    for i in range(k):
        for j in range(i + 1, k):
            if table[i][j] != table[j][i]:
                raise NotAbelian("quotient is not abelian")
    identity = next(i for i in range(k) if all(table[i][j] == j for j in range(k)))

    def power(idx, e):
        acc = identity
        base = idx
        while e:
            if e & 1:
                acc = table[acc][base]
            base = table[base][base]
            e >>= 1
        return acc

    primary: dict[int, list[int]] = {}
    for p in _prime_factors(k):
        # exps[j] = log_p #{x : x^(p^j) = e} = sum_i min(lambda_i, j),
        # which determines the p-primary partition lambda
        exps = [0]
        j = 0
        while True:
            j += 1
            c = sum(1 for i in range(k) if power(i, p**j) == identity)
            e = round(math.log(c, p))
            if e == exps[-1]:
                break
            exps.append(e)
        at_least = [exps[j] - exps[j - 1] for j in range(1, len(exps))]
        parts = []
        if at_least:
            for i in range(at_least[0]):
                parts.append(sum(1 for c in at_least if c > i))
        if parts:
            primary[p] = sorted(parts, reverse=True)
    width = max(len(v) for v in primary.values())
    factors = []
    for slot in range(width):
        f = 1
        for p, parts in primary.items():
            if slot < len(parts):
                f *= p ** parts[slot]
        factors.append(f)
    factors.sort()
    return tuple(factors)


def squarefree_part(m: int) -> int:
    """Largest squarefree divisor q of m with m/q a perfect square."""
    if m < 1:
        raise ValueError("m must be positive")
    q = 1
    rem = m
    p = 2
    while p * p <= rem:
        if rem % p == 0:
            e = 0
            while rem % p == 0:
                rem //= p
                e += 1
            if e % 2:
                q *= p
        p += 1 if p == 2 else 2
    return q * rem
