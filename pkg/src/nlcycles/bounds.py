"""Vanishing bounds for genus-g coefficients and the finite index sets S_{k,g,L}."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .arith import as_fraction, format_rational, frac_part
from .discform import DiscriminantForm, discriminant_form
from .enumeration import EnumerationBudgetExceeded, short_vectors
from .errors import BadInput, PreconditionError
from .lattice import IntegerLattice, integer_kernel, matmul, smith_normal_form, transpose


class MissingSlopeEntry(BadInput):
    module = "bounds"


class GenusNotSupported(PreconditionError):
    module = "bounds"


@dataclass(frozen=True)
class SlopeTable:
    values: tuple = ((1, Fraction(12), "literature"), (2, Fraction(10), "config"), (3, Fraction(9), "config"))
    version: str = "1"

    def __post_init__(self):
        for g, s, _ in self.values:
            if g == 1 and s != 12:
                raise BadInput("s_1 is fixed at 12", "bounds")

    def __getitem__(self, g: int) -> Fraction:
        for h, s, _ in self.values:
            if h == g:
                return s
        raise MissingSlopeEntry(f"no slope entry for genus {g}")

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "entries": [{"g": g, "s": format_rational(s), "provenance": p} for g, s, p in self.values],
        }

    @classmethod
    def with_entries(cls, entries: dict) -> "SlopeTable":
        base = {g: (s, p) for g, s, p in cls().values}
        for g, s in entries.items():
            base[int(g)] = (as_fraction(s), "config")
        return cls(tuple((g, s, p) for g, (s, p) in sorted(base.items())))


DEFAULT_TABLE = SlopeTable()


def _c_rec(i: int, g: int, k: Fraction, table: SlopeTable) -> Fraction:
    c1 = k / table[g]
    if i == 1:
        return c1
    return max(c1, _c_rec(i - 1, g - 1, k - Fraction(1, 2), table) + c1 / 4)


def closed_form_bound(i: int, g: int, k, table: SlopeTable = DEFAULT_TABLE) -> Fraction:
    k = as_fraction(k)
    return sum((k - Fraction(j, 2)) / table[g - j] for j in range(i))


def C_bound(i: int, g: int, k, table: SlopeTable = DEFAULT_TABLE, with_closed: bool = False):
    """C_{1,g}(k) = k/s_g and C_{i+1,g}(k) = max(C_{1,g}(k), C_{i,g-1}(k - 1/2) + C_{1,g}(k)/4)."""
    if not 1 <= i <= g:
        raise BadInput(f"need 1 <= i <= g, got i={i}, g={g}", "bounds")
    k = as_fraction(k)
    value = _c_rec(i, g, k, table)
    if not with_closed:
        return value
    return value, closed_form_bound(i, g, k, table)


# -- successive minima


def _to_integer_matrix(T) -> tuple[list[list[int]], int]:
    T = [[as_fraction(x) for x in row] for row in T]
    den = math.lcm(*(x.denominator for row in T for x in row))
    return [[int(x * den) for x in row] for row in T], den


def _unimodular_completion(K: list[list[int]], g: int) -> list[list[int]]:
    """Rows of a unimodular matrix whose first rows span the saturated lattice of K."""
    if not K:
        return [[int(i == j) for j in range(g)] for i in range(g)]
    _, _, V = smith_normal_form(K)
    # K V = U^{-1} [D 0]; the rows of V^{-1} are a basis whose first r span K (saturated)
    from .lattice import rational_inverse

    Vi = rational_inverse(V)
    return [[int(x) for x in row] for row in Vi]


def successive_minima(T, budget: int = 10**6) -> tuple[Fraction, ...]:
    """lambda_1 <= ... <= lambda_g of a positive semi-definite rational matrix (g <= 3)."""
    g = len(T)
    if g > 3:
        raise BadInput("successive minima implemented for g <= 3", "bounds")
    Ti, den = _to_integer_matrix(T)
    for i in range(g):
        if Ti[i][i] < 0:
            raise BadInput("matrix is not positive semi-definite", "bounds")
    K = integer_kernel(Ti)
    r = len(K)
    B = _unimodular_completion(K, g)
    Tb = matmul(matmul(B, Ti), transpose(B))
    if any(Tb[i][j] for i in range(r) for j in range(g)):
        raise BadInput("kernel completion failed", "bounds")
    minima = [Fraction(0)] * r
    if r == g:
        return tuple(minima)
    Q = [row[r:] for row in Tb[r:]]
    n = g - r
    bound = max(Q[i][i] for i in range(n))
    if any(Q[i][i] <= 0 for i in range(n)):
        raise BadInput("matrix is not positive semi-definite", "bounds")
    vecs = short_vectors([[2 * x for x in row] for row in Q], 2 * bound)
    if len(vecs) > budget:
        raise EnumerationBudgetExceeded(f"{len(vecs)} vectors exceed budget {budget}")
    vecs = sorted((t / 2, v) for v, t in vecs if any(v))
    chosen: list[tuple[int, ...]] = []
    for t, v in vecs:
        if _rank(chosen + [v]) > len(chosen):
            chosen.append(v)
            minima.append(Fraction(t) / den)
            if len(chosen) == n:
                break
    return tuple(minima)


def _rank(rows) -> int:
    M = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    cols = len(M[0]) if M else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][c]:
                f = M[i][c] / M[rank][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


# -- index sets


@dataclass(frozen=True)
class GenusGIndex:
    T: tuple
    mu: tuple

    @property
    def g(self) -> int:
        return len(self.T)

    def to_json(self) -> dict:
        return {"T": [[format_rational(x) for x in row] for row in self.T], "mu": [list(m) for m in self.mu]}


def _act(D: DiscriminantForm, T, mu, A):
    """(A^t T A, mu A) for an integer matrix A acting on column vectors."""
    g = len(T)
    T2 = tuple(
        tuple(sum(A[a][i] * T[a][b] * A[b][j] for a in range(g) for b in range(g)) for j in range(g)) for i in range(g)
    )
    mu2 = []
    for j in range(g):
        x = D.zero
        for i in range(g):
            x = D.add(x, D.scale(A[i][j], mu[i]))
        mu2.append(x)
    return T2, tuple(mu2)


def _is_reduced(T) -> bool:
    a, b, c = T[0][0], T[0][1], T[1][1]
    return 0 <= 2 * b <= a <= c


@lru_cache(maxsize=None)
def _small_gl2(limit: int = 1) -> tuple:
    mats = []
    for a, b, c, d in itertools.product(range(-limit, limit + 1), repeat=4):
        if a * d - b * c in (1, -1):
            mats.append(((a, b), (c, d)))
    return tuple(mats)


def _exponent(D: DiscriminantForm) -> int:
    return math.lcm(*D.invariant_factors) if D.invariant_factors else 1


def _stabilizer_moves(D: DiscriminantForm, T) -> list:
    """Integer matrices that can map a reduced T to another reduced form (finite list)."""
    a, c = T[0][0], T[1][1]
    e = _exponent(D)
    if a == 0 and c == 0:
        return [
            ((p, q), (r, s))
            for p, q, r, s in itertools.product(range(e), repeat=4)
            if math.gcd(p * s - q * r, e) == 1 and (p * s - q * r) % e in (1, e - 1)
        ] or [((1, 0), (0, 1))]
    moves = list(_small_gl2(1))
    if a == 0:
        moves += [((s1, n), (0, s2)) for s1 in (1, -1) for s2 in (1, -1) for n in range(-e, e + 1)]
    return moves


def canonical_index(D: DiscriminantForm, T, mu) -> GenusGIndex:
    """Lexicographically least reduced representative among the finitely many reduced forms in the orbit."""
    T = tuple(tuple(as_fraction(x) for x in row) for row in T)
    mu = tuple(D.reduce(m) for m in mu)
    if len(T) == 1:
        return GenusGIndex(T, (D.canonical_pm(mu[0]),))
    if not _is_reduced(T):
        raise BadInput("canonical_index expects a reduced form", "bounds")
    best = None
    for A in _stabilizer_moves(D, T):
        T2, mu2 = _act(D, T, mu, A)
        if T2 != T and not _is_reduced(T2):
            continue
        key = (T2[0][0], T2[0][1], T2[1][1], mu2)
        if best is None or key < best[0]:
            best = (key, T2, mu2)
    return GenusGIndex(best[1], best[2])


def _kernel_compatible(D: DiscriminantForm, T, mu) -> bool:
    """For semi-definite T every integral kernel vector v must satisfy sum v_i mu_i = 0."""
    Ti, _ = _to_integer_matrix(T)
    for v in integer_kernel(Ti):
        x = D.zero
        for vi, m in zip(v, mu):
            x = D.add(x, D.scale(vi, m))
        if any(x):
            return False
    return True


def _grid(off: Fraction, step: Fraction, lo: Fraction, hi: Fraction) -> list[Fraction]:
    """Values off + step*Z in [lo, hi]."""
    start = off + step * math.ceil((lo - off) / step)
    out = []
    x = start
    while x <= hi:
        out.append(x)
        x += step
    return out


def enumerate_S(k, g: int, L: IntegerLattice, table: SlopeTable = DEFAULT_TABLE, bounds: tuple | None = None) -> list[GenusGIndex]:
    """Canonical representatives of the indices (T, mu) with lambda_i(T) <= C_{i,g}(k).

    ``bounds`` overrides (C_1, ..., C_g), which is useful for small test instances.
    """
    if g not in (1, 2):
        raise GenusNotSupported(f"genus {g} is not supported (g must be 1 or 2)")
    k = as_fraction(k)
    D = discriminant_form(L)
    C = tuple(as_fraction(x) for x in bounds) if bounds else tuple(C_bound(i, g, k, table) for i in range(1, g + 1))
    elems = sorted(D.elements())
    out = set()
    if g == 1:
        for mu in elems:
            for m in _grid(frac_part(-D.q(mu)), Fraction(1), Fraction(0), C[0]):
                if m == 0 and any(mu):
                    continue
                out.add(canonical_index(D, ((m,),), (mu,)))
        return sorted(out, key=_index_key)
    for mu1, mu2 in itertools.product(elems, repeat=2):
        b_off = frac_part(-D.bilinear(mu1, mu2) / 2)
        for a in _grid(frac_part(-D.q(mu1)), Fraction(1), Fraction(0), C[0]):
            for c in _grid(frac_part(-D.q(mu2)), Fraction(1), a, C[1]):
                for b in _grid(b_off, Fraction(1, 2), Fraction(0), a / 2):
                    if a * c < b * b:
                        continue
                    T = ((a, b), (b, c))
                    if (a == 0 or a * c == b * b) and not _kernel_compatible(D, T, (mu1, mu2)):
                        continue
                    out.add(canonical_index(D, T, (mu1, mu2)))
    return sorted(out, key=_index_key)


def _index_key(x: GenusGIndex):
    return (x.T, x.mu)


def brute_force_S2(L: IntegerLattice, bounds: tuple, box: int | None = None) -> list[set]:
    """GL2(Z)-orbits of all admissible (T, mu) with entries in a box, by union-find.

    Returns the orbits (as sets) that contain at least one member with
    lambda_1 <= C_1 and lambda_2 <= C_2.  An independent oracle for enumerate_S.
    """
    D = discriminant_form(L)
    C1, C2 = (as_fraction(x) for x in bounds)
    box = box if box is not None else int(C2) + 2
    elems = sorted(D.elements())
    nodes = []
    for mu1, mu2 in itertools.product(elems, repeat=2):
        b_off = frac_part(-D.bilinear(mu1, mu2) / 2)
        for a in _grid(frac_part(-D.q(mu1)), Fraction(1), Fraction(0), Fraction(box)):
            for c in _grid(frac_part(-D.q(mu2)), Fraction(1), Fraction(0), Fraction(box)):
                for b in _grid(b_off, Fraction(1, 2), Fraction(-box), Fraction(box)):
                    if a * c < b * b:
                        continue
                    T = ((a, b), (b, c))
                    if (a * c == b * b) and not _kernel_compatible(D, T, (mu1, mu2)):
                        continue
                    nodes.append((T, (mu1, mu2)))
    index = {n: i for i, n in enumerate(nodes)}
    parent = list(range(len(nodes)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    # generators of GL2(Z); reduction paths never leave the box, so orbits stay connected
    mats = [((0, -1), (1, 0)), ((1, 1), (0, 1)), ((1, -1), (0, 1)), ((1, 0), (0, -1))]
    for n in nodes:
        for A in mats:
            img = _act(D, n[0], n[1], A)
            j = index.get(img)
            if j is not None:
                ra, rb = find(index[n]), find(j)
                if ra != rb:
                    parent[ra] = rb
    orbits: dict[int, set] = {}
    for n, i in index.items():
        orbits.setdefault(find(i), set()).add(n)
    keep = []
    for orb in orbits.values():
        T = next(iter(orb))[0]
        lam = successive_minima([list(r) for r in T])
        if lam[0] <= C1 and lam[1] <= C2:
            keep.append(orb)
    return keep
