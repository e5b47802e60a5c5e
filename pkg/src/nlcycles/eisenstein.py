"""Exact Fourier coefficients of vector-valued Eisenstein series.

E_{k,L} transforms under the dual Weil representation of an even lattice L
with k = rank(L)/2.  For m > 0 its coefficient is a product of an
archimedean factor and local densities,

    c(m, mu) = (-1)^{b+/2} (2 pi)^k m^{k-1} / (sqrt|A| Gamma(k)) * prod_p delta_p,

    delta_p = lim_a p^{a(1-r)} #{x in L/p^a L : q(x - gamma) + m = 0 mod p^a},

with gamma a lift of mu.  At primes not dividing 2 det(L) num(m) den(m) the
density is the classical quadric point count, so the product over those
primes collapses to L(s, chi)/zeta(2s) (odd rank, s = (r-1)/2) or to
1/L(r/2, chi) (even rank).  These special values are exact through
generalized Bernoulli numbers.  The remaining finitely many densities are
counted exactly after splitting L over Z_(p) into blocks of size <= 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .arith import (
    BigFloat,
    as_fraction,
    bernoulli_number,
    fundamental_discriminant,
    generalized_bernoulli,
    kronecker,
    prime_factors,
    rational_reconstruct,
    sqrt_rational,
    valuation,
)
from .discform import DiscriminantForm, discriminant_form
from .errors import BadInput, ComputationError, PreconditionError
from .lattice import IntegerLattice, determinant, rational_inverse, signature


class UnsupportedIndex(BadInput):
    module = "eisenstein"


class ParityError(PreconditionError):
    module = "eisenstein"


class PrecisionExhausted(ComputationError):
    module = "eisenstein"


class CalibrationFailure(ComputationError):
    module = "eisenstein"


@dataclass(frozen=True)
class LocalDensity:
    p: int
    value: Fraction
    stabilized_at: int


# ---------------------------------------------------------------------------
# p-adic splitting

def _mod_pk(x: Fraction, P: int) -> int:
    """Image of a p-integral rational in Z/P."""
    return x.numerator * pow(x.denominator, -1, P) % P


@lru_cache(maxsize=256)
def jordan_splitting(gram: tuple, p: int):
    """Return (B, blocks, A) with A = B^T G B block diagonal over Z_(p).

    B has p-integral entries and unit determinant at p; blocks are index lists
    of length 1, or 2 when p = 2.
    """
    n = len(gram)
    A = [[Fraction(x) for x in row] for row in gram]
    B = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    blocks = []

    def col_op(dst, src, f):  # basis_dst += f * basis_src
        for R in B:
            R[dst] += f * R[src]
        for R in A:
            R[dst] += f * R[src]
        A[dst] = [a + f * b for a, b in zip(A[dst], A[src])]

    remaining = list(range(n))
    while remaining:
        vals = [(valuation(A[i][j], p), i, j) for i in remaining for j in remaining if A[i][j] != 0 and j >= i]
        if not vals:
            raise PreconditionError("degenerate form in p-adic splitting", "eisenstein")
        vmin = min(v for v, _, _ in vals)
        diag = [i for v, i, j in vals if i == j and v == vmin]
        if diag:
            i = diag[0]
            for j in remaining:
                if j != i and A[i][j]:
                    col_op(j, i, -A[i][j] / A[i][i])
            blocks.append((i,))
            remaining.remove(i)
            continue
        _, i, j = next(t for t in vals if t[0] == vmin)
        if p != 2:
            col_op(i, j, Fraction(1))
            continue
        a, b, c = A[i][i], A[i][j], A[j][j]
        det = a * c - b * b
        inv = [[c / det, -b / det], [-b / det, a / det]]
        for k in remaining:
            if k in (i, j):
                continue
            u, w = A[i][k], A[j][k]
            if u or w:
                ci = -(inv[0][0] * u + inv[0][1] * w)
                cj = -(inv[1][0] * u + inv[1][1] * w)
                if ci:
                    col_op(k, i, ci)
                if cj:
                    col_op(k, j, cj)
        blocks.append((i, j))
        remaining.remove(i)
        remaining.remove(j)
    return B, tuple(blocks), A


def _block_histogram(coeffs: tuple, lin: tuple, P: int) -> list[int]:
    """Value counts of a quadratic polynomial with p-integral coefficients on (Z/P)^dim."""
    xs = np.arange(P, dtype=np.int64)
    if len(lin) == 1:
        (a,), (l,) = coeffs, lin
        vals = ((a * (xs * xs % P)) % P - l * xs % P) % P
    else:
        a, b, c = coeffs
        l1, l2 = lin
        x = xs[:, None]
        y = xs[None, :]
        vals = (a * (x * x % P) % P + b * (x * y % P) % P + c * (y * y % P) % P - l1 * x % P - l2 * y % P) % P
        vals = vals.ravel()
    return [int(v) for v in np.bincount(vals, minlength=P)]


def _pack(a: list[int], w: int) -> int:
    nb = (w + 7) // 8
    return int.from_bytes(b"".join(x.to_bytes(nb, "little") for x in a), "little")


def _cyclic_convolve(a: list[int], b: list[int], P: int) -> list[int]:
    # Kronecker substitution: exact product of packed big integers
    w = (sum(a) * sum(b)).bit_length() + 1
    nb = (w + 7) // 8
    prod = _pack(a, w) * _pack(b, w)
    raw = prod.to_bytes(nb * (2 * P), "little")
    out = [0] * P
    for k in range(2 * P - 1):
        v = int.from_bytes(raw[k * nb : (k + 1) * nb], "little")
        if v:
            out[k % P] += v
    return out


def _block_data(A, g, blk, P):
    """Quadratic and linear coefficients of q_b(x) - (x, g)_b modulo P."""
    if len(blk) == 1:
        i = blk[0]
        return (_mod_pk(A[i][i] / 2, P),), (_mod_pk(A[i][i] * g[i], P),)
    i, j = blk
    coeffs = (_mod_pk(A[i][i] / 2, P), _mod_pk(A[i][j], P), _mod_pk(A[j][j] / 2, P))
    lin = (
        _mod_pk(A[i][i] * g[i] + A[i][j] * g[j], P),
        _mod_pk(A[j][i] * g[i] + A[j][j] * g[j], P),
    )
    return coeffs, lin


def _block_q(A, blk, y) -> Fraction:
    return sum((y[a] * A[i][j] * y[b] for a, i in enumerate(blk) for b, j in enumerate(blk)), Fraction(0)) / 2


@lru_cache(maxsize=64)
def _orbit_classes(p: int, nu: int):
    """Orbits of multiplication by unit squares on Z/p^nu.

    Returns (cls, reps, T): cls[x] is the class of x, reps[c] a representative,
    T[c] the matrix #{a in A, b in B : a + b = reps[c]} over class pairs.
    """
    P = p**nu
    xs = np.arange(P, dtype=np.int64)
    v = np.zeros(P, dtype=np.int64)
    u = xs.copy()
    for _ in range(nu):
        mask = (u % p == 0) & (xs != 0)
        v += mask
        u = np.where(mask, u // p, u)
    keys = {}
    cls = np.empty(P, dtype=np.int64)
    span = 8 if p == 2 else p
    for x in range(P):
        if x == 0:
            key = (nu, 0)
        else:
            j = int(v[x])
            width = min(span, p ** (nu - j)) if p == 2 else p
            r = int(u[x]) % width
            key = (j, r if p == 2 else int(pow(r, (p - 1) // 2, p) == 1))
        cls[x] = keys.setdefault(key, len(keys))
    C = len(keys)
    reps = np.zeros(C, dtype=np.int64)
    seen = np.zeros(C, dtype=bool)
    for x in range(P):
        c = cls[x]
        if not seen[c]:
            seen[c] = True
            reps[c] = x
    T = []
    for c in range(C):
        other = cls[(reps[c] - xs) % P]
        T.append(np.bincount(cls * C + other, minlength=C * C).reshape(C, C).tolist())
    return cls, [int(r) for r in reps], T


def _orbit_convolve(f, g, T, C):
    out = []
    nzf = [(a, x) for a, x in enumerate(f) if x]
    nzg = [(b, y) for b, y in enumerate(g) if y]
    for c in range(C):
        Tc = T[c]
        out.append(sum(x * y * Tc[a][b] for a, x in nzf for b, y in nzg if Tc[a][b]))
    return out


def _count_solutions(gram: tuple, gamma: tuple, m: Fraction, p: int, nu: int) -> int:
    """#{x in L/p^nu L : q(x - gamma) + m = 0 mod p^nu}.

    Blocks whose shift is p-integral are translated to pure forms, whose value
    counts are constant on unit-square orbits and are combined in that
    compressed space.  The other blocks are convolved in full.
    """
    B, blocks, A = jordan_splitting(gram, p)
    n = len(gram)
    Binv = _inverse_cached(B)
    g = [sum(Binv[i][j] * gamma[j] for j in range(n)) for i in range(n)]
    P = p**nu
    qg = sum(Fraction(gamma[i]) * gram[i][j] * gamma[j] for i in range(n) for j in range(n)) / 2
    const = qg + m
    if const.denominator != 1:
        raise UnsupportedIndex(f"m = {m} is not supported on this coset")
    target = (-int(const)) % P
    cls, reps, T = _orbit_classes(p, nu)
    C = len(reps)
    orbit = None
    full = None
    for blk in blocks:
        gb = [g[i] for i in blk]
        if all(x.denominator % p for x in gb):
            # q_b(x) - (x,g)_b = q_b(x - g) - q_b(g)
            target = (target + _mod_pk(_block_q(A, blk, gb), P)) % P
            coeffs, _ = _block_data(A, g, blk, P)
            h = _block_histogram(coeffs, (0,) * len(blk), P)
            f = [h[r] for r in reps]
            orbit = f if orbit is None else _orbit_convolve(orbit, f, T, C)
        else:
            coeffs, lin = _block_data(A, g, blk, P)
            h = _block_histogram(coeffs, lin, P)
            full = h if full is None else _cyclic_convolve(full, h, P)
    if full is None:
        return orbit[cls[target]]
    if orbit is None:
        return full[target]
    idx = cls[(target - np.arange(P, dtype=np.int64)) % P]
    return sum(c * orbit[int(k)] for c, k in zip(full, idx.tolist()) if c)


def _count_solutions_full(gram: tuple, gamma: tuple, m: Fraction, p: int, nu: int) -> int:
    """Same count with full-length convolutions only; a slower cross-check."""
    B, blocks, A = jordan_splitting(gram, p)
    n = len(gram)
    Binv = _inverse_cached(B)
    g = [sum(Binv[i][j] * gamma[j] for j in range(n)) for i in range(n)]
    P = p**nu
    qg = sum(Fraction(gamma[i]) * gram[i][j] * gamma[j] for i in range(n) for j in range(n)) / 2
    const = qg + m
    if const.denominator != 1:
        raise UnsupportedIndex(f"m = {m} is not supported on this coset")
    hist = None
    for blk in blocks:
        coeffs, lin = _block_data(A, g, blk, P)
        h = _block_histogram(coeffs, lin, P)
        hist = h if hist is None else _cyclic_convolve(hist, h, P)
    return hist[(-int(const)) % P]


_INV_CACHE: dict = {}


def _inverse_cached(B):
    key = tuple(tuple(r) for r in B)
    if key not in _INV_CACHE:
        _INV_CACHE[key] = rational_inverse(B)
    return _INV_CACHE[key]


def _stability_floor(L: IntegerLattice, m: Fraction, p: int) -> int:
    """Exponent beyond which the normalized count is checked for stability.

    Where L is unimodular at an odd p the coset is integral and solutions
    x = 0 mod p reduce to representing m/p^2; the count is then constant
    from v_p(m) + 1 on.  Elsewhere we use v_p(4 level num(m)) + 2.
    """
    det = determinant(L.gram)
    if p != 2 and det % p:
        return valuation(max(1, abs(m.numerator)), p) + 1
    D = discriminant_form(L)
    return valuation(4 * D.level * max(1, abs(m.numerator)), p) + 2


def local_density(L: IntegerLattice, mu, m, p: int, D: DiscriminantForm | None = None) -> LocalDensity:
    """Exact local density at p of the coset mu representing -m."""
    m = as_fraction(m)
    D = D or discriminant_form(L)
    mu = D.reduce(mu)
    if m <= 0:
        raise UnsupportedIndex("local densities need m > 0")
    if (m + D.q(mu)).denominator != 1:
        raise UnsupportedIndex(f"({m}, {list(mu)}) is not supported: need m = -q(mu) mod 1")
    gamma = D.lift(mu)
    r = L.rank
    nu = _stability_floor(L, m, p)
    if p == 2 or determinant(L.gram) % p == 0:
        nu += 1
    prev = Fraction(_count_solutions(L.gram, gamma, m, p, nu), p ** (nu * (r - 1)))
    while True:
        cur = Fraction(_count_solutions(L.gram, gamma, m, p, nu + 1), p ** ((nu + 1) * (r - 1)))
        if cur == prev:
            return LocalDensity(p, cur, nu)
        nu += 1
        prev = cur
        if nu > 60:
            raise PrecisionExhausted(f"density at p={p} did not stabilize")


def brute_force_density(L: IntegerLattice, mu, m, p: int, nu: int) -> Fraction:
    """p^{nu(1-r)} times a direct count over (Z/p^nu)^r; for small oracles only."""
    import itertools

    m = as_fraction(m)
    D = discriminant_form(L)
    gamma = D.lift(D.reduce(mu))
    n, P = L.rank, p**nu
    G = L.gram
    # integers throughout: Y = e (x - gamma), q(x - gamma) + m = (b Y.G.Y + 2 e^2 a) / (2 e^2 b)
    e = math.lcm(*(g.denominator for g in gamma)) if n else 1
    eg = [int(e * g) for g in gamma]
    a, b = m.numerator, m.denominator
    modulus = 2 * e * e * b * P
    const = 2 * e * e * a
    count = 0
    for x in itertools.product(range(P), repeat=n):
        Y = [e * v - w for v, w in zip(x, eg)]
        t = sum(Y[i] * G[i][j] * Y[j] for i in range(n) for j in range(n))
        if (b * t + const) % modulus == 0:
            count += 1
    return Fraction(count, p ** (nu * (n - 1)))


# ---------------------------------------------------------------------------
# good primes

def _chi_discriminant(L: IntegerLattice, m: Fraction) -> int:
    r = L.rank
    det = determinant(L.gram)
    if r % 2:
        s = (r - 1) // 2
        return fundamental_discriminant((-1) ** s * 2 * det * (-m))
    return fundamental_discriminant((-1) ** (r // 2) * det)


def good_prime_density(L: IntegerLattice, m, p: int) -> Fraction:
    """Closed-form density at a prime p not dividing 2 det num(m) den(m)."""
    m = as_fraction(m)
    r = L.rank
    chi = kronecker(_chi_discriminant(L, m), p)
    if r % 2:
        return 1 + chi * Fraction(1, p ** ((r - 1) // 2))
    return 1 - chi * Fraction(1, p ** (r // 2))


def bad_primes(L: IntegerLattice, m) -> list[int]:
    m = as_fraction(m)
    det = determinant(L.gram)
    return sorted(set(prime_factors(2 * det * m.numerator * m.denominator)))


def _l_value_exact(k: int, D0: int) -> tuple[Fraction, Fraction]:
    """L(k, chi_D0) = rat * sqrt(rad) * pi^k; returns (rat, rad).

    Requires chi(-1) = (-1)^k.
    """
    f = abs(D0)
    delta = 0 if D0 > 0 else 1
    if (k - delta) % 2:
        raise ParityError(f"L({k}, chi_{D0}) is not a rational multiple of pi^{k} sqrt(f)")
    Bk = generalized_bernoulli(k, D0) if f > 1 else bernoulli_number(k)
    sign = (-1) ** (1 + (k - delta) // 2)
    rat = Fraction(sign, 2) * Fraction(2**k, f**k) * Bk / math.factorial(k)
    return rat, Fraction(f)


def _signature_parity_ok(L: IntegerLattice, k: Fraction) -> bool:
    sig = signature(L)
    return (2 * k - (sig.b_minus - sig.b_plus)) % 4 == 0


def eisenstein_coefficient(
    L: IntegerLattice, k, m, mu, precision_target=None, D: DiscriminantForm | None = None
) -> Fraction:
    """Exact coefficient c(m, mu) of E_{k,L} under the dual Weil representation.

    Unsupported indices return 0.  ``precision_target`` is accepted for API
    compatibility; the computation is exact.
    """
    k, m = as_fraction(k), as_fraction(m)
    D = D or discriminant_form(L)
    mu = D.reduce(mu)
    r = L.rank
    if k != Fraction(r, 2):
        raise PreconditionError(f"weight {k} must equal rank/2 = {Fraction(r, 2)}", "eisenstein")
    if k <= 2:
        raise PreconditionError("weight must exceed 2", "eisenstein")
    if not _signature_parity_ok(L, k):
        raise ParityError("need 2k = b- - b+ mod 4 for the dual Weil representation")
    if m < 0 or (m + D.q(mu)).denominator != 1:
        return Fraction(0)
    if m == 0:
        return Fraction(1) if not any(mu) else Fraction(0)
    return _coefficient_positive(L, k, m, mu, D)


def _coefficient_positive(L, k, m, mu, D) -> Fraction:
    r = L.rank
    sig = signature(L)
    D0 = _chi_discriminant(L, m)
    f = abs(D0)
    bad = bad_primes(L, m)
    local = Fraction(1)
    for p in bad:
        local *= local_density(L, mu, m, p, D).value
    # rat * sqrt(rad) collects every non-pi factor; pi powers cancel identically
    if r % 2:
        s = (r - 1) // 2
        # (2 pi)^k / Gamma(k) = (2 pi)^s sqrt(2) 4^s s! / (2s)!  (times pi^0)
        arch_rat = Fraction(2**s * 4**s * math.factorial(s), math.factorial(2 * s))
        arch_rad = Fraction(2)
        # m^{k-1} = m^s / sqrt(m)
        arch_rat *= m**s
        arch_rad /= m
        Lrat, Lrad = _l_value_exact(s, D0)
        zrat, _ = _l_value_exact(2 * s, 1)
        rat = arch_rat * Lrat / zrat
        rad = arch_rad * Lrad
        for p in bad:
            chi = kronecker(D0, p)
            rat *= (1 - chi * Fraction(1, p**s)) / (1 - Fraction(1, p ** (2 * s)))
    else:
        kk = r // 2
        arch_rat = Fraction(2**kk, math.factorial(kk - 1)) * m ** (kk - 1)
        Lrat, Lrad = _l_value_exact(kk, D0)
        rat = arch_rat / Lrat
        rad = 1 / Lrad
        for p in bad:
            chi = kronecker(D0, p)
            rat /= 1 - chi * Fraction(1, p**kk)
    rad /= D.order
    sign = (-1) ** (sig.b_plus // 2) if sig.b_plus % 2 == 0 else None
    if sign is None:
        raise PreconditionError("odd b+ is not supported", "eisenstein")
    try:
        root = sqrt_rational(rad)
    except ValueError as exc:
        raise CalibrationFailure(f"leftover radical sqrt({rad}) is irrational") from exc
    return sign * rat * root * local


# ---------------------------------------------------------------------------
# numeric route: Euler product through mpmath L-values, then reconstruction

def _l_value_numeric(s: int, D0: int, prec: int):
    f = abs(D0)
    with mpmath.workprec(prec):
        if f == 1:
            return mpmath.zeta(s)
        total = mpmath.mpf(0)
        for a in range(1, f + 1):
            chi = kronecker(D0, a)
            if chi:
                total += chi * mpmath.zeta(s, mpmath.mpf(a) / f)
        return total / mpmath.mpf(f) ** s


def eisenstein_coefficient_numeric(L: IntegerLattice, k, m, mu, prec: int = 200) -> BigFloat:
    """c(m, mu) with transcendental factors evaluated numerically at ``prec`` bits."""
    k, m = as_fraction(k), as_fraction(m)
    D = discriminant_form(L)
    mu = D.reduce(mu)
    if m == 0:
        return BigFloat(1 if not any(mu) else 0, 0, prec)
    if (m + D.q(mu)).denominator != 1:
        return BigFloat(0, 0, prec)
    r = L.rank
    sig = signature(L)
    D0 = _chi_discriminant(L, m)
    bad = bad_primes(L, m)
    local = Fraction(1)
    for p in bad:
        local *= local_density(L, mu, m, p, D).value
    with mpmath.workprec(prec + 20):
        kf = mpmath.mpf(k.numerator) / k.denominator
        mf = mpmath.mpf(m.numerator) / m.denominator
        arch = (2 * mpmath.pi) ** kf * mf ** (kf - 1) / (mpmath.sqrt(D.order) * mpmath.gamma(kf))
        if r % 2:
            s = (r - 1) // 2
            euler = _l_value_numeric(s, D0, prec + 20) / mpmath.zeta(2 * s)
            for p in bad:
                chi = kronecker(D0, p)
                euler *= (1 - chi * mpmath.mpf(p) ** -s) / (1 - mpmath.mpf(p) ** (-2 * s))
        else:
            kk = r // 2
            euler = 1 / _l_value_numeric(kk, D0, prec + 20)
            for p in bad:
                chi = kronecker(D0, p)
                euler /= 1 - chi * mpmath.mpf(p) ** -kk
        val = (-1) ** (sig.b_plus // 2) * arch * euler * mpmath.mpf(local.numerator) / local.denominator
        err = abs(val) * mpmath.ldexp(1, 8 - prec)
    return BigFloat(val, err, prec)


def reconstruct_coefficient(L: IntegerLattice, k, m, mu, prec: int = 200, denom_bound: int | None = None) -> Fraction:
    """Numeric value turned back into a rational by continued fractions."""
    x = eisenstein_coefficient_numeric(L, k, m, mu, prec)
    if denom_bound is None:
        # the largest q for which the answer is still unique: eps < 1 / (2 q^2)
        eps = x.error_bound
        denom_bound = max(1, math.isqrt(int(1 / (2 * eps))) - 1) if eps else 2 ** (prec // 2)
    return rational_reconstruct(x, denom_bound)


def eisenstein_qexp(L: IntegerLattice, k, truncation, D: DiscriminantForm | None = None):
    """All coefficients c(m, mu) with m <= truncation, as a VVQExpansion."""
    from .qexp import VVQExpansion, supported_exponents

    D = D or discriminant_form(L)
    k = as_fraction(k)
    coeffs = {}
    for mu in D.elements():
        for m in supported_exponents(D, mu, truncation, dual=True):
            c = eisenstein_coefficient(L, k, m, mu, D=D)
            if c:
                coeffs[(m, mu)] = c
    return VVQExpansion(D, k, coeffs, as_fraction(truncation), dual=True)
