"""Exact arithmetic shared by every other module.

Rationals are :class:`fractions.Fraction`; this module adds partition
counting, elements of cyclotomic fields, error-tracked big floats and the
continued-fraction reconstruction that turns those floats back into
rationals.  A handful of elementary number-theoretic helpers (factoring,
Kronecker symbols, Bernoulli numbers) live here as well.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath

from .errors import ComputationError


class NoReconstruction(ComputationError):
    """No rational with the requested denominator bound fits the tolerance."""

    module = "arith"


# ---------------------------------------------------------------------------
# rationals

def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def format_rational(x) -> str:
    """Serialize as ``"p/q"`` (or a plain integer string when q = 1)."""
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str | int) -> Fraction:
    return as_fraction(s)


def frac_part(x) -> Fraction:
    """Representative of x in Q/Z, reduced to [0, 1)."""
    x = as_fraction(x)
    return x - (x.numerator // x.denominator)


def mod2(x) -> Fraction:
    """Representative of x in Q/2Z, reduced to [0, 2)."""
    x = as_fraction(x)
    return x - 2 * math.floor(x / 2)


def lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // math.gcd(out, x) if x else out
    return abs(out)


# ---------------------------------------------------------------------------
# partitions

@lru_cache(maxsize=None)
def _partition_table(n: int) -> tuple[int, ...]:
    p = [1] + [0] * n
    for m in range(1, n + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[m - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= m:
                total += sign * p[m - g2]
            k += 1
        p[m] = total
    return tuple(p)


def partition(n: int) -> int:
    """Number of partitions of n (pentagonal-number recurrence)."""
    if n < 0:
        raise ValueError("partition: n must be nonnegative")
    size = 1 << max(6, (n).bit_length())
    return _partition_table(size)[n]


def divisor_sigma(n: int, k: int = 1) -> int:
    return sum(d**k for d in divisors(n))


@lru_cache(maxsize=64)
def _partition_power_table(M: int, n: int) -> tuple[int, ...]:
    # g = prod (1 - q^j)^{-M};  q g'/g = M sum sigma(j) q^j
    sig = [0] + [divisor_sigma(j) for j in range(1, n + 1)]
    g = [1] + [0] * n
    for m in range(1, n + 1):
        acc = sum(sig[k] * g[m - k] for k in range(1, m + 1))
        g[m] = M * acc // m
    return tuple(g)


def partition_power(M: int, n: int) -> int:
    """P_M(n): the q^n coefficient of prod_{j>=1} (1 - q^j)^{-M}."""
    if M < 1 or n < 0:
        raise ValueError("partition_power: need M >= 1 and n >= 0")
    size = 1 << max(5, (n).bit_length())
    return _partition_power_table(M, size)[n]


# ---------------------------------------------------------------------------
# elementary number theory

def factorint(n: int) -> dict[int, int]:
    n = abs(n)
    if n == 0:
        raise ValueError("factorint(0)")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_factors(n: int) -> list[int]:
    return sorted(factorint(n))


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorint(n).items():
        ds = [d * p**i for d in ds for i in range(e + 1)]
    return sorted(ds)


def moebius(n: int) -> int:
    f = factorint(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def is_prime(n: int) -> bool:
    return n > 1 and factorint(n) == {n: 1}


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, v in enumerate(sieve) if v]


def valuation(x, p: int) -> int | float:
    """p-adic valuation of a rational; +inf for zero."""
    x = as_fraction(x)
    if x == 0:
        return math.inf
    v = 0
    a, b = x.numerator, x.denominator
    while a % p == 0:
        a //= p
        v += 1
    while b % p == 0:
        b //= p
        v -= 1
    return v


def jacobi(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise ValueError("jacobi: n must be odd and positive")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n)."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * jacobi(a, n)


def squarefree_part(x) -> int:
    """The squarefree integer in the square class of a nonzero rational."""
    x = as_fraction(x)
    n = x.numerator * x.denominator
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in factorint(n).items():
        if e % 2:
            out *= p
    return sign * out


def fundamental_discriminant(x) -> int:
    """Discriminant of Q(sqrt(x)) for a nonzero rational x (1 for squares)."""
    s = squarefree_part(x)
    return s if s % 4 == 1 else 4 * s


def sqrt_rational(x) -> Fraction:
    """Exact square root of a nonnegative rational; ValueError if irrational."""
    x = as_fraction(x)
    if x < 0:
        raise ValueError("sqrt of negative rational")
    a, b = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if a * a != x.numerator or b * b != x.denominator:
        raise ValueError(f"{x} is not a rational square")
    return Fraction(a, b)


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """B_n with the convention B_1 = -1/2."""
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(-1, 2)
    if n % 2:
        return Fraction(0)
    total = sum(math.comb(n + 1, k) * bernoulli_number(k) for k in range(n))
    return -total / (n + 1)


def bernoulli_polynomial(n: int, x) -> Fraction:
    x = as_fraction(x)
    return sum(math.comb(n, j) * bernoulli_number(j) * x ** (n - j) for j in range(n + 1))


def generalized_bernoulli(k: int, D: int) -> Fraction:
    """B_{k,chi} for the Kronecker character chi = (D/.) of a fundamental discriminant D."""
    f = abs(D)
    if f == 1:
        # trivial character: B_{1,chi} = +1/2 by the character convention
        return Fraction(1, 2) if k == 1 else bernoulli_number(k)
    total = Fraction(0)
    for a in range(1, f + 1):
        chi = kronecker(D, a)
        if chi:
            total += chi * bernoulli_polynomial(k, Fraction(a, f))
    return f ** (k - 1) * total


# ---------------------------------------------------------------------------
# cyclotomic fields

def _poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_divexact(a: Sequence[int], b: Sequence[int]) -> list[int]:
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1] // b[-1]
        q[i] = c
        for j, y in enumerate(b):
            a[i + j] -= c * y
    assert not any(a), "inexact polynomial division"
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(M: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the M-th cyclotomic polynomial."""
    num, den = [1], [1]
    for d in divisors(M):
        mu = moebius(M // d)
        factor = [-1] + [0] * (d - 1) + [1]
        if mu == 1:
            num = _poly_mul(num, factor)
        elif mu == -1:
            den = _poly_mul(den, factor)
    return tuple(_poly_divexact(num, den))


def euler_phi(n: int) -> int:
    out = n
    for p in factorint(n):
        out = out // p * (p - 1)
    return out


@lru_cache(maxsize=None)
def _root_table(M: int) -> tuple[tuple[Fraction, ...], ...]:
    # reduced coordinates of zeta^j for j = 0..M-1
    phi = cyclotomic_polynomial(M)
    deg = len(phi) - 1
    rows = []
    cur = [Fraction(0)] * deg
    cur[0] = Fraction(1)
    for _ in range(M):
        rows.append(tuple(cur))
        # multiply by x and reduce
        top = cur[-1]
        nxt = [Fraction(0)] + cur[:-1]
        if top:
            for i in range(deg):
                nxt[i] -= top * phi[i]
        cur = nxt
    return tuple(rows)


class Cyclotomic:
    """Element of Q(zeta_M) in the power basis, reduced modulo Phi_M."""

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs: Iterable):
        self.conductor = conductor
        c = tuple(as_fraction(x) for x in coeffs)
        deg = euler_phi(conductor)
        if len(c) < deg:
            c = c + (Fraction(0),) * (deg - len(c))
        elif len(c) > deg:
            c = _reduce(conductor, c)
        self.coeffs = c

    @classmethod
    def zero(cls, M: int) -> "Cyclotomic":
        return cls(M, ())

    @classmethod
    def one(cls, M: int) -> "Cyclotomic":
        return cls(M, (1,))

    @classmethod
    def rational(cls, M: int, x) -> "Cyclotomic":
        return cls(M, (x,))

    @classmethod
    def root(cls, M: int, k) -> "Cyclotomic":
        """e(k/M) = zeta_M^k for integer k, or e(x) for a rational x with denominator | M."""
        k = as_fraction(k)
        if k.denominator != 1:
            raise ValueError("root exponent must be an integer")
        return cls(M, _root_table(M)[int(k) % M])

    @classmethod
    def e(cls, M: int, x) -> "Cyclotomic":
        """exp(2 pi i x) for rational x with M x integral."""
        x = as_fraction(x) * M
        if x.denominator != 1:
            raise ValueError(f"e({x / M}) does not lie in Q(zeta_{M})")
        return cls.root(M, x)

    def _check(self, other: "Cyclotomic") -> None:
        if self.conductor != other.conductor:
            raise ValueError("mixed cyclotomic conductors")

    def __add__(self, other):
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic.rational(self.conductor, other)
        self._check(other)
        return Cyclotomic(self.conductor, (a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.conductor, (-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Cyclotomic):
            x = as_fraction(other)
            return Cyclotomic(self.conductor, (a * x for a in self.coeffs))
        self._check(other)
        prod = [Fraction(0)] * (2 * len(self.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        return Cyclotomic(self.conductor, _reduce(self.conductor, prod))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Cyclotomic):
            try:
                other = Cyclotomic.rational(self.conductor, other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.conductor == other.conductor and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.conductor, self.coeffs))

    def conjugate(self) -> "Cyclotomic":
        table = _root_table(self.conductor)
        out = [Fraction(0)] * len(self.coeffs)
        for j, a in enumerate(self.coeffs):
            if a:
                for i, b in enumerate(table[(-j) % self.conductor]):
                    out[i] += a * b
        return Cyclotomic(self.conductor, out)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_complex(self) -> complex:
        z = complex(math.cos(2 * math.pi / self.conductor), math.sin(2 * math.pi / self.conductor))
        return sum(float(a) * z**j for j, a in enumerate(self.coeffs))

    def __repr__(self):
        terms = [f"{format_rational(a)}*z^{j}" for j, a in enumerate(self.coeffs) if a]
        return f"Cyclotomic({self.conductor}: {' + '.join(terms) or '0'})"


def _reduce(M: int, coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    phi = cyclotomic_polynomial(M)
    deg = len(phi) - 1
    c = list(coeffs)
    for i in range(len(c) - 1, deg - 1, -1):
        top = c[i]
        if top:
            c[i] = Fraction(0)
            for j in range(deg):
                c[i - deg + j] -= top * phi[j]
    return tuple(c[:deg]) + (Fraction(0),) * max(0, deg - len(c))


def sqrt_in_cyclotomic(n: int, M: int) -> Cyclotomic:
    """sqrt(n) as an element of Q(zeta_M), built from quadratic Gauss sums.

    Requires 8 | M and every odd prime dividing the squarefree part of n to divide M.
    """
    if n <= 0:
        raise ValueError("sqrt_in_cyclotomic: n must be positive")
    out = Cyclotomic.one(M)
    for p, e in factorint(n).items():
        out = out * p ** (e // 2)
        if e % 2 == 0:
            continue
        if p == 2:
            if M % 8:
                raise ValueError("need 8 | M for sqrt(2)")
            r = Cyclotomic.e(M, Fraction(1, 8)) + Cyclotomic.e(M, Fraction(-1, 8))
        else:
            if M % p or M % 4:
                raise ValueError(f"need 4p | M for sqrt({p})")
            g = Cyclotomic.zero(M)
            for a in range(p):
                g = g + Cyclotomic.e(M, Fraction(a * a, p))
            # g = sqrt(p) if p = 1 mod 4 else i sqrt(p)
            r = g if p % 4 == 1 else g * Cyclotomic.e(M, Fraction(-1, 4))
        out = out * r
    return out


# ---------------------------------------------------------------------------
# big floats with error bounds

class BigFloat:
    """An mpmath float together with an upper bound on its absolute error."""

    __slots__ = ("value", "error", "prec")

    def __init__(self, value, error=0, prec: int = 256):
        with mpmath.workprec(prec):
            if isinstance(value, Fraction):
                self.value = mpmath.fdiv(value.numerator, value.denominator)
                error = as_fraction(error) + abs(value - mpf_to_fraction(self.value))
            else:
                self.value = mpmath.mpf(value)
            if isinstance(error, Fraction):
                # round the bound up so it stays a bound
                self.error = mpmath.fdiv(abs(error.numerator), error.denominator, rounding="u")
            else:
                self.error = abs(mpmath.mpf(error))
        self.prec = prec

    @property
    def error_bound(self) -> Fraction:
        return mpf_to_fraction(self.error)

    @classmethod
    def from_rational(cls, x, prec: int = 256) -> "BigFloat":
        x = as_fraction(x)
        with mpmath.workprec(prec):
            v = mpmath.mpf(x.numerator) / x.denominator
            err = abs(v) * mpmath.ldexp(1, 1 - prec)
        return cls(v, err, prec)

    def _rounding(self, v):
        return abs(v) * mpmath.ldexp(1, 1 - self.prec)

    def __add__(self, other):
        if not isinstance(other, BigFloat):
            other = BigFloat.from_rational(other, self.prec)
        prec = min(self.prec, other.prec)
        with mpmath.workprec(prec):
            v = self.value + other.value
            return BigFloat(v, self.error + other.error + abs(v) * mpmath.ldexp(1, 1 - prec), prec)

    __radd__ = __add__

    def __neg__(self):
        return BigFloat(-self.value, self.error, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, BigFloat):
            other = BigFloat.from_rational(other, self.prec)
        prec = min(self.prec, other.prec)
        with mpmath.workprec(prec):
            v = self.value * other.value
            err = (
                abs(self.value) * other.error
                + abs(other.value) * self.error
                + self.error * other.error
                + abs(v) * mpmath.ldexp(1, 1 - prec)
            )
            return BigFloat(v, err, prec)

    __rmul__ = __mul__

    def to_fraction(self) -> Fraction:
        return mpf_to_fraction(self.value)

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        return f"BigFloat({mpmath.nstr(self.value, 20)} +- {mpmath.nstr(self.error, 3)})"


def mpf_to_fraction(v) -> Fraction:
    """Exact rational value of a finite mpf."""
    sign, man, exp, _ = v._mpf_ if isinstance(v, mpmath.mpf) else mpmath.mpf(v)._mpf_
    man, exp = (-1) ** sign * int(man), int(exp)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)


def rational_reconstruct(x: BigFloat, denom_bound: int) -> Fraction:
    """The unique p/q with q <= denom_bound within x.error of x.value.

    Requires x.error < 1/(2 denom_bound^2), which makes the answer unique.
    """
    if denom_bound < 1:
        raise ValueError("denom_bound must be positive")
    eps = mpf_to_fraction(x.error)
    if eps >= Fraction(1, 2 * denom_bound * denom_bound):
        raise NoReconstruction(
            f"tolerance {mpmath.nstr(x.error, 3)} too large for denominator bound {denom_bound}"
        )
    center = x.to_fraction()
    cand = center.limit_denominator(denom_bound)
    if abs(cand - center) > eps:
        raise NoReconstruction("no rational within tolerance; increase precision or bound")
    return cand
