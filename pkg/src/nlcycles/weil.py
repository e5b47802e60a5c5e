"""Weil representation of Mp_2(Z) attached to a discriminant form.

    rho(T) e_mu = e(q(mu)) e_mu
    rho(S) e_mu = e((b- - b+)/8) / sqrt|A| * sum_nu e(-(mu, nu)) e_nu

The dual representation is the entrywise complex conjugate.  Exact matrices
live in the integral group ring Z[C_M], M = lcm(8, level), with a tracked
power of |A|^{-1/2}; they are mapped to Q(zeta_M) only for comparisons.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .arith import BigFloat, Cyclotomic, _root_table, as_fraction, sqrt_in_cyclotomic
from .discform import DiscriminantForm, discriminant_form
from .errors import ComputationError, PreconditionError
from .lattice import IntegerLattice, Signature

_OVERFLOW = 2**50


class NonConvergent(PreconditionError):
    module = "weil"


class GroupRingMatrix:
    """Matrix over Z[C_M] times |A|^{-half/2}."""

    __slots__ = ("data", "half", "M", "order")

    def __init__(self, data: np.ndarray, half: int, M: int, order: int):
        self.data = data
        self.half = half
        self.M = M
        self.order = order

    @classmethod
    def identity(cls, n: int, M: int, order: int) -> "GroupRingMatrix":
        data = np.zeros((n, n, M), dtype=np.int64)
        for i in range(n):
            data[i, i, 0] = 1
        return cls(data, 0, M, order)

    def __matmul__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        A, B = self.data, other.data
        out = np.zeros((A.shape[0], B.shape[1], self.M), dtype=np.int64)
        for s in range(self.M):
            a = A[:, :, s]
            if a.any():
                out += np.einsum("ik,kjt->ijt", a, np.roll(B, s, axis=2))
        if np.abs(out).max(initial=0) > _OVERFLOW:
            raise ComputationError("group-ring coefficients too large; shorten the word", "weil")
        half = self.half + other.half
        # fold |A|^{-1} back into the coefficients when they are divisible
        while half >= 2 and not (out % self.order).any():
            out //= self.order
            half -= 2
        return GroupRingMatrix(out, half, self.M, self.order)

    def scale(self, k: int) -> "GroupRingMatrix":
        return GroupRingMatrix(self.data * k, self.half, self.M, self.order)

    def to_field(self) -> list[list[Cyclotomic]]:
        """Entries as elements of Q(zeta_M), with the scalar applied."""
        table = np.array([[int(x) for x in row] for row in _root_table(self.M)], dtype=object)
        coords = self.data.astype(object) @ table
        scal = Cyclotomic.one(self.M)
        if self.half % 2:
            scal = Cyclotomic.one(self.M) * Fraction(1, self.order) * sqrt_in_cyclotomic(self.order, self.M)
        scal = scal * Fraction(1, self.order ** (self.half // 2))
        n, m = self.data.shape[:2]
        return [[Cyclotomic(self.M, coords[i, j]) * scal for j in range(m)] for i in range(n)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupRingMatrix):
            return NotImplemented
        return self.to_field() == other.to_field()

    def to_complex(self) -> np.ndarray:
        z = np.exp(2j * np.pi * np.arange(self.M) / self.M)
        return (self.data @ z) * float(self.order) ** (-self.half / 2)


class WeilRep:
    def __init__(self, D: DiscriminantForm, sig: Signature | None = None, dual: bool = False):
        self.disc = D
        self.signature = sig or D.signature
        self.dual = dual
        self.elements = list(D.elements())
        self.index = {mu: i for i, mu in enumerate(self.elements)}
        self.M = math.lcm(8, D.level)
        self.order = D.order
        n, M = len(self.elements), self.M
        sgn = -1 if dual else 1
        self._t_exp = [sgn * int(D.q(mu) * M) % M for mu in self.elements]
        sigma = Fraction(self.signature.b_minus - self.signature.b_plus, 8)
        self._sigma_exp = sgn * int(sigma * M) % M
        self._s_exp = [
            [(self._sigma_exp - sgn * int(D.bilinear(mu, nu) * M)) % M for nu in self.elements]
            for mu in self.elements
        ]

    @property
    def dimension(self) -> int:
        return len(self.elements)

    def conjugate(self) -> "WeilRep":
        return WeilRep(self.disc, self.signature, not self.dual)

    # -- exact generators

    def rho_T(self, power: int = 1) -> GroupRingMatrix:
        n, M = self.dimension, self.M
        data = np.zeros((n, n, M), dtype=np.int64)
        for i, e in enumerate(self._t_exp):
            data[i, i, (power * e) % M] = 1
        return GroupRingMatrix(data, 0, M, self.order)

    def rho_S(self, inverse: bool = False) -> GroupRingMatrix:
        n, M = self.dimension, self.M
        data = np.zeros((n, n, M), dtype=np.int64)
        sgn = -1 if inverse else 1  # S^{-1} = conj(S) since S is symmetric and unitary
        for i in range(n):
            for j in range(n):
                data[i, j, (sgn * self._s_exp[i][j]) % M] = 1
        return GroupRingMatrix(data, 1, M, self.order)

    def identity(self) -> GroupRingMatrix:
        return GroupRingMatrix.identity(self.dimension, self.M, self.order)

    # -- numeric generators

    def rho_T_complex(self) -> np.ndarray:
        return np.diag(np.exp(2j * np.pi * np.array(self._t_exp) / self.M))

    def rho_S_complex(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.array(self._s_exp, dtype=float) / self.M) / math.sqrt(self.order)


def weil_rep(L: IntegerLattice, dual: bool = False) -> WeilRep:
    return WeilRep(discriminant_form(L), dual=dual)


_GENERATORS = {"T", "S", "T^-1", "S^-1", "T-1", "S-1", "Ti", "Si"}


def rep_of_word(W: WeilRep, word: Iterable[str]) -> GroupRingMatrix:
    """Exact image of a word over {T, S, T^-1, S^-1}, multiplied left to right."""
    out = W.identity()
    cache = {}
    for g in word:
        key = g.replace("^-1", "i").replace("-1", "i")
        if key not in ("T", "S", "Ti", "Si"):
            raise PreconditionError(f"unknown generator {g!r}", "weil")
        if key not in cache:
            cache[key] = {
                "T": lambda: W.rho_T(1),
                "Ti": lambda: W.rho_T(-1),
                "S": lambda: W.rho_S(False),
                "Si": lambda: W.rho_S(True),
            }[key]()
        out = out @ cache[key]
    return out


# ---------------------------------------------------------------------------
# metaplectic words

def _matmul2(A, B):
    return (
        (A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
        (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]),
    )


_T = ((1, 1), (0, 1))
_S = ((0, -1), (1, 0))


def sl2_word(M) -> list[tuple[str, int]]:
    """Factor M in SL_2(Z) as a product of (T, n) and (S, 1) tokens, left to right."""
    (a, b), (c, d) = M
    X = [[a, b], [c, d]]
    tokens: list[tuple[str, int]] = []
    while X[1][0] != 0:
        q = X[0][0] // X[1][0]
        if q:
            tokens.append(("T", q))
            X = [[X[0][0] - q * X[1][0], X[0][1] - q * X[1][1]], [X[1][0], X[1][1]]]
        # X = S * X', with X' = S^{-1} X
        tokens.append(("S", 1))
        X = [[X[1][0], X[1][1]], [-X[0][0], -X[0][1]]]
    s, n = X[0][0], X[0][1]
    if s == -1:
        tokens += [("S", 1), ("S", 1)]
        n = -n
    if n:
        tokens.append(("T", n))
    return tokens


def _word_matrix(tokens) -> tuple:
    out = ((1, 0), (0, 1))
    for g, n in tokens:
        if g == "T":
            out = _matmul2(out, ((1, n), (0, 1)))
        else:
            out = _matmul2(out, _S)
    return out


def _phi_at(tokens, tau: complex) -> complex:
    """Metaplectic cocycle of the word with standard lifts (T,1), (S, sqrt(tau))."""

    def act(M, z):
        return (M[0][0] * z + M[0][1]) / (M[1][0] * z + M[1][1])

    # product g1 g2 ... gk: phi(tau) = phi_1(g2...gk tau) * phi_2(g3..gk tau) * ...
    phi = 1 + 0j
    z = tau
    for g, n in reversed(tokens):
        if g == "S":
            phi *= cmath.sqrt(z)
            z = act(_S, z)
        else:
            z = z + n
    return phi


def _row0_of_word(W: WeilRep, tokens, TS) -> np.ndarray:
    Tc, Sc = TS
    diagT = np.diag(Tc)
    v = np.zeros(W.dimension, dtype=complex)
    v[0] = 1
    for g, n in tokens:
        if g == "T":
            v = v * diagT**n
        else:
            v = v @ Sc
    return v


def numeric_eisenstein(
    W: WeilRep,
    k,
    indices: Sequence[tuple],
    cutoff: int = 60,
    height: float = 1.0,
    samples: int | None = None,
) -> list[BigFloat]:
    """Coefficients of E_k under the dual of W by direct summation over (c, d).

    W must be the Weil representation of the lattice; the series uses its
    conjugate.  Returns values with a heuristic error estimate.
    """
    k = as_fraction(k)
    if k <= 2:
        raise NonConvergent("the Eisenstein series does not converge absolutely for k <= 2")
    D = W.disc
    Wd = W if W.dual else W.conjugate()
    if D.zero != Wd.elements[0]:
        raise ComputationError("zero element must come first", "weil")
    Tc, Sc = Wd.rho_T_complex(), Wd.rho_S_complex()
    # rho(I, -1) = rho(S)^4 acts by the scalar e((b- - b+)/2), conjugated for the dual
    sig = Wd.signature
    z2 = (-1) ** ((sig.b_minus - sig.b_plus) % 2)
    max_m = max((as_fraction(m) for m, _ in indices), default=Fraction(0))
    if samples is None:
        samples = 8 * D.level * (int(max_m) + 1)
    xs = np.arange(samples) / samples
    taus = xs + 1j * height
    kf = float(k)
    total = np.zeros((samples, Wd.dimension), dtype=complex)
    total[:, 0] += 1
    for c in range(1, cutoff + 1):
        for d in range(-cutoff, cutoff + 1):
            if math.gcd(c, d) != 1:
                continue
            # a d - b c = 1
            g, x, y = _egcd(d, c)
            a, b = x, -y
            tokens = sl2_word(((a, b), (c, d)))
            assert _word_matrix(tokens) == ((a, b), (c, d))
            phi_i = _phi_at(tokens, 1j)
            principal = cmath.sqrt(c * 1j + d)
            row = _row0_of_word(Wd, tokens, (Tc, Sc))
            if abs(phi_i - principal) > 1e-9:
                row = row * z2
            vec = np.conj(row)  # rho(M)^{-1} e_0 = conj of row 0
            weights = np.exp(-kf * np.log(c * taus + d))
            total += weights[:, None] * vec[None, :]
    out = []
    tail = 8 * 2**kf * float(cutoff) ** (2 - kf) / (kf - 2)
    for m, mu in indices:
        m = as_fraction(m)
        mu = D.reduce(mu)
        if (m + D.q(mu)).denominator != 1 or m < 0:
            out.append(BigFloat(0, 0, 53))
            continue
        j = Wd.index[mu]
        comp = total[:, j] * np.exp(-2j * np.pi * float(m) * xs)
        val = comp.mean() * math.exp(2 * math.pi * float(m) * height)
        err = (tail + 1e-13 * cutoff) * math.exp(2 * math.pi * float(m) * height) + abs(val.imag)
        out.append(BigFloat(val.real, err, 53))
    return out


def _egcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y
