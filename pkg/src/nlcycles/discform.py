"""Discriminant forms A = L^v / L of even lattices.

Elements are tuples of residues modulo the invariant factors.  The
half-norm q(x) = <x,x>/2 mod 1 is the default quadratic value; the norm
<x,x> mod 2 is kept alongside it.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

from .arith import Cyclotomic, frac_part, mod2, sqrt_in_cyclotomic
from .errors import BadInput, ComputationError
from .lattice import (
    IntegerLattice,
    determinant,
    level,
    matvec,
    rational_inverse,
    signature,
    smith_normal_form,
    DegenerateLattice,
)

DiscElement = tuple


class GaussSumMismatch(ComputationError):
    module = "discform"


class DiscriminantForm:
    def __init__(self, lattice: IntegerLattice):
        G = [list(r) for r in lattice.gram]
        if determinant(G) == 0:
            raise DegenerateLattice("degenerate lattice has no discriminant form")
        U, diag, _ = smith_normal_form(G)
        Ui = rational_inverse(U)
        Gi = rational_inverse(G)
        keep = [i for i, d in enumerate(diag) if d != 1]
        self.lattice = lattice
        self.invariant_factors: tuple[int, ...] = tuple(diag[i] for i in keep)
        # generator i is G^{-1} U^{-1} e_i, a dual vector in lattice coordinates
        gens = []
        for i in keep:
            col = [Ui[r][i] for r in range(len(G))]
            gens.append(tuple(sum(Gi[r][c] * col[c] for c in range(len(G))) for r in range(len(G))))
        self.generators: tuple[tuple[Fraction, ...], ...] = tuple(gens)
        self._U = [U[i] for i in keep]
        self._gram = G
        n = len(gens)
        self._ggram = [[self._pair_vec(gens[i], gens[j]) for j in range(n)] for i in range(n)]

    def _pair_vec(self, x, y) -> Fraction:
        Gy = matvec(self._gram, y)
        return sum((Fraction(a) * b for a, b in zip(x, Gy)), Fraction(0))

    # -- basic data

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @cached_property
    def level(self) -> int:
        return level(self.lattice)

    @cached_property
    def signature(self):
        return signature(self.lattice)

    @property
    def zero(self) -> DiscElement:
        return tuple(0 for _ in self.invariant_factors)

    def reduce(self, mu: Sequence[int]) -> DiscElement:
        if len(mu) != len(self.invariant_factors):
            raise BadInput(f"element {list(mu)} has wrong length for factors {list(self.invariant_factors)}", "discform")
        return tuple(int(a) % d for a, d in zip(mu, self.invariant_factors))

    def add(self, a, b) -> DiscElement:
        return self.reduce([x + y for x, y in zip(a, b)])

    def scale(self, s: int, a) -> DiscElement:
        return self.reduce([s * x for x in a])

    def negate(self, a) -> DiscElement:
        return self.reduce([-x for x in a])

    def orbit_pm(self, a) -> set:
        a = self.reduce(a)
        return {a, self.negate(a)}

    def canonical_pm(self, a) -> DiscElement:
        return min(self.orbit_pm(a))

    def elements(self) -> Iterator[DiscElement]:
        return itertools.product(*(range(d) for d in self.invariant_factors))

    def isotropic_elements(self) -> list[DiscElement]:
        return [a for a in self.elements() if self.q(a) == 0]

    def element_order(self, a) -> int:
        a = self.reduce(a)
        return math.lcm(*(d // math.gcd(d, x) for x, d in zip(a, self.invariant_factors))) if a else 1

    # -- values

    def norm_mod2(self, a) -> Fraction:
        a = self.reduce(a)
        n = len(a)
        v = sum(
            (a[i] * a[j] * self._ggram[i][j] for i in range(n) for j in range(n) if a[i] and a[j]),
            Fraction(0),
        )
        return mod2(v)

    def q(self, a) -> Fraction:
        """Half-norm q(a) = <a,a>/2 in [0,1)."""
        return frac_part(self.norm_mod2(a) / 2)

    half_norm = q

    def bilinear(self, a, b) -> Fraction:
        a, b = self.reduce(a), self.reduce(b)
        v = sum(
            (x * y * self._ggram[i][j] for i, x in enumerate(a) for j, y in enumerate(b) if x and y),
            Fraction(0),
        )
        return frac_part(v)

    # -- lifting between cosets and dual vectors

    def lift(self, a) -> tuple[Fraction, ...]:
        """A dual vector (lattice coordinates) in the coset a."""
        a = self.reduce(a)
        r = self.lattice.rank
        v = (sum((x * g[k] for x, g in zip(a, self.generators)), Fraction(0)) for k in range(r))
        # any representative of the coset works; keep coordinates in [0, 1)
        return tuple(x - math.floor(x) for x in v)

    def coordinates(self, x: Sequence) -> DiscElement:
        """Class of a dual vector x (lattice coordinates)."""
        Gx = matvec(self._gram, [Fraction(v) for v in x])
        if any(Fraction(v).denominator != 1 for v in Gx):
            raise BadInput("vector is not in the dual lattice", "discform")
        return self.reduce([int(sum(u * int(v) for u, v in zip(row, Gx))) for row in self._U])

    def to_json(self) -> dict:
        return {"invariant_factors": list(self.invariant_factors), "order": self.order}

    def __repr__(self):
        return f"DiscriminantForm({list(self.invariant_factors)})"


@lru_cache(maxsize=128)
def discriminant_form(L: IntegerLattice) -> DiscriminantForm:
    return DiscriminantForm(L)


def gauss_sum(D: DiscriminantForm, M: int | None = None) -> Cyclotomic:
    M = M or math.lcm(8, D.level)
    total = Cyclotomic.zero(M)
    for a in D.elements():
        total = total + Cyclotomic.e(M, D.q(a))
    return total


def milgram_signature(D: DiscriminantForm) -> int:
    """s mod 8 with sum_a e(q(a)) = sqrt|A| e(s/8), evaluated exactly."""
    M = math.lcm(8, D.level)
    g = gauss_sum(D, M)
    root = sqrt_in_cyclotomic(D.order, M)
    for s in range(8):
        if g == root * Cyclotomic.e(M, Fraction(s, 8)):
            return s
    raise GaussSumMismatch("Gauss sum is not sqrt|A| times an eighth root of unity")


def format_element(a) -> str:
    return "[" + ",".join(str(int(x)) for x in a) + "]"


def parse_element(s) -> tuple[int, ...]:
    if isinstance(s, (list, tuple)):
        return tuple(int(x) for x in s)
    s = str(s).strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise BadInput(f"bad discriminant element {s!r}", "discform")
    body = s[1:-1].strip()
    return tuple(int(x) for x in body.split(",")) if body else ()
