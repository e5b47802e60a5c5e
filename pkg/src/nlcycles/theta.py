"""Vector-valued theta series of definite lattices.

Indices are nonnegative: for a positive-definite lattice m = q(x), for a
negative-definite one m = -q(x).  The resulting expansion therefore has
support m = q(mu) mod 1 (positive case) or m = -q(mu) mod 1 (negative case).
"""

from __future__ import annotations

from fractions import Fraction

from .arith import as_fraction
from .discform import DiscriminantForm, discriminant_form
from .enumeration import DEFAULT_BUDGET, norm_histogram
from .lattice import IndefiniteLattice, IntegerLattice, is_definite
from .qexp import VVQExpansion, support_offset


def _positive_gram(L: IntegerLattice) -> tuple[int, tuple]:
    sgn = is_definite(L)
    if sgn == 0:
        raise IndefiniteLattice(f"{L!r} is not definite", "theta")
    G = L.gram if sgn > 0 else tuple(tuple(-x for x in r) for r in L.gram)
    return sgn, G


def _coset_histogram(L: IntegerLattice, D: DiscriminantForm, mu, bound: Fraction, budget) -> dict[Fraction, int]:
    _, G = _positive_gram(L)
    # norm x^T G x = 2m
    hist = norm_histogram(G, D.lift(mu), 2 * bound, budget)
    return {t / 2: c for t, c in hist.items()}


def count_vectors(L: IntegerLattice, mu, m, budget=DEFAULT_BUDGET) -> int:
    """Number of x in mu + L with q(x) = m (or -q(x) = m when L is negative definite)."""
    m = as_fraction(m)
    _positive_gram(L)
    if m < 0:
        return 0
    D = discriminant_form(L)
    return _coset_histogram(L, D, D.reduce(mu), m, budget).get(m, 0)


def theta_qexp(L: IntegerLattice, truncation, budget=DEFAULT_BUDGET) -> VVQExpansion:
    sgn, _ = _positive_gram(L)
    D = discriminant_form(L)
    truncation = as_fraction(truncation)
    coeffs = {}
    done = {}
    for mu in D.elements():
        key = D.canonical_pm(mu)
        if key not in done:
            done[key] = _coset_histogram(L, D, key, truncation, budget) if truncation >= 0 else {}
        for m, c in done[key].items():
            coeffs[(m, mu)] = Fraction(c)
    f = VVQExpansion(D, Fraction(L.rank, 2), coeffs, truncation, dual=sgn < 0)
    f.meta["lattice"] = L.digest()
    return f
