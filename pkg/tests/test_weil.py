from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlcycles.arith import Cyclotomic, mpf_to_fraction
from nlcycles.eisenstein import eisenstein_coefficient
from nlcycles.errors import PreconditionError
from nlcycles.lattice import lambda_2d, lattice_f2, make_named, rescale, signature
from nlcycles.weil import NonConvergent, numeric_eisenstein, rep_of_word, sl2_word, weil_rep
from nlcycles.weil import _word_matrix

LATTICES = [
    make_named("A2"),
    make_named("E6"),
    make_named("rank1", 4),
    rescale(make_named("E7"), -1),
    lambda_2d(2),
    lambda_2d(3),
    lattice_f2(),
]


@pytest.mark.parametrize("L", LATTICES, ids=str)
@pytest.mark.parametrize("dual", [False, True])
def test_modular_relations(L, dual):
    W = weil_rep(L, dual)
    S2 = rep_of_word(W, "SS")
    assert rep_of_word(W, "STSTST") == S2
    assert rep_of_word(W, ["S", "S^-1"]) == W.identity()
    assert rep_of_word(W, ["T", "T^-1"]) == W.identity()
    assert rep_of_word(W, "T" * W.disc.level) == W.identity()
    # S^2 is e(-sig/4) times mu -> -mu, so S^4 is the scalar (-1)^sig
    sig = signature(L)
    S4 = (S2 @ S2).to_complex()
    assert np.allclose(S4, (-1) ** ((sig.b_plus - sig.b_minus) % 2) * np.eye(W.dimension))


@pytest.mark.parametrize("L", LATTICES[:4], ids=str)
def test_exact_unitarity(L):
    W = weil_rep(L)
    S = W.rho_S()
    Sc = S.to_field()
    n = W.dimension
    zero, one = Cyclotomic.zero(S.M), Cyclotomic.one(S.M)
    for i in range(n):
        for j in range(n):
            inner = sum((Sc[i][k] * Sc[j][k].conjugate() for k in range(n)), zero)
            assert inner == (one if i == j else zero)


def test_dual_rep_is_conjugate():
    W = weil_rep(lambda_2d(3))
    assert np.allclose(W.conjugate().rho_S_complex(), np.conj(W.rho_S_complex()))
    assert np.allclose(W.conjugate().rho_T_complex(), np.conj(W.rho_T_complex()))


def test_unknown_generator():
    with pytest.raises(PreconditionError):
        rep_of_word(weil_rep(make_named("A2")), ["U"])


@given(st.integers(-40, 40), st.integers(-40, 40))
def test_sl2_word_roundtrip(c, d):
    from math import gcd

    if gcd(c, d) != 1:
        return
    # complete (c, d) to a matrix of determinant one
    x, y = next((x, y) for x in range(-60, 61) for y in range(-60, 61) if x * d - y * c == 1)
    M = ((x, y), (c, d))
    assert _word_matrix(sl2_word(M)) == M


def test_numeric_eisenstein_matches_exact():
    L = lambda_2d(3)
    k = Fraction(21, 2)
    idx = [(Fraction(1, 3), (2,)), (Fraction(4, 3), (2,)), (Fraction(1), (0,)), (Fraction(13, 12), (1,))]
    num = numeric_eisenstein(weil_rep(L), k, idx, cutoff=40)
    for (m, mu), b in zip(idx, num):
        exact = eisenstein_coefficient(L, k, m, mu)
        assert abs(mpf_to_fraction(b.value) - exact) <= b.error_bound
    # the first value is the cubic-fourfold lower bound
    assert eisenstein_coefficient(L, k, Fraction(1, 3), (2,)) == Fraction(-523777, 206215591)


def test_numeric_eisenstein_unsupported_is_zero():
    L = lambda_2d(3)
    (b,) = numeric_eisenstein(weil_rep(L), Fraction(21, 2), [(Fraction(11, 12), (1,))], cutoff=10)
    assert b.value == 0


def test_nonconvergent():
    with pytest.raises(NonConvergent):
        numeric_eisenstein(weil_rep(make_named("rank1", 2)), 2, [(0, (0,))])
