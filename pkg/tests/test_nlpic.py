from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlcycles.discform import discriminant_form
from nlcycles.errors import BadInput
from nlcycles.lattice import (
    direct_sum,
    k3_weight_seven_halves,
    lambda_2d,
    lambda_cubic,
    lattice_f2,
    make_named,
    rescale,
)
from nlcycles.nlpic import (
    DivisorClassExpr,
    EmptyPrincipalPart,
    HypothesisNotSatisfied,
    UnsupportedSymbol,
    ell_star,
    eisenstein_partner_form,
    find_isometry,
    generating_set,
    h_to_p,
    hodge_via_eisenstein,
    hodge_via_theta,
    m_delta,
    matching_theta_lattices,
    nl_discriminant,
    p_to_h,
    pairing_gate,
    relation_from_form,
    relation_from_source,
    supported_symbols,
    symbol,
    theta_pairing,
    theta_partner_form,
    to_h_basis,
    to_p_basis,
)


def test_primitive_degree_two():
    L = lambda_2d(1)
    D = discriminant_form(L)
    e = ell_star(L)
    P10 = p_to_h(D, symbol(D, "P", 1, D.zero))
    assert P10 == DivisorClassExpr(D, 0, {symbol(D, "H", 1, D.zero): 1, symbol(D, "H", Fraction(1, 4), e): -1})


def test_trivial_discriminant_form():
    D = discriminant_form(direct_sum([make_named("U"), make_named("U")]))
    H4 = h_to_p(D, symbol(D, "H", 4, ()))
    assert H4 == DivisorClassExpr(D, 0, {symbol(D, "P", 4, ()): 1, symbol(D, "P", 1, ()): 1})
    P12 = p_to_h(D, symbol(D, "P", 12, ()))
    # squares dividing 12 are 1 and 4; moebius(2) = -1
    assert P12 == DivisorClassExpr(D, 0, {symbol(D, "H", 12, ()): 1, symbol(D, "H", 3, ()): -1})


def test_h00_is_minus_lambda():
    D = discriminant_form(lambda_2d(1))
    e = DivisorClassExpr(D, 0, {symbol(D, "H", 0, D.zero): 3})
    assert e.lambda_coeff == -3 and not e.terms
    with pytest.raises(UnsupportedSymbol):
        symbol(D, "P", 0, D.zero)
    with pytest.raises(UnsupportedSymbol):
        symbol(D, "H", Fraction(1, 3), (1,))
    with pytest.raises(UnsupportedSymbol):
        symbol(D, "Q", 1, (0,))


def test_symbols_are_canonical_up_to_sign():
    D = discriminant_form(lambda_2d(3))
    assert symbol(D, "H", Fraction(1, 12) + 1, (5,)) == symbol(D, "H", Fraction(13, 12), (1,))
    assert symbol(D, "H", Fraction(3, 4), (3,)).nl_multiplicity == 2


@st.composite
def expressions(draw):
    d = draw(st.integers(1, 8))
    D = discriminant_form(lambda_2d(d))
    pool = supported_symbols(D, "H", 2)
    chosen = draw(st.lists(st.sampled_from(pool), max_size=5))
    coeffs = draw(st.lists(st.integers(-20, 20), min_size=len(chosen), max_size=len(chosen)))
    lam = draw(st.integers(-50, 50))
    return DivisorClassExpr(D, lam, dict(zip(chosen, coeffs)))


@given(expressions())
def test_moebius_roundtrip(e):
    assert to_h_basis(to_p_basis(e)) == e
    p = to_p_basis(e)
    assert to_p_basis(to_h_basis(p)) == p


def test_relation_from_form_examples():
    D = discriminant_form(lambda_2d(1))
    rel = relation_from_form({(Fraction(-1), (0,)): 1, (Fraction(0), (0,)): 150, (Fraction(-1, 4), (1,)): 56}, D)
    assert rel.lambda_coeff == -150
    assert rel.coefficient("H", Fraction(1, 4), (1,)) == 56
    with pytest.raises(EmptyPrincipalPart):
        relation_from_form({}, D)
    with pytest.raises(BadInput):
        relation_from_form({(Fraction(-1), (0,)): 1})


def test_isotropic_constant_terms_are_dropped():
    D = discriminant_form(lambda_2d(4))
    rel = relation_from_form({(Fraction(-1), (0,)): 1, (Fraction(0), (4,)): 70}, D)
    assert rel.meta["dropped_isotropic"] == [{"mu": [4], "c": "70"}]


def test_cubic_relation_two_sources():
    L = lambda_cubic()
    D = discriminant_form(L)
    theta = relation_from_source(L, 1, theta_partner_form(L, make_named("E6"), 1))
    eis = relation_from_source(L, 1, eisenstein_partner_form(L, 1))
    assert theta == eis
    nontrivial = next(mu for mu in D.elements() if any(mu))
    assert theta.lambda_coeff == -96
    assert theta.coefficient("H", Fraction(1, 3), nontrivial) == 54
    assert theta.coefficient("H", 1, D.zero) == 1
    assert pairing_gate(L, theta) == 0


def test_f2_eisenstein_relation():
    L = lattice_f2()
    rel = relation_from_source(L, 1, eisenstein_partner_form(L, 1))
    assert rel.lambda_coeff == -152
    assert pairing_gate(L, rel) == 0
    got = sorted((str(s.m), c) for s, c in rel.terms.items())
    assert got == [("1", 1), ("1/4", 56), ("3/4", 2)]


def test_not_a_relation_fails_the_gate():
    L = lambda_2d(1)
    D = discriminant_form(L)
    rel = relation_from_form({(Fraction(-1), (0,)): 1, (Fraction(0), (0,)): 149, (Fraction(-1, 4), (1,)): 56}, D)
    assert pairing_gate(L, rel) != 0


def test_find_isometry():
    DE6 = discriminant_form(make_named("E6"))
    DC = discriminant_form(lambda_cubic())
    phi = find_isometry(DE6, DC, sign=1)
    assert phi is not None
    for a in DE6.elements():
        assert DC.q(phi[a]) == DE6.q(a)
    # A2 + E6 sits in E8, so the two forms are anti-isometric but not isometric
    DA2 = discriminant_form(make_named("A2"))
    assert find_isometry(DE6, DA2, sign=-1) is not None
    assert find_isometry(DE6, DA2, sign=1) is None
    assert find_isometry(DE6, discriminant_form(lambda_2d(1))) is None


EXPECTED_HODGE = {
    1: (150, {1: 56}),
    2: (108, {1: 64, 2: 14}),
    3: (98, {1: 54, 2: 27, 3: 2}),
}


@pytest.mark.parametrize("d", sorted(EXPECTED_HODGE))
def test_hodge_routes_agree(d):
    C, a = EXPECTED_HODGE[d]
    t = hodge_via_theta(d)
    e = hodge_via_eisenstein(d)
    for h in (t, e):
        assert h.C == C
        assert h.a == {k: Fraction(v) for k, v in a.items()}
        assert pairing_gate(lambda_2d(d), h.relation) == 0
    assert t.relation == e.relation
    assert all(v > 0 for v in e.a.values())


def test_hodge_isotropic_delta():
    h = hodge_via_eisenstein(4)
    assert h.isotropic == [4]
    assert h.a[4] == 70
    assert h.to_json()["isotropic_delta"] == [4]


@pytest.mark.parametrize("d", [1, 2, 3])
def test_matching_theta_lattices_pair_to_zero(d):
    L = lambda_2d(d)
    Ks = matching_theta_lattices(L, 1, limit=2)
    assert Ks
    for K in Ks:
        assert theta_pairing(L, K, 1) == 0


@pytest.mark.parametrize("d", [1, 2, 5, 12, 37, 50])
def test_generating_set_size(d):
    L = lambda_2d(d)
    gens = generating_set(L, "P")
    assert len(gens) == d + 1
    assert all(nl_discriminant(s, d) <= 4 * d for s in gens)
    general = set(generating_set(L, "P", presentation="general"))
    assert set(gens) <= general


def test_generating_set_flags():
    gens = generating_set(lambda_2d(4), "P")
    flagged = [s for s in gens if s.flags]
    assert len(flagged) == 1 and flagged[0].m == 1 and flagged[0].mu == (4,)
    assert m_delta(4, 4) == (1, True)
    assert m_delta(4, 0) == (1, False)
    assert m_delta(4, 3) == (Fraction(9, 16), False)


def test_h_flavor():
    L = lambda_2d(2)
    D = discriminant_form(L)
    gens = generating_set(L, "H")
    assert gens[0] == symbol(D, "H", 0, D.zero)
    assert all(s.m <= Fraction(21, 24) for s in gens)
    # 1/8 on +-ell*, 1/2 on 2 ell*
    assert [(s.m, s.mu) for s in gens[1:]] == [(Fraction(1, 8), (1,)), (Fraction(1, 2), (2,))]


def test_hypothesis_checks():
    with pytest.raises(HypothesisNotSatisfied):
        generating_set(k3_weight_seven_halves(1), "P")
    with pytest.raises(HypothesisNotSatisfied):
        generating_set(direct_sum([make_named("U"), rescale(make_named("E8"), -1)]), "P")
    with pytest.raises(BadInput):
        generating_set(lambda_2d(1), "X")
