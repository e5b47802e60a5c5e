from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlcycles.discform import (
    discriminant_form,
    format_element,
    gauss_sum,
    milgram_signature,
    parse_element,
)
from nlcycles.errors import BadInput
from nlcycles.lattice import (
    direct_sum,
    k3_weight_seven_halves,
    lambda_2d,
    lambda_cubic,
    lattice_f2,
    make_named,
    rescale,
    signature,
)
from nlcycles.nlpic import e8_complement


def catalog():
    out = [make_named(n) for n in ("U", "A2", "E6", "E7", "E8")]
    out += [make_named("rank1", n) for n in (2, 4, 6, -2, -8, 10)]
    out += [rescale(make_named(n), -1) for n in ("A2", "E6", "E7")]
    out += [lambda_2d(d) for d in (1, 2, 3, 4, 6, 10)]
    out += [lambda_cubic(), lattice_f2()] + [k3_weight_seven_halves(d) for d in (1, 3, 5)]
    out += [e8_complement(2 * d) for d in (2, 3, 4)]
    out += [direct_sum([make_named("A2"), make_named("rank1", 4), rescale(make_named("A2"), -1)])]
    return out


@pytest.mark.parametrize("L", catalog(), ids=lambda L: L.name or "L")
def test_milgram_signature(L):
    D = discriminant_form(L)
    sig = signature(L)
    assert milgram_signature(D) == (sig.b_plus - sig.b_minus) % 8


def test_invariant_factors():
    assert discriminant_form(make_named("E8")).invariant_factors == ()
    assert discriminant_form(make_named("E6")).invariant_factors == (3,)
    assert discriminant_form(lambda_2d(5)).invariant_factors == (10,)
    assert discriminant_form(lattice_f2()).invariant_factors == (2, 2)


def test_ell_star_values():
    for d in range(1, 8):
        D = discriminant_form(lambda_2d(d))
        x = [Fraction(0)] * 21
        x[20] = Fraction(1, 2 * d)
        e = D.coordinates(x)
        assert D.q(e) == Fraction(-1, 4 * d) % 1
        assert D.element_order(e) == 2 * d


def test_lambda6_coset():
    D = discriminant_form(lambda_2d(3))
    assert D.q((2,)) == Fraction(2, 3)
    assert D.q((3,)) == Fraction(1, 4)


@pytest.mark.parametrize("L", [make_named("E6"), lambda_2d(4), lattice_f2(), make_named("E7")], ids=str)
def test_quadratic_form_axioms(L):
    D = discriminant_form(L)
    els = list(D.elements())
    for a in els:
        assert D.q(D.negate(a)) == D.q(a)
        for b in els:
            # polarization: q(a+b) - q(a) - q(b) = (a,b) mod 1
            assert (D.q(D.add(a, b)) - D.q(a) - D.q(b) - D.bilinear(a, b)) % 1 == 0
    # nondegenerate
    for a in els:
        if any(a):
            assert any(D.bilinear(a, b) for b in els)


def test_lift_and_coordinates_roundtrip():
    D = discriminant_form(lattice_f2())
    for a in D.elements():
        assert D.coordinates(D.lift(a)) == a
    with pytest.raises(BadInput):
        D.coordinates([Fraction(1, 3)] + [0] * 19)


def test_isotropic_and_canonical():
    D = discriminant_form(lambda_2d(4))
    assert D.isotropic_elements() == [(0,), (4,)]
    assert D.canonical_pm((7,)) == (1,)
    assert D.orbit_pm((4,)) == {(4,)}


def test_gauss_sum_absolute_value():
    D = discriminant_form(lambda_2d(3))
    g = gauss_sum(D)
    assert abs(abs(g.to_complex()) ** 2 - D.order) < 1e-9


@given(st.lists(st.integers(-50, 50), max_size=4))
def test_element_format_roundtrip(xs):
    assert parse_element(format_element(xs)) == tuple(xs)


def test_parse_element_rejects_garbage():
    with pytest.raises(BadInput):
        parse_element("1,2")
    with pytest.raises(BadInput):
        discriminant_form(make_named("E6")).reduce((1, 2))
