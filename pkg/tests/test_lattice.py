import random

import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form as sympy_snf
from hypothesis import given
from hypothesis import strategies as st

from nlcycles.errors import BadInput
from nlcycles.lattice import (
    IndefiniteLattice,
    IntegerLattice,
    NoVectorFound,
    UnknownName,
    determinant,
    direct_sum,
    find_primitive_vector,
    from_json,
    integer_kernel,
    is_definite,
    k3_weight_seven_halves,
    lambda_2d,
    lambda_cubic,
    lattice_f2,
    level,
    make_named,
    matmul,
    orthogonal_complement,
    rescale,
    signature,
    smith_normal_form,
)


@pytest.mark.parametrize("name,det,rank", [("E8", 1, 8), ("E7", 2, 7), ("E6", 3, 6), ("A2", 3, 2), ("U", -1, 2)])
def test_named_lattices(name, det, rank):
    L = make_named(name)
    assert L.rank == rank
    assert determinant(L) == det


def test_k3_lattices():
    for d in (1, 2, 5):
        L = lambda_2d(d)
        assert L.rank == 21
        assert tuple(signature(L)) == (2, 19)
        assert abs(determinant(L)) == 2 * d
        assert L.hyperbolic_planes == 2
    C = lambda_cubic()
    assert C.rank == 22 and abs(determinant(C)) == 3 and tuple(signature(C)) == (2, 20)
    F = lattice_f2()
    assert tuple(signature(F)) == (2, 18) and abs(determinant(F)) == 4
    W = k3_weight_seven_halves(3)
    assert tuple(signature(W)) == (4, 3) and determinant(W) == -6


def test_even_symmetric_validation():
    with pytest.raises(BadInput):
        IntegerLattice(((1,),))
    with pytest.raises(BadInput):
        IntegerLattice(((2, 1), (0, 2)))
    with pytest.raises(UnknownName):
        make_named("F4")


small_matrix = st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=3, max_size=3)


@given(small_matrix)
def test_smith_normal_form_properties(M):
    U, diag, V = smith_normal_form(M)
    D = matmul(matmul(U, M), V)
    for i in range(3):
        for j in range(3):
            assert D[i][j] == (diag[i] if i == j else 0)
    assert abs(determinant(U)) == 1 and abs(determinant(V)) == 1
    nz = [d for d in diag if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    ref = sympy_snf(sympy.Matrix(M))
    assert sorted(abs(ref[i, i]) for i in range(3)) == sorted(diag)


@given(st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4), min_size=1, max_size=3))
def test_integer_kernel(M):
    K = integer_kernel(M)
    assert len(K) == 4 - sympy.Matrix(M).rank()
    for v in K:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in M)
    if K:
        # the kernel basis is saturated: its maximal minors have gcd 1
        minors = sympy.Matrix(K).rank()
        assert minors == len(K)


def test_signature_level_and_definiteness():
    assert is_definite(make_named("E8")) == 1
    assert is_definite(rescale(make_named("E7"), -1)) == -1
    assert is_definite(lambda_2d(1)) == 0
    assert level(make_named("E7")) == 4
    assert level(make_named("E6")) == 3
    assert level(lambda_2d(3)) == 12


def test_orthogonal_complement_in_e8():
    E8 = make_named("E8")
    v = find_primitive_vector(E8, 2)
    K = orthogonal_complement(E8, v)
    assert K.rank == 7 and determinant(K) == 2
    v = find_primitive_vector(E8, 6)
    assert abs(determinant(orthogonal_complement(E8, v))) == 6


def test_find_primitive_vector_errors():
    with pytest.raises(IndefiniteLattice):
        find_primitive_vector(lambda_2d(1), 2)
    with pytest.raises(NoVectorFound):
        find_primitive_vector(make_named("E8"), -2)
    v = find_primitive_vector(rescale(make_named("E8"), -1), -4)
    assert rescale(make_named("E8"), -1).norm(v) == -4


def test_from_json_roundtrip():
    L = lambda_2d(2)
    assert from_json({"gram": L.to_json()["gram"]}) == L
    assert from_json('{"name": "lambda_2d", "d": 2}') == L
    assert from_json({"name": "E8", "scale": -1}) == rescale(make_named("E8"), -1)
    with pytest.raises(BadInput):
        from_json({"name": "lambda_2d"})
    with pytest.raises(BadInput):
        from_json([1, 2])


def test_direct_sum_and_digest():
    A = direct_sum([make_named("U"), make_named("A2")])
    assert A.rank == 4 and A.hyperbolic_planes == 1
    assert A.digest() == direct_sum([make_named("U"), make_named("A2")]).digest()
    assert A.digest() != direct_sum([make_named("A2"), make_named("U")]).digest()


def test_smith_normal_form_no_coefficient_blowup():
    # an E6 Gram matrix in a skewed basis; naive pivoting explodes here
    G = [
        [58, 0, -80, -57, -19, -15],
        [0, 4, 7, 2, 3, 4],
        [-80, 7, 124, 83, 32, 28],
        [-57, 2, 83, 58, 21, 17],
        [-19, 3, 32, 21, 10, 8],
        [-15, 4, 28, 17, 8, 8],
    ]
    U, diag, V = smith_normal_form(G)
    assert diag == [1, 1, 1, 1, 1, 3]
    assert max(abs(x) for r in U + V for x in r) < 10**6
