import random

import pytest
from hypothesis import given, strategies as st

from shtuka_forge.chain import (hcat, kernel_gens, make_chain, map_injective, mat_identity,
                                mat_inverse, mat_mul, module_structure, random_invertible,
                                smith, structure_length, free_over)
from shtuka_forge.errors import NonUnit, ParseError

BASES = [("field", 4, 1), ("series", 2, 4), ("series", 3, 3), ("witt", 2, 3), ("witt", 9, 2)]


def chains():
    return st.sampled_from(BASES).map(lambda b: make_chain(*b))


@given(chains(), st.integers(0, 2**32))
def test_divide_pi(A, seed):
    rng = random.Random(seed)
    a = A.random(rng)
    v = A.val(a)
    if v < A.K:
        u = A.divide_pi(a, v)
        assert A.is_unit(u)
        assert A.mul(A.pi_power(v), u) == a
    assert A.val(A.pi_power(A.K)) == A.K


@given(chains(), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32))
def test_smith_normal_form(A, r, c, seed):
    rng = random.Random(seed)
    M = [[A.mul(A.random(rng), A.pi_power(rng.randrange(A.K + 1))) for _ in range(c)]
         for _ in range(r)]
    vals, P, Q = smith(A, M, track=True)
    D = mat_mul(A, mat_mul(A, P, M), Q)
    for i in range(r):
        for j in range(c):
            want = A.pi_power(vals[i]) if i == j and vals[i] < A.K else A.zero
            assert D[i][j] == want
    mat_inverse(A, P)
    mat_inverse(A, Q)
    assert smith(A, M)[0] == vals


@given(chains(), st.integers(1, 3), st.integers(0, 2**32))
def test_inverse(A, n, seed):
    M = random_invertible(A, n, random.Random(seed))
    assert mat_mul(A, M, mat_inverse(A, M)) == mat_identity(A, n)


def test_singular_matrix():
    A = make_chain("series", 2, 3)
    with pytest.raises(NonUnit):
        mat_inverse(A, [[A.pi_power(1)]])


def test_presented_modules():
    A = make_chain("witt", 2, 3)  # Z/8
    S = [[A.pi_power(1), A.zero], [A.zero, A.zero]]
    st_ = module_structure(A, 2, S)
    assert st_ == {"free": 1, "torsion": [1]}
    assert structure_length(A, st_) == 4
    assert free_over(A, {"free": 0, "torsion": [1, 1]}, 1)
    assert not free_over(A, st_, 1)
    # multiplication by 2 on Z/8 has kernel generated by 4
    ker = kernel_gens(A, [[A.pi_power(1)]], 1)
    assert [A.val(g[0]) for g in ker] == [2]
    assert not map_injective(A, [[A.pi_power(1)]], 1, [], 1, [])
    # ... but Z/4 -> Z/8, x -> 2x is injective
    assert map_injective(A, [[A.pi_power(1)]], 1, [[A.pi_power(2)]], 1, [])
    assert hcat(A, 1, [[A.one]], [], [[A.zero]]) == [[A.one, A.zero]]


def test_make_chain_errors():
    with pytest.raises(ParseError):
        make_chain("padic", 2, 2)


def test_text_round_trip():
    for tag, q, K in BASES:
        A = make_chain(tag, q, K)
        for a in list(A.elements())[:50]:
            assert A.parse(A.format(a)) == a
