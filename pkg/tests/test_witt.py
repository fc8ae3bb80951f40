import pytest
from hypothesis import given, strategies as st

from shtuka_forge import oracles
from shtuka_forge.errors import LengthUnderflow, MixedRings, NotInIdeal, ParseError
from shtuka_forge.fields import gf
from shtuka_forge.witt import (TruncPolyRing, WittRing, format_witt, parse_witt, witt_add,
                               witt_frobenius, witt_frobenius_inverse, witt_laws, witt_shift,
                               witt_truncate, witt_unit_inverse, witt_v_untwist,
                               witt_verschiebung)


def witt_and_vecs(q, N, n):
    F = gf(q)
    W = WittRing(F, N)
    coords = st.tuples(*[st.integers(0, q - 1)] * N)
    return st.tuples(st.just(W), *[coords.map(W.vec)] * n)


@given(witt_and_vecs(4, 3, 2))
def test_f4_against_ghost_oracle(args):
    W, x, y = args
    mod = W.base.modulus
    assert W.add(x, y).coords == oracles.ghost_witt(2, mod, "add", x.coords, y.coords)
    assert W.mul(x, y).coords == oracles.ghost_witt(2, mod, "mul", x.coords, y.coords)
    assert W.neg(x).coords == oracles.ghost_witt(2, mod, "neg", x.coords)


@given(witt_and_vecs(5, 2, 3))
def test_ring_axioms_w2_f5(args):
    W, x, y, z = args
    assert W.mul(x, W.add(y, z)) == W.add(W.mul(x, y), W.mul(x, z))
    assert W.add(x, W.neg(x)) == W.zero()
    assert W.mul(x, W.one()) == x


@given(witt_and_vecs(9, 2, 2))
def test_teichmuller_is_multiplicative(args):
    W, x, y = args
    a, b = x.coords[0], y.coords[0]
    assert W.mul(W.teichmuller(a), W.teichmuller(b)) == W.teichmuller(W.base.mul(a, b))


@given(witt_and_vecs(4, 3, 2))
def test_frobenius_is_a_ring_map_and_vf_is_p(args):
    W, x, y = args
    F = witt_frobenius
    assert F(W.add(x, y)) == W.add(F(x), F(y))
    assert F(W.mul(x, y)) == W.mul(F(x), F(y))
    assert witt_verschiebung(F(x)) == W.mul(W.from_int(2), x)
    assert witt_frobenius_inverse(F(x)) == x


def test_nonperfect_frobenius_drops_length():
    R = TruncPolyRing(2, 2)
    W = WittRing(R, 3)
    x = W.vec([R.parse("x"), 1, 0])
    fx = witt_frobenius(x)
    assert fx.ring.N == 2
    assert fx.coords[0] == R.mul(x.coords[0], x.coords[0])
    with pytest.raises(LengthUnderflow):
        witt_frobenius(WittRing(R, 1).vec([1]))


def test_from_int_matches_zmod():
    W = WittRing(gf(3), 3)
    for n in range(-5, 30):
        assert oracles.zmod_of_witt(3, 3, W.from_int(n).coords) == n % 27


def test_shift_and_untwist_are_inverse():
    W = WittRing(gf(2), 2)
    for x in W.elements():
        assert witt_v_untwist(witt_shift(x)) == x
        assert witt_truncate(witt_shift(x), 2) == witt_verschiebung(x)
    with pytest.raises(NotInIdeal):
        witt_v_untwist(W.one())


def test_unit_inverse():
    W = WittRing(gf(3), 2)
    for x in W.elements():
        if W.is_unit(x):
            assert W.mul(x, witt_unit_inverse(x)) == W.one()


def test_text_round_trip_and_errors():
    W = WittRing(gf(4), 2)
    for x in W.elements():
        assert parse_witt(format_witt(x), W) == x
    with pytest.raises(ParseError):
        parse_witt("1,0", W)
    with pytest.raises(ParseError):
        parse_witt("(1)", W)


def test_mixed_rings_rejected():
    a = WittRing(gf(2), 2).one()
    b = WittRing(gf(2), 3).one()
    with pytest.raises(MixedRings):
        witt_add(a, b)


def test_laws_are_cached_and_integral():
    L = witt_laws(3, 2)
    assert L is witt_laws(3, 2)
    for poly in L.add + L.mul:
        assert all(isinstance(c, int) for c in poly.values())
