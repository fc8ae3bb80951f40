import pytest
from hypothesis import given, strategies as st

from shtuka_forge.errors import ParseError
from shtuka_forge.fields import FqField, gf, is_irreducible
from shtuka_forge.series import (SeriesRing, TruncSeries, format_series, parse_series,
                                 parse_terms, ts_inv, ts_mul)

QS = [2, 3, 4, 5, 8, 9, 16, 25, 27]


def field_and_elems(n):
    return st.sampled_from(QS).flatmap(
        lambda q: st.tuples(st.just(gf(q)), *[st.integers(0, q - 1)] * n))


@given(field_and_elems(3))
def test_field_axioms(args):
    F, a, b, c = args
    assert F.add(a, b) == F.add(b, a)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.sub(F.add(a, b), b) == a
    if a:
        assert F.mul(a, F.inv(a)) == 1


@given(field_and_elems(2))
def test_frobenius_is_a_ring_map(args):
    F, a, b = args
    assert F.frob(F.add(a, b)) == F.add(F.frob(a), F.frob(b))
    assert F.frob(F.mul(a, b)) == F.mul(F.frob(a), F.frob(b))
    assert F.pow(a, F.q) == a


@pytest.mark.parametrize("q", QS)
def test_unit_group_is_cyclic(q):
    F = gf(q)
    g = F.generator()
    assert len({F.pow(g, k) for k in range(q - 1)}) == q - 1


@pytest.mark.parametrize("q", QS)
def test_format_parse_round_trip(q):
    F = gf(q)
    for a in F.elements():
        assert F.parse(F.format(a)) == a


def test_field_moduli_are_irreducible():
    for q in QS:
        F = gf(q)
        assert is_irreducible(F.modulus, F.p)
    assert not is_irreducible((1, 0, 1), 2)  # x^2 + 1 = (x + 1)^2 over F_2


def test_fields_compare_by_structure():
    assert gf(4) == FqField(2, 2)
    assert gf(4) != gf(2)


def test_series_inverse_and_product():
    F = gf(3)
    a = TruncSeries.make(F, 4, [1, 2, 0, 1])
    one = TruncSeries.one(F, 4)
    assert ts_mul(a, ts_inv(a)) == one
    assert a.valuation() == 0 and a.is_unit()
    z2 = TruncSeries.make(F, 4, [0, 0, 1, 0])
    assert z2.valuation() == 2 and not z2.is_unit()


@given(st.lists(st.integers(0, 1), min_size=5, max_size=5),
       st.lists(st.integers(0, 1), min_size=5, max_size=5))
def test_series_ring_codes_match_objects(xs, ys):
    F = gf(2)
    R = SeriesRing(F, 5)
    a, b = R.encode(xs), R.encode(ys)
    prod = ts_mul(TruncSeries.make(F, 5, xs), TruncSeries.make(F, 5, ys))
    assert R.decode(R.mul(a, b)) == tuple(prod.coeffs)
    assert R.sub(R.add(a, b), b) == a


def test_series_text_round_trip():
    F = gf(4)
    for text in ["1 + z", "z^3", "0"]:
        s = parse_series(text, F, 5)
        assert parse_series(format_series(s), F, 5) == s


def test_negative_exponents_parse():
    terms = parse_terms("z^-1 + z^3", gf(2))
    assert {e for e, c in terms.items() if c} == {-1, 3}


def test_bad_series_text():
    with pytest.raises(ParseError):
        parse_series("z^^2", gf(2), 3)
