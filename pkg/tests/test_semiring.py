from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from grail.errors import MixedSemiringError, ParseError, UnsupportedJoin
from grail.semiring import INF, Grade, Semiring

RINGS = [Semiring(k) for k in ("trivial", "nat", "nat-inf", "nonneg-real")]


def values(ring):
    if ring.kind == "trivial":
        return st.just(INF)
    if ring.kind == "nonneg-real":
        return st.fractions(min_value=0, max_value=50, max_denominator=12)
    nat = st.integers(min_value=0, max_value=40)
    if ring.kind == "nat-inf":
        return st.one_of(nat, st.just(INF))
    return nat


def grades(ring):
    return values(ring).map(ring.grade)


@pytest.mark.parametrize("ring", RINGS, ids=str)
def test_semiring_laws(ring):
    @given(grades(ring), grades(ring), grades(ring))
    def check(a, b, c):
        zero, one = ring.zero, ring.one
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert a + zero == a
        assert (a * b) * c == a * (b * c)
        assert a * one == a and one * a == a
        assert a * (b + c) == a * b + a * c
        assert (a + b) * c == a * c + b * c
        assert a * zero == zero and zero * a == zero
        # order is compatible with both operations
        if a <= b:
            assert a + c <= b + c
            assert a * c <= b * c
    check()


def test_zero_annihilates_infinity():
    R = Semiring("nat-inf")
    inf = R.grade(INF)
    assert inf * R.zero == R.zero
    assert inf * R.grade(3) == inf
    assert inf + R.grade(1) == inf


def test_discrete_orders():
    N = Semiring("nat")
    assert N.grade(2) <= N.grade(2)
    assert not N.grade(1) <= N.grade(2)
    R = Semiring("nonneg-real")
    assert R.grade(1) <= R.grade(2)


def test_joins_only_on_nonneg_real():
    R = Semiring("nonneg-real")
    assert R.grade(Fraction(1, 2)).join(R.grade(2)) == R.grade(2)
    with pytest.raises(UnsupportedJoin):
        Semiring("nat").grade(1).join(Semiring("nat").grade(2))


def test_parse_literals():
    R = Semiring("nonneg-real")
    assert R.parse("3/4") == R.grade(Fraction(3, 4))
    assert R.parse("0.25") == R.grade(Fraction(1, 4))
    assert Semiring("nat-inf").parse("inf").is_inf
    for bad in ("inf", "-1", "1/0", "x"):
        with pytest.raises(ParseError):
            R.parse(bad)
    with pytest.raises(ParseError):
        Semiring("nat").parse("1/2")


def test_mixing_semirings_is_an_error():
    with pytest.raises(MixedSemiringError):
        Semiring("nat").grade(1) + Semiring("nat-inf").grade(1)


def test_trivial_has_one_grade():
    T = Semiring("trivial")
    assert T.zero == T.one == Grade(INF, T)
