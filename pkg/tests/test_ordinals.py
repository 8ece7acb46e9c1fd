import pytest
from hypothesis import given, strategies as st

from forcinglab.ordinals import (
    Cof,
    NotationError,
    Ordinal,
    bounded_universe,
    cof_class,
    fundamental_sequence,
    ord_add_natural,
    ord_compare,
)

UNIVERSE = bounded_universe(2, 2, 1)
ordinals = st.sampled_from(UNIVERSE)


def test_compare_examples(O):
    assert ord_compare(O("k"), O("w")) == 1
    assert ord_compare(O("w*2+1"), O("w*2+1")) == 0
    assert ord_compare(O("w+3"), O("w^2")) == -1


def test_add_natural_examples(O):
    assert ord_add_natural(O("w"), 4) == O("w+4")
    assert ord_add_natural(O("k+w"), 1) == O("k+w+1")
    assert ord_add_natural(O("0"), 4) == Ordinal.nat(4)


def test_cofinality_examples(O):
    assert cof_class(O("w")) is Cof.SMALL_LIMIT
    assert cof_class(O("k")) is Cof.LARGE_LIMIT
    assert cof_class(O("k*2+w")) is Cof.SMALL_LIMIT
    assert cof_class(O("0")) is Cof.ZERO
    assert cof_class(O("k*w")) is Cof.SMALL_LIMIT
    assert cof_class(O("k+3")) is Cof.SUCCESSOR


def test_fundamental_sequence_examples(O):
    assert fundamental_sequence(O("w"), 3) == Ordinal.nat(3)
    assert fundamental_sequence(O("w*2"), 5) == O("w+5")
    assert fundamental_sequence(O("k"), 2) == Ordinal.nat(2)
    assert fundamental_sequence(O("k*2"), 1) == O("k+1")
    with pytest.raises(NotationError):
        fundamental_sequence(O("w+1"), 0)


def test_parse_round_trip_and_canonical_output(O):
    text = "k*w^2*3+k*5+w*2+7"
    o = O(text)
    assert str(o) == text
    assert O(" k * w^2 * 3 + k*5 + w*2 + 7 ") == o
    for x in UNIVERSE:
        assert O(str(x)) == x


def test_non_canonical_input_rejected(O):
    with pytest.raises(NotationError):
        O("w+w^2")


@given(ordinals, ordinals)
def test_trichotomy(a, b):
    assert [a < b, a == b, b < a].count(True) == 1


@given(ordinals, ordinals, ordinals)
def test_transitivity(a, b, c):
    if a < b and b < c:
        assert a < c


@given(ordinals, ordinals, st.integers(0, 6))
def test_add_monotone(a, b, n):
    if a < b:
        assert a + n < b + n


@given(ordinals, st.integers(0, 15))
def test_fundamental_sequence_bounded_and_increasing(d, i):
    if d.is_limit():
        assert d.fundamental(i) < d
        assert d.fundamental(i) < d.fundamental(i + 1)
