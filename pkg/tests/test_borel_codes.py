import itertools

import pytest
from hypothesis import given, strategies as st

from forcinglab.borel_codes import (
    PI,
    SIGMA,
    BorelCode,
    FiniteSpace,
    UnknownLabel,
    code_class,
    demorgan_holds,
    exact_level_oracle,
    interpret,
    saturation_levels,
)
from forcinglab.verification import space_corpus

X2 = FiniteSpace.cylinders(2)
SIERPINSKI = FiniteSpace(("a", "b"), {"a": {"a"}, "ab": {"a", "b"}})
leaf = BorelCode.leaf
node = BorelCode.node


def test_leaf_with_empty_label_is_everything():
    assert interpret(leaf(""), X2) == X2.universe


def test_root_with_two_leaves():
    assert interpret(node(leaf("0"), leaf("11")), X2) == {"10"}


def test_double_complement_layer_is_an_intersection_of_cylinders():
    code = node(node(leaf("0")), node(leaf("01")))
    brute = {x for x in X2.points if x.startswith("0") and x.startswith("01")}
    assert interpret(code, X2) == brute == {"01"}


def test_interpret_errors():
    with pytest.raises(KeyError):
        interpret(leaf("0"), X2, (3,))
    with pytest.raises(UnknownLabel):
        interpret(leaf("2"), X2)


def test_code_class_examples():
    assert code_class(leaf("0")) == (PI, 0)
    assert code_class(node(leaf("0"), leaf("1"))) == (PI, 1)
    assert code_class(node(node(leaf("0"), leaf("1")))) == (SIGMA, 1)


def test_oracle_examples():
    discrete = FiniteSpace.cylinders(2)
    for r in range(5):
        for target in itertools.combinations(discrete.points, r):
            assert exact_level_oracle(discrete, target) == 1
    assert exact_level_oracle(SIERPINSKI, {"b"}) == 2
    assert exact_level_oracle(SIERPINSKI, {"a", "b"}) == 1
    with pytest.raises(ValueError):
        exact_level_oracle(SIERPINSKI, {"c"})


def test_oracle_refuses_unseparated_points():
    glued = FiniteSpace(("a", "b"), {"ab": {"a", "b"}})
    with pytest.raises(ValueError):
        exact_level_oracle(glued, {"a"})


def test_levels_are_cumulative_and_union_closed():
    for _, space in space_corpus()[:60]:
        levels = saturation_levels(space)
        for lo, hi in zip(levels, levels[1:]):
            assert lo <= hi
        for fam in levels:
            assert all(a | b in fam for a in fam for b in fam)


def test_json_round_trip():
    code = node(node(leaf("0")), leaf("11"))
    assert BorelCode.from_json(code.to_json()) == code
    assert FiniteSpace.from_json(SIERPINSKI.to_json()) == SIERPINSKI
    with pytest.raises(ValueError):
        BorelCode.from_json({"tree": [[]], "leaves": {}})


@st.composite
def codes(draw, depth=3):
    labels = sorted(X2.subbasics)
    if depth == 0 or draw(st.booleans()):
        return leaf(draw(st.sampled_from(labels)))
    kids = draw(st.lists(codes(depth=depth - 1), min_size=1, max_size=3))
    return node(*kids)


@given(codes())
def test_demorgan_coherence_on_random_codes(code):
    assert demorgan_holds(code, X2)


@given(st.sets(st.sampled_from(SIERPINSKI.points)))
def test_oracle_level_reaches_set_and_complement(target):
    n = exact_level_oracle(SIERPINSKI, target)
    fam = saturation_levels(SIERPINSKI)[n - 1]
    idx = {p: i for i, p in enumerate(SIERPINSKI.points)}
    t = sum(1 << idx[p] for p in target)
    assert t in fam and (3 & ~t) in fam
