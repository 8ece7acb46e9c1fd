import pytest
from hypothesis import given, strategies as st

from forcinglab import borel_codes as bc
from forcinglab import wf_complexity as wf
from forcinglab.ordinals import Ordinal

O = Ordinal.parse
GRID = wf.Grid(2, 2)
SETS = list(GRID.membership_sets())
TREES = GRID.trees()
MENU = ["1", "2", "3", "k", "k+1", "k*2"]
FULL = frozenset(GRID.nodes)


def test_grid_universe_sizes():
    assert len(GRID.nodes) == 7
    assert len(SETS) == 128
    assert len(TREES) == 26
    assert wf.Grid.parse("grid(b=2,d=2)") == GRID
    with pytest.raises(ValueError):
        wf.Grid.parse("grid(2,2)")
    with pytest.raises(wf.GridTooLarge):
        wf.Grid(3, 3).check_size()


def test_rank_examples():
    assert wf.wf_rank({()}) == Ordinal()
    assert wf.wf_rank(FULL) == Ordinal.nat(2)
    assert wf.wf_rank(set()) == Ordinal()
    with pytest.raises(ValueError):
        wf.wf_rank({(0,)})


def test_membership_examples():
    assert wf.wf_membership({()}, 1)
    assert not wf.wf_membership(FULL, 2)
    assert wf.wf_membership(FULL, 3)
    assert not wf.wf_membership({(0, 1)}, 5)
    assert wf.wf_membership(set(), 1) and not wf.wf_membership(set(), 0)


def test_recursion_examples():
    assert wf.recursion_membership({()}, 1)
    star = {(), (0,), (1,)}
    assert not wf.recursion_membership(star, 1)
    assert wf.recursion_membership(star, 2)
    assert not wf.recursion_membership({(0,)}, 3, (1,), depth=2, branching=2)


def test_claimed_class_table():
    assert wf.claimed_class("k*2") == ("Sigma", O("4"))
    assert wf.claimed_class("k+3") == ("Pi", O("3"))
    assert wf.claimed_class("3") == ("Pi", O("1"))
    with pytest.raises(ValueError):
        wf.claimed_class("0")


@given(st.integers(0, 6), st.integers(0, 6))
def test_claimed_levels_are_even_then_odd_and_monotone(a, b):
    if a == 0 and b == 0:
        return
    alpha = Ordinal.kappa(a, b)
    pol, level = wf.claimed_class(alpha)
    if b == 0:
        assert (pol, level) == ("Sigma", Ordinal.nat(2 * a))
    else:
        assert (pol, level) == ("Pi", Ordinal.nat(2 * a + 1))
    nxt = Ordinal.kappa(a, b + 1)
    assert level <= wf.claimed_class(nxt)[1]
    assert level <= wf.claimed_class(Ordinal.kappa(a + 1, 0))[1]


@pytest.mark.parametrize("alpha", MENU + ["k+3", "k*2+1"])
def test_template_class_matches_claim(alpha):
    pol, level = wf.claimed_class(alpha)
    assert wf.template_class(O(alpha)) == (pol, int(str(level)))


@pytest.mark.parametrize("alpha", MENU)
def test_three_way_agreement(alpha):
    code = wf.build_wf_code(alpha, GRID)
    space = wf.grid_space(GRID, set(code.labels.values()))
    inside = bc.interpret(code, space)
    for s in SETS:
        rec = wf.recursion_membership(s, alpha, depth=2, branching=2)
        assert (GRID.point_id(s) in inside) == rec
        if wf.is_prefix_closed(s):
            assert wf.wf_membership(s, alpha) == rec


def test_code_for_rank_one_is_childless_roots():
    code = wf.build_wf_code("1", GRID)
    inside = bc.interpret(code, wf.grid_space(GRID, set(code.labels.values())))
    # the recursion only looks at the root and its children
    expect = {GRID.point_id(s) for s in SETS if not s & {(0,), (1,)} and (() in s or not s)}
    assert inside == expect


def test_bounded_rank_code_is_pi_one():
    assert bc.code_class(wf.build_wf_code("3", GRID)) == ("Pi", 1)


def test_eta_outside_grid_is_rejected():
    with pytest.raises(ValueError):
        wf.build_wf_code("2", GRID, (0, 0, 0))
    with pytest.raises(ValueError):
        wf.build_wf_code("2", GRID, (2,))


@pytest.mark.parametrize("lo,hi", [("1", "2"), ("2", "3"), ("3", "k"), ("k", "k+1"), ("k+1", "k*2")])
def test_classes_grow_with_alpha(lo, hi):
    for s in TREES:
        if wf.wf_membership(s, lo):
            assert wf.wf_membership(s, hi)
