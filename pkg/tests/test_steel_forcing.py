import itertools

import pytest
from hypothesis import given, settings, strategies as st

from forcinglab import steel_forcing as sf
from forcinglab.ordinals import Ordinal
from forcinglab.steel_forcing import SteelCondition
from forcinglab.verification import STEEL_ALPHA, STEEL_MENU, steel_betas, steel_rank_campaign

O = Ordinal.parse
ALPHA = O(STEEL_ALPHA)


def S(rho=None, rho_bar=None):
    conv = lambda m: {k: v if isinstance(v, Ordinal) else O(str(v)) for k, v in (m or {}).items()}
    return SteelCondition.make(conv(rho), conv(rho_bar))


def test_validate_examples():
    p = S({(): 0})
    assert sf.steel_is_valid(ALPHA, p) and sf.steel_is_strict(p)
    assert sf.steel_validate(ALPHA, S({(): 1, (0,): 2}))
    assert sf.steel_is_valid(ALPHA, S({(0,): 2}, {(): 3}))
    assert sf.steel_validate(ALPHA, S({(): 3}, {(0,): 1}))
    assert sf.steel_validate(ALPHA, S({(): O("w*2")}))


def test_readings_differ_on_firm_child_above_promise():
    p = S({(0,): 4}, {(): 3})
    assert not sf.steel_is_valid(ALPHA, p, "structural")
    assert sf.steel_is_valid(ALPHA, p, "literal")
    with pytest.raises(ValueError):
        sf.steel_validate(ALPHA, p, "other")


def test_leq_examples():
    p = S({(0,): 1}, {(): 3})
    assert sf.steel_leq(p, p)
    assert sf.steel_leq(S({(0,): 1, (): 5}), p)
    assert not sf.steel_leq(S({(0,): 1, (): 2}), p)
    assert sf.steel_leq(S({(0,): 1}, {(): 4}), p)
    assert not sf.steel_leq(S({(0,): 2}, {(): 3}), p)


def test_crank_examples():
    assert sf.steel_crank(S({(): 5})) == Ordinal.nat(5)
    assert sf.steel_crank(S({(): 0})) == Ordinal()
    assert sf.steel_crank(S({(0,): 1}, {(): "w"})) == O("w")
    overlap = SteelCondition.from_json({"t": ["[]", "[0]"], "rho": {"[]": "2"}, "rho_bar": {"[]": "1", "[0]": "0"}})
    assert any("both firm and promised" in v for v in sf.steel_validate(ALPHA, overlap))


def test_retag_examples():
    p = S({(): 5, (0,): 2})
    assert sf.retag(p, 3) == S({(0,): 2}, {(): 3})
    assert sf.retag(p, sf.steel_crank(p) + 1) == p
    chain = S({(): 3, (0,): 2, (0, 0): 1})
    assert sf.retag(chain, 0) == S(rho_bar={(0, 0): 0, (0,): 1, (): 2})


def test_merge_examples():
    p = S({(0,): 1}, {(): 3})
    w, why = sf.steel_merge_witness(ALPHA, p, p)
    assert why is None and w == sf.firm_closure(p) == S({(): 3, (0,): 1})
    a, b = S({(): 4, (0,): 1}), S({(): 4, (1,): 2})
    w, _ = sf.steel_merge_witness(ALPHA, a, b)
    assert w == S({(): 4, (0,): 1, (1,): 2})
    w, why = sf.steel_merge_witness(ALPHA, S({(): 3}), S({(): 5}))
    assert w is None and why


def test_refined_threshold_examples():
    p = S({(): 9, (0,): 2})
    b2, q = sf.refined_threshold(p, 3, 4)
    assert b2 == Ordinal.nat(3) and q == S({(0,): 2}, {(): 3})
    small = S({(): 2, (0,): 1})
    b2, q = sf.refined_threshold(small, 5, 3)
    assert b2 == sf.steel_crank(small) + 1 and q == small
    b2, _ = sf.refined_threshold(S({(): "w"}), 0, 3)
    assert b2 == Ordinal.nat(1)


def test_refined_threshold_can_fall_below_beta():
    # the displayed formula gives beta' = 1 < beta = 2 here, and then the
    # low-rank witness below is compatible with q but not with p
    p = S({(): "w"})
    b2, q = sf.refined_threshold(p, 2, 3)
    assert b2 == Ordinal.nat(1) and q == S(rho_bar={(): 1})
    r = S({(): 1})
    assert sf.steel_compatible(ALPHA, r, q) and not sf.steel_compatible(ALPHA, r, p)
    b2, q = sf.refined_threshold(p, 2, 3, at_least_beta=True)
    assert b2 == Ordinal.nat(2) and not sf.steel_compatible(ALPHA, r, q)


CONDS = list(sf.enumerate_conditions(ALPHA, STEEL_MENU, 3, 2))
BETAS = steel_betas(STEEL_MENU)
conds = st.sampled_from(CONDS)
betas = st.sampled_from(BETAS)


def test_fragment_size():
    assert len(CONDS) == 697


def _brute_compatible(p, q):
    """Some strict tagging of the union tree with menu tags lies below both."""
    t = sorted(p.tree | q.tree)
    menu = sorted({O(m) for m in STEEL_MENU} | {O("w+1"), O("w+2"), O("w+3")})
    for tags in itertools.product(menu, repeat=len(t)):
        w = SteelCondition.make(dict(zip(t, tags)))
        if sf.steel_is_valid(ALPHA, w) and sf.steel_leq(w, p) and sf.steel_leq(w, q):
            return True
    return False


@given(conds, conds)
@settings(max_examples=150, deadline=None)
def test_compatibility_matches_brute_force(p, q):
    assert sf.steel_compatible(ALPHA, p, q) == _brute_compatible(p, q)


@given(conds, betas)
def test_retag_is_a_weakening_and_idempotent(p, beta):
    q = sf.retag(p, beta)
    assert sf.steel_is_valid(ALPHA, q)
    assert sf.steel_leq(p, q)
    assert sf.retag(q, beta) == q


@given(conds, betas, betas)
def test_retag_is_monotone(p, b1, b2):
    lo, hi = sorted([b1, b2])
    assert sf.steel_leq(sf.retag(p, hi), sf.retag(p, lo))


@given(conds, betas)
def test_retag_rank_bound(p, beta):
    assert sf.steel_crank(sf.retag(p, beta)) <= beta + p.height() or sf.steel_crank(sf.retag(p, beta)) < beta


@given(conds, conds)
def test_merge_soundness(p, r):
    w, why = sf.steel_merge_witness(ALPHA, p, r)
    if w is not None:
        assert why is None
        assert sf.steel_leq(w, p) and sf.steel_leq(w, r) and sf.steel_is_strict(w)
        assert sf.steel_compatible(ALPHA, p, r)


STRICT = [c for c in CONDS if c.is_strict()]


@given(st.lists(st.sampled_from(STRICT), min_size=1, max_size=4))
def test_strict_chains_have_strict_unions(items):
    chain = []
    for c in items:
        if not chain or sf.steel_leq(c, chain[-1]):
            chain.append(c)
    u = sf.strict_chain_union(chain)
    assert sf.steel_is_valid(ALPHA, u) and sf.steel_is_strict(u)
    assert all(sf.steel_leq(u, c) for c in chain)


def test_retag_above_every_tag_is_identity():
    for p in CONDS:
        assert sf.retag(p, sf.steel_crank(p) + 1) == p


def test_dropping_the_floor_breaks_the_rank_property_on_a_small_fragment():
    menu = ("0", "1", "2", "w")
    good = steel_rank_campaign(menu=menu, size=2, width=1)
    bad = steel_rank_campaign(menu=menu, size=2, width=1, floor=False)
    assert good.verdict == "PASS"
    assert bad.verdict == "FAIL"


def test_refined_threshold_holds_once_it_is_at_least_beta():
    from forcinglab.verification import refined_campaign

    rep = refined_campaign(at_least_beta=True)
    assert rep.verdict == "PASS", rep.counterexamples[:2]
