"""Exhaustive checks of density, glb, rank and strategy properties on fragments."""
from __future__ import annotations

import functools
import itertools
from typing import Iterable, Optional, Sequence

from . import alpha_forcing as af
from .alpha_forcing import AlphaCondition, ForcingParams
from .borel_codes import FiniteSpace
from .fragments import CompiledFragment, Fragment
from .ordinals import Ordinal, as_ordinal
from .report import CampaignReport, Timer, shard_slice

class CampaignTooLarge(RuntimeError):
    pass


def check_cap(n: int) -> None:
    """Refuse enumerations beyond the ceiling set by ``LAB_HARD_CAP``."""
    if n > af.hard_cap():
        raise CampaignTooLarge(f"{n} conditions exceed the enumeration ceiling {af.hard_cap()} (LAB_HARD_CAP)")

UNBOUNDED = 10**9


def fragment_f0() -> Fragment:
    params = ForcingParams(Ordinal.nat(2), FiniteSpace.cylinders(2), size_cap=2, width=3, limit_width=2)
    return Fragment(params, depth=2)


def two_point_space() -> FiniteSpace:
    return FiniteSpace.cylinders(1)


def fragment_f1(B: Optional[Iterable] = None) -> Fragment:
    """alpha = w+1, two points, A = {"0"}; B defaults to the complement of A."""
    space = two_point_space()
    A = frozenset({"0"})
    B = space.universe - A if B is None else frozenset(B)
    params = ForcingParams(Ordinal.parse("w+1"), space, A=A, B=B, size_cap=3, width=4, limit_width=2)
    return Fragment(params, depth=5)


@functools.lru_cache(maxsize=8)
def compiled(frag: Fragment) -> CompiledFragment:
    return CompiledFragment(frag)


def describe(frag: Fragment) -> dict:
    P = frag.params
    return {
        "alpha": str(P.alpha),
        "points": list(P.space.points),
        "A": sorted(P.A),
        "B": sorted(P.B),
        "limit_width": P.limit_width,
        "size_cap": P.size_cap,
        "width": P.width,
        "depth": frag.depth,
        "labels": sorted(P.space.subbasics) if frag.labels is None else list(frag.labels),
    }


def _cj(p: AlphaCondition) -> dict:
    return p.to_json()


def density_campaign(frag: Fragment, cf: Optional[CompiledFragment] = None, reps: Optional[list] = None) -> CampaignReport:
    cf = cf or compiled(frag)
    P = frag.params
    rep = CampaignReport("density", describe(frag))
    with Timer(rep):
        reps = cf.orbit_representatives() if reps is None else reps
        rep.counts["conditions"] = len(reps)
        for m in reps:
            p = cf.to_condition(m)
            for eta in cf.distinguishable_nodes(m):
                if P.tree.is_leaf(eta):
                    continue
                for x in P.space.points:
                    rep.bump("cases")
                    try:
                        out = af.strengthen_into_D(P, p, eta, x)
                    except af.StrengtheningError as exc:
                        rep.add_counterexample({"p": _cj(p), "eta": list(eta), "x": x, "error": str(exc)})
                        continue
                    if out == p:
                        rep.bump("already_in_D")
                    if af.is_x_critical(P, p, eta, x):
                        rep.bump("critical_cases")
    return rep


def forbidden_constellation(P: ForcingParams, x, eta=(0,)) -> AlphaCondition:
    """Predecessor promise plus one grandchild promise under every child of a small-limit node."""
    eta = tuple(eta)
    pairs = [(eta[:-1], x)] + [(c + (0,), x) for c in P.tree.children(eta, 0)]
    return AlphaCondition.make(R=pairs)


def criticality_campaign(frag: Fragment, cf: Optional[CompiledFragment] = None, reps=None) -> CampaignReport:
    P = frag.params
    rep = CampaignReport("criticality", describe(frag))
    with Timer(rep):
        for x in P.space.points:
            p = forbidden_constellation(P, x)
            clauses = sorted({v.clause for v in af.validate(P, p)})
            rep.counts[f"forbidden_rejected_{x}"] = int("f" in clauses or (x in P.B))
            if not clauses:
                rep.add_counterexample({"forbidden_constellation_accepted": _cj(p)})
        sub = density_campaign(frag, cf, reps)
        rep.counts.update({f"density_{k}": v for k, v in sub.counts.items()})
        for item in sub.counterexamples:
            rep.add_counterexample(item)
    return rep


def glb_campaign(frag: Fragment, cf: Optional[CompiledFragment] = None, reps=None) -> CampaignReport:
    """Union validity against lower bounds, over all pairs up to symmetry and locality.

    Pairs are (orbit representative p, any q built from entries that can
    interact with p); entries that cannot interact never change the union's
    validity. An invalid union must stay invalid under every one-entry
    extension inside the doubled size cap, so no common lower bound exists.
    """
    cf = cf or compiled(frag)
    P = frag.params
    s2 = 2 * P.size_cap
    rep = CampaignReport("glb", describe(frag))
    n = len(cf.entries)
    with Timer(rep):
        reps = cf.orbit_representatives() if reps is None else reps
        rep.counts["representatives"] = len(reps)
        for pm in reps:
            p = cf.to_condition(pm)
            for qm in cf.enumerate(pool=cf.conflict_pool(pm) | pm):
                rep.bump("pairs")
                q = cf.to_condition(qm)
                u = pm | qm
                mask_ok = cf.valid(u, s2)
                glb = af.union_glb(P, p, q, checked=True)
                if (glb is not None) != mask_ok:
                    rep.add_counterexample({"p": _cj(p), "q": _cj(q), "issue": "validators disagree"})
                    continue
                if mask_ok:
                    rep.bump("compatible")
                    if not (glb <= p and glb <= q):
                        rep.add_counterexample({"p": _cj(p), "q": _cj(q), "issue": "union is not below both"})
                    continue
                rep.bump("incompatible")
                for i in range(n):
                    if not u >> i & 1 and cf.valid(u | 1 << i, s2):
                        rep.add_counterexample({"p": _cj(p), "q": _cj(q), "issue": "invalid union repaired by an extension"})
                        break
    return rep


def conflict_cores(cf: CompiledFragment, pm: int) -> list[int]:
    """Minimal candidates r that could be incompatible with ``pm``.

    Every violation of a union involves either one entry conflicting with an
    entry of ``pm`` or a criticality pattern touching ``pm``; any incompatible
    r contains such a piece, and pieces inherit compatibility and rank bounds.
    """
    out = set()
    for i in cf.bits(cf.conflict_pool(pm)):
        if cf.valid(1 << i):
            out.add(1 << i)
    for _, _, always, pre, grand, _ in cf.patterns:
        pattern = pre
        for g in grand:
            pattern |= g
        if not pattern & pm:
            continue
        bits = list(cf.bits(pattern & ~pm))
        for k in range(1, min(cf.frag.params.size_cap, len(bits)) + 1):
            for combo in itertools.combinations(bits, k):
                m = sum(1 << i for i in combo)
                if cf.valid(m):
                    out.add(m)
    return sorted(out)


def rank_campaign(
    frag: Fragment,
    betas: Sequence,
    Hs: Optional[Sequence] = None,
    prepare: bool = True,
    mode: str = "cores",
    cf: Optional[CompiledFragment] = None,
    reps=None,
    shard: tuple = (0, 1),
    id: str = "alpha-rank",
) -> CampaignReport:
    cf = cf or compiled(frag)
    P = frag.params
    betas = [as_ordinal(b) for b in betas]
    pts = list(P.space.points)
    if Hs is None:
        Hs = [frozenset()] + [frozenset({x}) for x in pts] + [P.space.universe]
    Hs = [frozenset(h) for h in Hs]
    params = describe(frag) | {
        "betas": [str(b) for b in betas],
        "H": [sorted(h) for h in Hs],
        "prepare": prepare,
        "mode": mode,
    }
    rep = CampaignReport(id, params)
    with Timer(rep):
        if mode == "full":
            ps = cf.enumerate()
            everything = ps
        else:
            ps = cf.orbit_representatives() if reps is None else reps
            everything = None
        check_cap(len(ps))
        ps = shard_slice(ps, shard)
        rep.counts["conditions"] = len(ps)
        for pm in ps:
            p = cf.to_condition(pm)
            rs = everything if mode == "full" else conflict_cores(cf, pm)
            against_p = [r for r in rs if not cf.valid(r | pm, UNBOUNDED)]
            rep.bump("candidates", len(rs))
            for beta in betas:
                for H in Hs:
                    rep.bump("checks")
                    prepared, q = af.rank_reduct_single(P, p, beta, H, prepare=prepare)
                    problems = []
                    if not (prepared <= p and prepared <= q) or af.violations(P, q, UNBOUNDED):
                        problems.append("reduct is not a condition above the preparation")
                    if not af.compatible(P, q, p, UNBOUNDED):
                        problems.append("reduct incompatible with p")
                    if af.crank_single(P, q, H) > beta:
                        problems.append("reduct rank exceeds beta")
                    for rm in against_p:
                        r = cf.to_condition(rm)
                        if not af.crank_single(P, r, H) < beta:
                            continue
                        rep.bump("low_rank_incompatible")
                        if af.compatible(P, r, q, UNBOUNDED):
                            problems.append({"r": _cj(r)})
                            break
                    if problems:
                        rep.add_counterexample(
                            {"p": _cj(p), "beta": str(beta), "H": sorted(H), "q": _cj(q), "problems": problems}
                        )
    return rep


def focus_entries(frag: Fragment, branching: int = 2, depth: int = 3) -> list[tuple]:
    """R-entries on the first ``branching`` children of each node down to ``depth``."""
    P = frag.params
    t = P.tree
    out = []
    for a in t.nodes(depth, branching):
        if not t.is_leaf(a):
            out.extend((a, x) for x in P.space.points)
    return out


def strategy_runs(P: ForcingParams, moves: Sequence[tuple], rounds: int) -> list[tuple]:
    """Runs where Player II adds at most one entry per round and Player I plays the strategy.

    Each run is returned as (Player II additions, Player I moves). The last
    Player II move never reaches Player I, so runs of ``rounds`` rounds are
    fixed by the first ``rounds - 1`` additions.
    """
    runs = []

    def go(first_moves: list, added: list, last_two: AlphaCondition):
        runs.append((tuple(added), tuple(first_moves)))
        if len(first_moves) >= rounds:
            return
        for e in [None] + list(moves):
            second = last_two if e is None else last_two.add(R=[e])
            if e is not None and (e in last_two.R or af.violations(P, second, UNBOUNDED)):
                continue
            nxt = af.heart_strategy_step(P, second)
            go(first_moves + [nxt], added + [e], nxt)

    go([af.ONE], [], af.ONE)
    return runs


def heart_campaign(frag: Fragment, rounds: int = 3, branching: int = 2, depth: int = 3) -> CampaignReport:
    P = frag.params
    params = describe(frag) | {"rounds": rounds, "focus_branching": branching, "focus_depth": depth}
    rep = CampaignReport("heart", params)
    with Timer(rep):
        moves = [e for e in focus_entries(frag, branching, depth) if not af.violations(P, AlphaCondition.make(R=[e]))]
        try:
            runs = strategy_runs(P, moves, rounds)
        except af.StrengtheningError as exc:
            rep.add_counterexample({"strategy_failure": str(exc)})
            return rep
        rep.counts["runs"] = len(runs)
        by_length: dict = {}
        for run in runs:
            by_length.setdefault(len(run[1]), []).append(run)
        pairs = [
            (a, b) for group in by_length.values() for i, a in enumerate(group) for b in group[i:]
        ]
        for (add1, run1), (add2, run2) in pairs:
            rep.bump("pairs")
            if not all(af.surrogate_compatible(P, a, b) for a, b in zip(run1, run2)):
                rep.bump("skipped_by_surrogate")
                continue
            t, bad = af.heart_merge_check(P, run1, run2)
            if bad:
                rep.add_counterexample(
                    {
                        "run1_additions": [None if e is None else [list(e[0]), e[1]] for e in add1],
                        "run2_additions": [None if e is None else [list(e[0]), e[1]] for e in add2],
                        "merge": _cj(t),
                        "violations": [v.to_json() for v in bad],
                    }
                )
            else:
                rep.bump("merged")
    return rep


def ground_stage_f0() -> Fragment:
    return fragment_f0()


def ground_stage_one() -> Fragment:
    """alpha = 3 on two points with A = {"0"}, B = {"1"}."""
    space = two_point_space()
    params = ForcingParams(Ordinal.nat(3), space, A={"0"}, B={"1"}, size_cap=2, width=3, limit_width=2)
    return Fragment(params, depth=3)


def ground_mutation_stages() -> list[Fragment]:
    """alpha_0 = 7 (shallow) followed by the F1 stage, whose alpha is a successor of a small limit."""
    p0 = ForcingParams(Ordinal.nat(7), FiniteSpace.cylinders(2), size_cap=1, width=2, limit_width=2)
    return [Fragment(p0, depth=1), fragment_f1()]


def _locus_family(P: ForcingParams) -> list[frozenset]:
    return [frozenset()] + [frozenset({x}) for x in P.space.points] + [P.space.universe]


def product_conditions(cfs: Sequence[CompiledFragment], reps: Sequence[list]) -> list[tuple[int, ...]]:
    """Masks of good conditions: every single-stage condition, plus all mixes of one-entry coordinates.

    Mixed conditions are capped at one entry per stage so that the total
    size stays within the per-stage size caps.
    """
    out = []
    n = len(cfs)
    for g, rs in enumerate(reps):
        for m in rs:
            if m or g == 0:
                out.append(tuple(m if h == g else 0 for h in range(n)))
    singles = [[m for m in rs if m.bit_count() == 1] for rs in reps]
    if n > 1:
        for combo in itertools.product(*singles):
            out.append(tuple(combo))
    return out


def ground_rank_campaign(
    frags: Sequence[Fragment],
    betas: Sequence,
    Hs: Optional[Sequence] = None,
    prepare: bool = True,
    low_children: bool = True,
    shard: tuple = (0, 1),
    id: str = "ground-rank",
) -> CampaignReport:
    from . import product_iteration as pi

    spec = pi.IterationSpec(tuple(f.params for f in frags))
    cfs = [compiled(f) for f in frags]
    betas = [as_ordinal(b) for b in betas]
    if Hs is None:
        Hs = [pi.GroundLocus(tuple(h)) for h in itertools.product(*(_locus_family(f.params) for f in frags))]
    else:
        Hs = [h if isinstance(h, pi.GroundLocus) else pi.GroundLocus.make(spec, h) for h in Hs]
    params = {
        "stages": [describe(f) for f in frags],
        "betas": [str(b) for b in betas],
        "loci": len(Hs),
        "prepare": prepare,
        "low_children": low_children,
    }
    rep = CampaignReport(id, params)

    def lift(g: int, m: int) -> pi.GoodCondition:
        return pi.GoodCondition.make({g: cfs[g].to_condition(m)})

    with Timer(rep):
        reps = [cf.orbit_representatives() for cf in cfs]
        ps = product_conditions(cfs, reps)
        check_cap(len(ps))
        ps = shard_slice(ps, shard)
        rep.counts["conditions"] = len(ps)
        for masks in ps:
            p = pi.GoodCondition.make({g: cfs[g].to_condition(m) for g, m in enumerate(masks) if m})
            lifted = [(g, lift(g, r)) for g, m in enumerate(masks) if m for r in conflict_cores(cfs[g], m)]
            rs = [r for _, r in lifted]
            rs += [a | b for (g, a), (h, b) in itertools.combinations(lifted, 2) if g != h]
            against_p = [r for r in rs if not pi.compatible_good(spec, r, p, UNBOUNDED)]
            rep.bump("candidates", len(rs))
            for beta in betas:
                for H in Hs:
                    rep.bump("checks")
                    prepared, q = pi.rank_reduct_ground(spec, p, beta, H, prepare=prepare, low_children=low_children)
                    problems = []
                    if not (prepared <= p and prepared <= q) or pi.validate_good(spec, q, UNBOUNDED):
                        problems.append("reduct is not a condition above the preparation")
                    if not pi.compatible_good(spec, q, p, UNBOUNDED):
                        problems.append("reduct incompatible with p")
                    if pi.crank_ground(spec, q, H) > beta:
                        problems.append("reduct rank exceeds beta")
                    for r in against_p:
                        if not pi.crank_ground(spec, r, H) < beta:
                            continue
                        rep.bump("low_rank_incompatible")
                        if pi.compatible_good(spec, r, q, UNBOUNDED):
                            problems.append({"r": r.to_json()})
                            break
                    if problems:
                        rep.add_counterexample(
                            {"p": p.to_json(), "beta": str(beta), "H": H.to_json(), "q": q.to_json(), "problems": problems}
                        )
    return rep


STEEL_MENU = ("0", "1", "2", "3", "4", "w")
STEEL_ALPHA = "w*2"


def steel_betas(menu: Sequence) -> list[Ordinal]:
    vals = sorted({as_ordinal(m) for m in menu})
    extra = {v + 1 for v in vals}
    return sorted(set(vals) | extra)


def steel_rank_campaign(
    menu: Sequence = STEEL_MENU,
    size: int = 3,
    width: int = 2,
    alpha=STEEL_ALPHA,
    reading: str = "structural",
    floor: bool = True,
    shard: tuple = (0, 1),
    id: str = "steel-rank",
) -> CampaignReport:
    from . import steel_forcing as sf

    alpha = as_ordinal(alpha)
    betas = steel_betas(menu)
    params = {
        "alpha": str(alpha),
        "menu": [str(as_ordinal(m)) for m in menu],
        "size_cap": size,
        "width": width,
        "betas": [str(b) for b in betas],
        "reading": reading,
        "floor": floor,
    }
    rep = CampaignReport(id, params)
    with Timer(rep):
        conds = list(sf.enumerate_conditions(alpha, menu, size, width, reading))
        check_cap(len(conds))
        cranks = {c: sf.steel_crank(c) for c in conds}
        low = {beta: [r for r in conds if cranks[r] < beta] for beta in betas}
        mine = shard_slice(conds, shard)
        rep.counts["conditions"] = len(mine)
        if shard[0] == 0:
            rep.counts["low_rank_r"] = sum(len(v) for v in low.values())
        for p in mine:
            if sf.retag(p, cranks[p] + 1) != p:
                rep.add_counterexample({"p": p.to_json(), "issue": "retag at crank+1 changes p"})
            for b1, b2 in itertools.combinations(betas, 2):
                if not sf.steel_leq(sf.retag(p, b2), sf.retag(p, b1)):
                    rep.add_counterexample({"p": p.to_json(), "betas": [str(b1), str(b2)], "issue": "retag not anti-monotone"})
            for beta in betas:
                rep.bump("checks")
                q = sf.retag(p, beta, floor=floor)
                problems: list = []
                bad = sf.steel_violations(alpha, q, reading)
                if bad:
                    problems.append({"retag_invalid": bad})
                if not sf.steel_leq(p, q):
                    problems.append("p is not below its retag")
                if sf.steel_crank(q) > beta + p.height():
                    problems.append("retag rank exceeds beta + height")
                for r in low[beta]:
                    if not sf.steel_compatible(alpha, r, q, reading):
                        continue
                    rep.bump("compatible_with_retag")
                    if not sf.steel_compatible(alpha, r, p, reading):
                        problems.append({"r": r.to_json()})
                        break
                    w, why = sf.steel_merge_witness(alpha, p, r, reading)
                    if w is None:
                        rep.bump("merge_witness_failed")
                        if reading == "structural":
                            problems.append({"r": r.to_json(), "merge": why})
                            break
                if problems:
                    rep.add_counterexample({"p": p.to_json(), "beta": str(beta), "q": q.to_json(), "problems": problems})
    return rep


def refined_campaign(
    menu: Sequence = STEEL_MENU,
    size: int = 3,
    width: int = 2,
    alpha=STEEL_ALPHA,
    reading: str = "structural",
    at_least_beta: bool = False,
    shard: tuple = (0, 1),
    id: str = "steel-refined",
) -> CampaignReport:
    """r = retag(t, beta) compatible with q = retag(p, beta') must be compatible with p."""
    from . import steel_forcing as sf

    alpha = as_ordinal(alpha)
    betas = steel_betas(menu)
    rep = CampaignReport(
        id,
        {
            "alpha": str(alpha),
            "menu": [str(as_ordinal(m)) for m in menu],
            "size_cap": size,
            "width": width,
            "betas": [str(b) for b in betas],
            "reading": reading,
            "height_bound": size,
            "at_least_beta": at_least_beta,
        },
    )
    with Timer(rep):
        conds = list(sf.enumerate_conditions(alpha, menu, size, width, reading))
        check_cap(len(conds))
        retagged = {
            beta: sorted({sf.retag(t, beta) for t in conds}, key=lambda c: (c.rho, c.rho_bar)) for beta in betas
        }
        mine = shard_slice(conds, shard)
        rep.counts["conditions"] = len(mine)
        if shard[0] == 0:
            rep.counts["retagged_r"] = sum(len(v) for v in retagged.values())
        for p in mine:
            for beta in betas:
                rep.bump("checks")
                b2, q = sf.refined_threshold(p, beta, size, at_least_beta)
                for r in retagged[beta]:
                    if sf.steel_compatible(alpha, r, q, reading) and not sf.steel_compatible(alpha, r, p, reading):
                        if b2 < beta:
                            rep.bump("counterexamples_with_beta_prime_below_beta")
                        rep.add_counterexample(
                            {"p": p.to_json(), "beta": str(beta), "beta_prime": str(b2), "r": r.to_json()}
                        )
                        break
    return rep


def steel_reading_divergence(menu: Sequence = STEEL_MENU, size: int = 3, width: int = 2, alpha=STEEL_ALPHA) -> dict:
    """Conditions accepted under one reading of the firm-below-promise rule but not the other."""
    from . import steel_forcing as sf

    a = set(sf.enumerate_conditions(alpha, menu, size, width, "structural"))
    b = set(sf.enumerate_conditions(alpha, menu, size, width, "literal"))
    only_literal = sorted(b - a, key=lambda c: (c.rho, c.rho_bar))
    return {
        "structural_only": len(a - b),
        "literal_only": len(only_literal),
        "literal_only_examples": [c.to_json() for c in only_literal[:3]],
    }


WF_ALPHAS = ("1", "2", "3", "k", "k+1", "k*2")


def wf_oracle_campaign(grid_text: str = "grid(b=2,d=2)", alphas: Sequence = WF_ALPHAS, id: str = "wf-oracle") -> CampaignReport:
    """Direct rank, the level recursion and the compiled code agree on every subset of the grid.

    The direct rank only makes sense on trees, so the three-way comparison
    runs on prefix-closed subsets and the two-way one on all of them.
    """
    from . import wf_complexity as wf
    from .borel_codes import code_class, interpret

    grid = wf.Grid.parse(grid_text)
    alphas = [as_ordinal(a) for a in alphas]
    rep = CampaignReport(id, {"grid": grid_text, "alphas": [str(a) for a in alphas]})
    with Timer(rep):
        space = wf.grid_space(grid)
        sets = list(grid.membership_sets())
        trees = [s for s in sets if wf.is_prefix_closed(s)]
        rep.counts["subsets"] = len(sets)
        rep.counts["trees"] = len(trees)
        classes = {}
        for a in alphas:
            code = wf.build_wf_code(a, grid)
            inside = interpret(code, space)
            for s in sets:
                rec = wf.recursion_membership(s, a, depth=grid.depth, branching=grid.branching)
                via_code = grid.point_id(s) in inside
                rep.bump("checks")
                row = {"alpha": str(a), "set": [list(n) for n in sorted(s)], "recursion": rec, "code": via_code}
                if rec != via_code:
                    rep.add_counterexample(row)
                elif wf.is_prefix_closed(s):
                    rep.bump("three_way_checks")
                    direct = wf.wf_membership(s, a)
                    if direct != rec:
                        rep.add_counterexample({**row, "direct": direct})
            claimed = wf.claimed_class(a)
            claimed = (claimed[0], claimed[1].as_int()) if claimed[1].is_finite else (claimed[0], str(claimed[1]))
            template = wf.template_class(a)
            built = code_class(code)
            classes[str(a)] = {"claimed": list(claimed), "template": list(template), "code": list(built)}
            if not (tuple(claimed) == tuple(template) == tuple(built)):
                rep.add_counterexample({"alpha": str(a), "classes": classes[str(a)]})
        rep.notes.append({"classes": classes})
    return rep


def space_corpus() -> list[tuple[str, FiniteSpace]]:
    """Small spaces: cylinder spaces, and every point-separating subbasis on 3 points plus small ones on 4."""
    out: list[tuple[str, FiniteSpace]] = []
    for n in (1, 2, 3):
        out.append((f"cylinders({n})", FiniteSpace.cylinders(n)))
    out.append(("sierpinski", FiniteSpace(("a", "b"), {"a": frozenset({"a"}), "ab": frozenset({"a", "b"})})))
    for npts, max_family in ((3, None), (4, 3)):
        pts = tuple("abcd"[:npts])
        subsets = [frozenset(c) for r in range(1, npts + 1) for c in itertools.combinations(pts, r)]
        sizes = range(1, (max_family or len(subsets)) + 1)
        for k in sizes:
            for fam in itertools.combinations(subsets, k):
                profiles = {tuple(x in s for s in fam) for x in pts}
                if len(profiles) < npts:
                    continue
                labels = {"".join(sorted(s)): s for s in fam}
                out.append((f"{npts}pt:" + ",".join(labels), FiniteSpace(pts, labels)))
    return out


def code_corpus(labels: Sequence[str], max_nodes: int = 4) -> Iterable:
    """Every code whose tree has at most ``max_nodes`` nodes, leaves labeled from ``labels``."""
    from .borel_codes import BorelCode
    from .steel_forcing import prefix_closed_trees

    for t in prefix_closed_trees(max_nodes, max_nodes - 1):
        # only canonical trees: children indexed 0..k-1
        if any(a and a[-1] > 0 and a[:-1] + (a[-1] - 1,) not in t for a in t):
            continue
        leaves = sorted(a for a in t if not any(len(b) == len(a) + 1 and b[:-1] == a for b in t))
        for assign in itertools.product(labels, repeat=len(leaves)):
            yield BorelCode(t, dict(zip(leaves, assign)))


def _member(code, space: FiniteSpace, x, a=()) -> bool:
    """Pointwise evaluation, independent of the set-valued interpreter."""
    kids = code.children(a)
    if not kids:
        return x in space.basic(code.labels[a])
    return all(not _member(code, space, x, c) for c in kids)


def borel_oracle_campaign(max_nodes: int = 4, id: str = "ord-oracle") -> CampaignReport:
    from .borel_codes import demorgan_holds, exact_level_oracle, interpret, saturation_levels

    rep = CampaignReport(id, {"max_code_nodes": max_nodes})
    with Timer(rep):
        corpus = space_corpus()
        rep.counts["spaces"] = len(corpus)
        for name, space in corpus:
            pts = space.points
            singles = [exact_level_oracle(space, {x}) for x in pts]
            discrete = all(v == 1 for v in singles)
            rep.bump("discrete_spaces" if discrete else "non_discrete_spaces")
            levels = saturation_levels(space)
            for r in range(len(pts) + 1):
                for target in itertools.combinations(pts, r):
                    n = exact_level_oracle(space, target)
                    rep.bump("targets")
                    # the returned level must reach both the set and its complement
                    index = {p: i for i, p in enumerate(pts)}
                    t = sum(1 << index[p] for p in target)
                    full = (1 << len(pts)) - 1
                    fam = levels[n - 1]
                    if t not in fam or (full & ~t) not in fam:
                        rep.add_counterexample({"space": name, "target": list(target), "level": n, "problem": "level not reached"})
                    if discrete and n != 1:
                        rep.add_counterexample({"space": name, "target": list(target), "level": n, "problem": "discrete space above 1"})
                    if max(singles) <= 2 and n > 2:
                        rep.add_counterexample({"space": name, "target": list(target), "level": n, "problem": "above 2"})
                    rep.bump(f"level_{n}")
        code_spaces = [c for c in corpus if c[0] in ("cylinders(2)", "sierpinski")]
        code_spaces.append(("3pt:a,ab,bc", FiniteSpace(("a", "b", "c"), {"a": {"a"}, "ab": {"a", "b"}, "bc": {"b", "c"}})))
        for name, space in code_spaces:
            for code in code_corpus(sorted(space.subbasics), max_nodes):
                rep.bump("codes")
                ok = demorgan_holds(code, space)
                for a in code.nodes:
                    got = interpret(code, space, a)
                    want = frozenset(x for x in space.points if _member(code, space, x, a))
                    ok = ok and got == want
                if not ok:
                    rep.add_counterexample({"space": name, "code": code.to_json(), "problem": "interpretation incoherent"})
    return rep


def _ordinal_vector(o: Ordinal, max_exp: int) -> tuple:
    """Dense coefficient vector, highest tier and exponent first."""
    k = dict(o.kappa_part)
    t = dict(o.tail_part)
    return tuple(k.get(e, 0) for e in range(max_exp, -1, -1)) + tuple(t.get(e, 0) for e in range(max_exp, -1, -1))


def ordinal_laws_campaign(strides: Sequence[int] = (1, 7, 61, 509, 4093, 7919, 10007, 15013), id: str = "ordinal-laws") -> CampaignReport:
    """Order, fundamental-sequence and addition laws on the bounded notation universe.

    Order is compared against dense coefficient vectors: exhaustively for
    pairs and triples on a smaller universe, by sorting on the full one,
    and on the pairs (i, i + stride) of the full one for each stride.
    """
    from .ordinals import bounded_universe

    rep = CampaignReport(id, {"universe": "exp<=3, coeff<=3, kappa coeff<=2", "strides": list(strides)})
    with Timer(rep):
        full = bounded_universe()
        rep.counts["universe"] = len(full)
        vec = {o: _ordinal_vector(o, 3) for o in full}
        if len(set(vec.values())) != len(full):
            rep.add_counterexample({"problem": "distinct notations share a value"})
        # sorting by the library order must agree with the vector order
        by_vec = sorted(full, key=vec.__getitem__)
        for a, b in zip(by_vec, by_vec[1:]):
            rep.bump("adjacent_pairs")
            if not (a < b and not b < a and a != b):
                rep.add_counterexample({"a": str(a), "b": str(b), "problem": "adjacent order"})
        n = len(full)
        for i, step in itertools.product(range(n), strides):
            a, b = full[i], full[(i + step) % n]
            rep.bump("strided_pairs")
            want = (vec[a] > vec[b]) - (vec[a] < vec[b])
            if a.compare(b) != want or [a < b, a == b, b < a].count(True) != 1:
                rep.add_counterexample({"a": str(a), "b": str(b), "problem": "pair order"})
        small = bounded_universe(1, 2, 1)
        for a in small:
            for b in small:
                rep.bump("small_pairs")
                if [a < b, a == b, b < a].count(True) != 1:
                    rep.add_counterexample({"a": str(a), "b": str(b), "problem": "trichotomy"})
                if not a < b:
                    continue
                for c in small:
                    rep.bump("small_triples")
                    if b < c and not a < c:
                        rep.add_counterexample({"a": str(a), "b": str(b), "c": str(c), "problem": "transitivity"})
        for d in full:
            if not d.is_limit():
                continue
            rep.bump("limits")
            seq = [d.fundamental(i) for i in range(16)]
            if any(not x < d for x in seq) or any(not x < y for x, y in zip(seq, seq[1:])):
                rep.add_counterexample({"delta": str(d), "problem": "fundamental sequence"})
        for a, b in zip(by_vec, by_vec[1:]):
            for n in range(5):
                rep.bump("addition_checks")
                if not a + n < b + n:
                    rep.add_counterexample({"a": str(a), "b": str(b), "n": n, "problem": "addition monotone"})
    return rep
