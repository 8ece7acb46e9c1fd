"""Conditions of the alpha-forcing: leaf labels ``f`` plus node/point promises ``R``.

Conditions are immutable. Validity is checked clause by clause so that a
report can name each offending (node, point).
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .borel_codes import FiniteSpace
from .ordinals import Ordinal, as_ordinal
from .template_trees import Address, TemplateTree, format_address, parse_address

DEFAULT_HARD_CAP = 200_000


def hard_cap() -> int:
    return int(os.environ.get("LAB_HARD_CAP", DEFAULT_HARD_CAP))


class StrengtheningError(RuntimeError):
    """A density step could not be carried out; this indicates a bug."""


class SpaceResolutionError(StrengtheningError):
    """No subbasic label isolates the point from the conflicting points."""


class SizeOverflow(StrengtheningError):
    pass


@dataclass(frozen=True)
class ForcingParams:
    alpha: Ordinal
    space: FiniteSpace
    A: frozenset = frozenset()
    B: frozenset = frozenset()
    limit_width: int = 2
    size_cap: int = 2
    width: int = 3
    tree: TemplateTree = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_ordinal(self.alpha))
        object.__setattr__(self, "A", frozenset(self.A))
        object.__setattr__(self, "B", frozenset(self.B))
        object.__setattr__(self, "tree", TemplateTree(self.alpha, self.limit_width))
        if self.A & self.B:
            raise ValueError(f"A and B must be disjoint, both contain {sorted(self.A & self.B)}")
        if not (self.A | self.B) <= self.space.universe:
            raise ValueError("A and B must be subsets of the space")
        if not self.alpha > 1:
            raise ValueError("alpha must exceed 1")
        if not self.size_cap < self.width:
            raise ValueError("size cap must be strictly below the width")


@dataclass(frozen=True)
class AlphaCondition:
    f: frozenset = frozenset()  # pairs (leaf address, label)
    R: frozenset = frozenset()  # pairs (nonleaf address, point)

    @classmethod
    def make(cls, f: Optional[dict] = None, R: Iterable = ()) -> "AlphaCondition":
        return cls(frozenset((tuple(a), lab) for a, lab in (f or {}).items()), frozenset((tuple(a), x) for a, x in R))

    @property
    def f_map(self) -> dict:
        return dict(self.f)

    def size(self) -> int:
        return len(self.f) + len(self.R)

    def __le__(self, other: "AlphaCondition") -> bool:
        return other.f <= self.f and other.R <= self.R

    def __or__(self, other: "AlphaCondition") -> "AlphaCondition":
        return AlphaCondition(self.f | other.f, self.R | other.R)

    def add(self, f: Iterable = (), R: Iterable = ()) -> "AlphaCondition":
        return AlphaCondition(self.f | frozenset(f), self.R | frozenset(R))

    def nodes_for(self, x) -> set:
        return {a for a, y in self.R if y == x}

    def touched(self) -> set:
        return {a for a, _ in self.f} | {a for a, _ in self.R}

    def to_json(self) -> dict:
        return {
            "f": {format_address(a): lab for a, lab in sorted(self.f)},
            "R": [[format_address(a), x] for a, x in sorted(self.R, key=lambda e: (e[0], str(e[1])))],
        }

    @classmethod
    def from_json(cls, data: dict) -> "AlphaCondition":
        f = data.get("f", {})
        if not isinstance(f, dict):
            raise ValueError("condition.f: expected an object mapping addresses to labels")
        R = data.get("R", [])
        pairs = []
        for i, item in enumerate(R):
            if not (isinstance(item, list) and len(item) == 2):
                raise ValueError(f"condition.R[{i}]: expected [address, point]")
            pairs.append((parse_address(item[0]), item[1]))
        return cls(frozenset((parse_address(a), lab) for a, lab in f.items()), frozenset(pairs))

    def __repr__(self) -> str:
        return f"AlphaCondition({self.to_json()})"


ONE = AlphaCondition()


@dataclass(frozen=True)
class Violation:
    clause: str
    node: Optional[Address] = None
    point: Optional[object] = None
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "clause": self.clause,
            "node": None if self.node is None else format_address(self.node),
            "point": self.point,
            "detail": self.detail,
        }


def _index(p: AlphaCondition) -> dict:
    by_point: dict = {}
    for a, x in p.R:
        by_point.setdefault(x, set()).add(a)
    return by_point


def bullet_two(params: ForcingParams, p: AlphaCondition, eta: Address, x, nodes: Optional[set] = None) -> bool:
    nodes = p.nodes_for(x) if nodes is None else nodes
    if eta and eta[:-1] in nodes:
        return True
    return (len(eta) == 1 and x in params.A) or (not eta and x in params.B)


def has_grandchild_pair(eta: Address, nodes: set, child: Optional[Address] = None) -> bool:
    n = len(eta)
    base = eta if child is None else child
    depth = n + 2 if child is None else len(child) + 1
    return any(len(a) == depth and a[: len(base)] == base for a in nodes)


def is_x_critical(params: ForcingParams, p: AlphaCondition, eta: Address, x, nodes: Optional[set] = None) -> bool:
    eta = tuple(eta)
    t = params.tree
    if not t.contains(eta) or not t.is_small_limit(eta):
        return False
    nodes = p.nodes_for(x) if nodes is None else nodes
    return bullet_two(params, p, eta, x, nodes) and has_grandchild_pair(eta, nodes)


def critical_nodes(params: ForcingParams, p: AlphaCondition) -> list[tuple[Address, object]]:
    out = set()
    for x, nodes in _index(p).items():
        for a in nodes:
            if len(a) >= 2 and is_x_critical(params, p, a[:-2], x, nodes):
                out.add((a[:-2], x))
    return sorted(out, key=lambda e: (e[0], str(e[1])))


def violations(params: ForcingParams, p: AlphaCondition, cap: Optional[int] = None) -> list[Violation]:
    t = params.tree
    space = params.space
    cap = params.size_cap if cap is None else cap
    out: list[Violation] = []
    seen_f: dict = {}
    for a, lab in sorted(p.f):
        r = t.rank(a)
        if r is None:
            out.append(Violation("structure", a, None, "f names a node outside the template tree"))
        elif not r.is_zero():
            out.append(Violation("a", a, None, "f defined on a non-leaf"))
        if lab not in space.subbasics:
            out.append(Violation("structure", a, None, f"unknown label {lab!r}"))
        if a in seen_f:
            out.append(Violation("a", a, None, f"f not a function: {seen_f[a]!r} vs {lab!r}"))
        seen_f.setdefault(a, lab)
    if len(seen_f) > cap:
        out.append(Violation("a", None, None, f"|f| = {len(seen_f)} exceeds cap {cap}"))
    if len(p.R) > cap:
        out.append(Violation("b", None, None, f"|R| = {len(p.R)} exceeds cap {cap}"))
    for a, x in sorted(p.R, key=lambda e: (e[0], str(e[1]))):
        r = t.rank(a)
        if r is None:
            out.append(Violation("structure", a, x, "R names a node outside the template tree"))
        elif r.is_zero():
            out.append(Violation("b", a, x, "R pair at a leaf"))
        if x not in space.universe:
            out.append(Violation("structure", a, x, "unknown point"))
    if any(v.clause == "structure" for v in out):
        return out
    by_point = _index(p)
    for a, x in sorted(p.R, key=lambda e: (e[0], str(e[1]))):
        if a and a[:-1] in by_point[x]:
            out.append(Violation("c", a[:-1], x, f"child {format_address(a)} also promised"))
        if not a and x in params.B:
            out.append(Violation("d", a, x, "root promise for a point of B"))
        if len(a) == 1 and x in params.A:
            out.append(Violation("e", a, x, "promise below the root for a point of A"))
    for a, lab in sorted(p.f):
        if not a:
            continue
        for x in sorted(space.basic(lab), key=str):
            if a[:-1] in by_point.get(x, ()):
                out.append(Violation("c", a[:-1], x, f"leaf {format_address(a)} labeled {lab!r} contains the point"))
    for eta, x in critical_nodes(params, p):
        nodes = by_point[x]
        if not any(not has_grandchild_pair(eta, nodes, child) for child in t.children(eta, 0)):
            out.append(Violation("f", eta, x, "every child carries a grandchild promise"))
    return out


def validate(params: ForcingParams, p: AlphaCondition, cap: Optional[int] = None) -> list[Violation]:
    """Empty list when ``p`` is a condition."""
    return violations(params, p, cap)


def is_valid(params: ForcingParams, p: AlphaCondition, cap: Optional[int] = None) -> bool:
    return not violations(params, p, cap)


def is_strict(params: ForcingParams, p: AlphaCondition) -> bool:
    for eta, x in critical_nodes(params, p):
        nodes = p.nodes_for(x)
        if not any(c in nodes for c in params.tree.children(eta, 0)):
            return False
    return True


def union_glb(params: ForcingParams, p: AlphaCondition, q: AlphaCondition, checked: bool = False) -> Optional[AlphaCondition]:
    """The union when it is a condition (then it is the glb), else ``None``."""
    for name, c in (("p", p), ("q", q)):
        if not checked and violations(params, c):
            raise ValueError(f"{name} is not a valid condition")
    u = p | q
    return u if is_valid(params, u, 2 * params.size_cap) else None


def compatible(params: ForcingParams, p: AlphaCondition, q: AlphaCondition, cap: Optional[int] = None) -> bool:
    return is_valid(params, p | q, 2 * params.size_cap if cap is None else cap)


def in_D(params: ForcingParams, p: AlphaCondition, eta: Address, x) -> bool:
    eta = tuple(eta)
    if (eta, x) in p.R:
        return True
    if params.tree.rank(eta) == Ordinal.nat(1):
        fm = p.f_map
        return any(
            c in fm and x in params.space.basic(fm[c])
            for c in {a for a in fm if len(a) == len(eta) + 1 and a[:-1] == eta}
        )
    return any(len(a) == len(eta) + 1 and a[:-1] == eta for a in p.nodes_for(x))


def fresh_child(params: ForcingParams, p: AlphaCondition, eta: Address) -> Address:
    """A child of ``eta`` with nothing at or beyond it; index one past the largest used."""
    n = len(eta)
    used = [a[n] for a in p.touched() if len(a) > n and a[:n] == eta]
    idx = max(used) + 1 if used else 0
    t = params.tree
    if not t.rank(eta).is_successor() and idx >= t.limit_width:
        free = [i for i in range(t.limit_width) if i not in used]
        if not free:
            raise StrengtheningError(f"no untouched child below limit node {format_address(eta)}")
        idx = free[0]
    return eta + (idx,)


def make_strict_at(params: ForcingParams, p: AlphaCondition, eta: Address, x) -> AlphaCondition:
    """Give an x-critical ``eta`` a child promise, choosing the lowest admissible child."""
    nodes = p.nodes_for(x)
    if not is_x_critical(params, p, eta, x, nodes):
        return p
    kids = params.tree.children(eta, 0)
    if any(c in nodes for c in kids):
        return p
    for c in kids:
        if not has_grandchild_pair(eta, nodes, c):
            return p.add(R=[(c, x)])
    raise StrengtheningError(f"criticality violated at {format_address(eta)} for {x!r}")


def make_strict(params: ForcingParams, p: AlphaCondition) -> AlphaCondition:
    while True:
        todo = [
            (eta, x)
            for eta, x in critical_nodes(params, p)
            if not any(c in p.nodes_for(x) for c in params.tree.children(eta, 0))
        ]
        if not todo:
            return p
        eta, x = todo[0]
        p = make_strict_at(params, p, eta, x)


def _least_label(params: ForcingParams, p: AlphaCondition, eta: Address, x) -> str:
    blocked = {y for a, y in p.R if a == eta}
    for lab in sorted(params.space.subbasics):
        s = params.space.basic(lab)
        if x in s and not (s & blocked):
            return lab
    raise SpaceResolutionError(f"no subbasic label isolates {x!r} from {sorted(blocked, key=str)}")


def _parent_is_small_limit(t: TemplateTree, eta: Address) -> bool:
    return bool(eta) and t.is_small_limit(eta[:-1])


def _strengthen(params: ForcingParams, p: AlphaCondition, eta: Address, x) -> AlphaCondition:
    t = params.tree
    if in_D(params, p, eta, x):
        return p
    if not eta and x in params.A:
        return p.add(R=[(eta, x)])
    if t.is_small_limit(eta):
        p = make_strict_at(params, p, eta, x)
        if in_D(params, p, eta, x):
            return p
        # not critical here: either take a child or promise the node itself
        if bullet_two(params, p, eta, x):
            return p.add(R=[(t.children(eta, 0)[0], x)])
        return p.add(R=[(eta, x)])
    if _parent_is_small_limit(t, eta):
        p = _strengthen(params, p, eta[:-1], x)
        if in_D(params, p, eta, x):
            return p
        return p.add(R=[(fresh_child(params, p, eta), x)])
    nu = fresh_child(params, p, eta)
    if t.rank(eta) == Ordinal.nat(1):
        return p.add(f=[(nu, _least_label(params, p, eta, x))])
    return p.add(R=[(nu, x)])


def strengthen_into_D(params: ForcingParams, p: AlphaCondition, eta: Address, x, cap: Optional[int] = None) -> AlphaCondition:
    eta = tuple(eta)
    t = params.tree
    if not t.contains(eta) or t.is_leaf(eta):
        raise ValueError(f"{format_address(eta)} is not a nonleaf node")
    if x not in params.space.universe:
        raise ValueError(f"unknown point {x!r}")
    if violations(params, p):
        raise ValueError("input is not a valid condition")
    out = _strengthen(params, p, eta, x)
    cap = 2 * params.size_cap if cap is None else cap
    bad = violations(params, out, cap)
    if bad:
        if all(v.clause in "ab" and v.node is None for v in bad):
            raise SizeOverflow(f"strengthening exceeds size cap {cap}")
        raise StrengtheningError(f"strengthening produced an invalid condition: {[v.to_json() for v in bad]}")
    if not (out <= p and in_D(params, out, eta, x)):
        raise StrengtheningError("strengthening missed the dense set")
    return out


def crank_single(params: ForcingParams, p: AlphaCondition, H: Iterable = ()) -> Ordinal:
    H = frozenset(H)
    ranks = [params.tree.rank(a) for a, x in p.R if x not in H]
    return max(ranks, default=Ordinal())


def prepare_for_reduct(params: ForcingParams, p: AlphaCondition, beta: Ordinal) -> AlphaCondition:
    """Add a grandchild promise below each low-rank child of a promised high limit node."""
    t = params.tree
    for eta, x in sorted(p.R, key=lambda e: (e[0], str(e[1]))):
        r = t.rank(eta)
        if not (r.is_limit() and r > beta):
            continue
        for nu in t.children(eta, 0):
            if not t.rank(nu) < beta:
                continue
            if any(len(a) == len(nu) + 1 and a[:-1] == nu for a in p.nodes_for(x)):
                continue
            p = p.add(R=[(fresh_child(params, p, nu), x)])
    return p


def truncate(params: ForcingParams, p: AlphaCondition, beta: Ordinal, H: Iterable) -> AlphaCondition:
    H = frozenset(H)
    t = params.tree
    return AlphaCondition(p.f, frozenset((a, x) for a, x in p.R if x in H or not t.rank(a) > beta))


def rank_reduct_single(
    params: ForcingParams, p: AlphaCondition, beta, H: Iterable = (), prepare: bool = True
) -> tuple[AlphaCondition, AlphaCondition]:
    beta = as_ordinal(beta)
    prepared = prepare_for_reduct(params, p, beta) if prepare else p
    return prepared, truncate(params, prepared, beta, H)


def heart_needs(params: ForcingParams, q: AlphaCondition) -> list[tuple[Address, object]]:
    """Small-limit nodes with a grandchild promise for x but no child promise for x."""
    t = params.tree
    out = set()
    for x, nodes in _index(q).items():
        for a in nodes:
            if len(a) < 2:
                continue
            eta = a[:-2]
            if not t.is_small_limit(eta):
                continue
            if any(c in nodes for c in t.children(eta, 0)):
                continue
            out.add((eta, x))
    return sorted(out, key=lambda e: (e[0], str(e[1])))


def heart_strategy_step(params: ForcingParams, q: AlphaCondition, cap: Optional[int] = None) -> AlphaCondition:
    """Player I's answer to ``q``: strict, and every pending small-limit node settled."""
    cap = cap if cap is not None else 10**9
    r = make_strict(params, q)
    for eta, x in heart_needs(params, q):
        if (eta, x) in r.R or (eta and (eta[:-1], x) in r.R):
            continue
        options = [(eta, x)] + ([(eta[:-1], x)] if eta else [])
        for pair in options:
            cand = make_strict(params, r.add(R=[pair]))
            if is_valid(params, cand, cap):
                r = cand
                break
        else:
            if not any(c in r.nodes_for(x) for c in params.tree.children(eta, 0)):
                raise StrengtheningError(f"strategy cannot settle {format_address(eta)} for {x!r}")
    if violations(params, r, cap):
        raise StrengtheningError("strategy produced an invalid condition")
    return r


def surrogate_compatible(params: ForcingParams, p: AlphaCondition, q: AlphaCondition) -> bool:
    """Leaf labels agree and the union has no direct successor conflicts."""
    bad = violations(params, p | q, 10**9)
    return not any(v.clause in ("a", "c") for v in bad)


def heart_merge_check(params: ForcingParams, run1: list, run2: list) -> tuple[AlphaCondition, list[Violation]]:
    """Union of all Player I moves of both runs with its violations (empty means valid)."""
    t = ONE
    for move in list(run1) + list(run2):
        t = t | move
    return t, violations(params, t, 10**9)
