"""Tagged-tree conditions: firm tags ``rho`` and promise tags ``rho_bar`` on a finite tree.

A promise ``rho_bar[n] = b`` says the eventual tag of ``n`` will be at least ``b``.
Two readings of the rule for a firm child below a promised parent are supported:

* ``"structural"``: the child's firm tag is below the parent's promise.
* ``"literal"``: no order is imposed between them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

from .ordinals import Ordinal, as_ordinal
from .template_trees import Address, format_address, parse_address

STRUCTURAL = "structural"
LITERAL = "literal"
READINGS = (STRUCTURAL, LITERAL)


@dataclass(frozen=True)
class SteelCondition:
    rho: tuple = ()  # sorted (address, Ordinal)
    rho_bar: tuple = ()

    @classmethod
    def make(cls, rho: Optional[dict] = None, rho_bar: Optional[dict] = None) -> "SteelCondition":
        def norm(d):
            return tuple(sorted((tuple(a), as_ordinal(v)) for a, v in (d or {}).items()))

        return cls(norm(rho), norm(rho_bar))

    @cached_property
    def firm(self) -> dict:
        return dict(self.rho)

    @cached_property
    def promised(self) -> dict:
        return dict(self.rho_bar)

    @cached_property
    def tree(self) -> frozenset:
        return frozenset(a for a, _ in self.rho) | frozenset(a for a, _ in self.rho_bar)

    def tag(self, a: Address) -> Optional[Ordinal]:
        return self.firm.get(a, self.promised.get(a))

    def tags(self) -> list[Ordinal]:
        return [v for _, v in self.rho] + [v for _, v in self.rho_bar]

    def is_strict(self) -> bool:
        return not self.rho_bar

    def height(self) -> int:
        """Number of levels of the tree."""
        return max((len(a) + 1 for a in self.tree), default=0)

    def to_json(self) -> dict:
        return {
            "t": [format_address(a) for a in sorted(self.tree)],
            "rho": {format_address(a): str(v) for a, v in self.rho},
            "rho_bar": {format_address(a): str(v) for a, v in self.rho_bar},
        }

    @classmethod
    def from_json(cls, data: dict) -> "SteelCondition":
        if not isinstance(data, dict):
            raise ValueError("condition: expected an object")
        rho = {parse_address(a): as_ordinal(v) for a, v in data.get("rho", {}).items()}
        rho_bar = {parse_address(a): as_ordinal(v) for a, v in data.get("rho_bar", {}).items()}
        p = cls.make(rho, rho_bar)
        if "t" in data:
            listed = {parse_address(a) for a in data["t"]}
            if listed != set(p.tree):
                raise ValueError("condition.t: must list exactly the tagged nodes")
        return p

    def __repr__(self) -> str:
        return f"SteelCondition({self.to_json()})"


def _check_reading(reading: str) -> None:
    if reading not in READINGS:
        raise ValueError(f"unknown reading {reading!r}; expected one of {READINGS}")


def steel_violations(
    alpha, p: SteelCondition, reading: str = STRUCTURAL, size_cap: Optional[int] = None
) -> list[str]:
    _check_reading(reading)
    alpha = as_ordinal(alpha)
    firm, prom = p.firm, p.promised
    out = []
    both = set(firm) & set(prom)
    for a in sorted(both):
        out.append(f"{format_address(a)}: both firm and promised")
    t = p.tree
    if () not in t:
        out.append("tree has no root")
    for a in sorted(t):
        if a and a[:-1] not in t:
            out.append(f"{format_address(a)}: parent missing")
        v = p.tag(a)
        if not v < alpha:
            out.append(f"{format_address(a)}: tag {v} not below alpha = {alpha}")
    if size_cap is not None and len(t) > size_cap:
        out.append(f"tree has {len(t)} nodes, cap {size_cap}")
    for nu in sorted(t):
        if not nu or nu[:-1] not in t:
            continue
        eta = nu[:-1]
        where = f"{format_address(eta)} -> {format_address(nu)}"
        if eta in firm and nu in firm:
            if not firm[nu] < firm[eta]:
                out.append(f"{where}: firm tags must decrease")
        elif eta in prom and nu in prom:
            if not prom[nu] < prom[eta]:
                out.append(f"{where}: promises must decrease")
        elif eta in prom and nu in firm:
            if reading == STRUCTURAL and not firm[nu] < prom[eta]:
                out.append(f"{where}: firm child must lie below the parent's promise")
        else:
            out.append(f"{where}: promised child below a firm parent")
    return out


def steel_validate(alpha, p: SteelCondition, reading: str = STRUCTURAL, size_cap: Optional[int] = None) -> list[str]:
    return steel_violations(alpha, p, reading, size_cap)


def steel_is_valid(alpha, p: SteelCondition, reading: str = STRUCTURAL) -> bool:
    return not steel_violations(alpha, p, reading)


def steel_is_strict(p: SteelCondition) -> bool:
    return p.is_strict()


def steel_leq(q: SteelCondition, p: SteelCondition) -> bool:
    """True when ``q`` is stronger than or equal to ``p``."""
    qf, qp = q.firm, q.promised
    if not p.tree <= q.tree:
        return False
    if any(qf.get(a) != v for a, v in p.rho):
        return False
    for a, v in p.rho_bar:
        have = qp.get(a, qf.get(a))
        if have is None or have < v:
            return False
    return True


def steel_crank(p: SteelCondition) -> Ordinal:
    """Supremum of all tags, firm and promised."""
    return max(p.tags(), default=Ordinal())


def retag(p: SteelCondition, beta, floor: bool = True) -> SteelCondition:
    """Keep firm tags below beta; every other node gets a promise, computed from the leaves up.

    With ``floor=False`` the recomputed promises are not raised to beta; this
    exists only as a mutation control.
    """
    beta = as_ordinal(beta)
    firm = {a: v for a, v in p.rho if v < beta}
    old = p.promised
    prom: dict = {}
    t = p.tree
    # deepest first, siblings by index
    for a in sorted(t - set(firm), key=lambda a: (-len(a), a)):
        if a in old and old[a] < beta:
            prom[a] = old[a]
            continue
        kids = [c for c in t if len(c) == len(a) + 1 and c[:-1] == a]
        vals = [(firm[c] if c in firm else prom[c]) + 1 for c in kids]
        top = max(vals, default=Ordinal())
        prom[a] = max(beta, top) if floor else top
    return SteelCondition.make(firm, prom)


def firm_closure(p: SteelCondition) -> SteelCondition:
    """Least strict tagging above ``p``: promises become firm, raised to exceed their children."""
    tags: dict = {}
    for a in sorted(p.tree, key=lambda a: (-len(a), a)):
        kids = [c for c in p.tree if len(c) == len(a) + 1 and c[:-1] == a]
        tags[a] = max([p.tag(a)] + [tags[c] + 1 for c in kids])
    return SteelCondition.make(tags)


def steel_compatible(alpha, p: SteelCondition, q: SteelCondition, reading: str = STRUCTURAL) -> bool:
    """Whether some condition lies below both, decided by the least strict tagging of the union tree.

    Firm nodes only have firm children, so any common extension restricted
    to the union tree dominates this least tagging, and the least tagging
    is itself a common extension when it keeps every firm tag.
    """
    alpha = as_ordinal(alpha)
    pf, qf = p.firm, q.firm
    if any(a in qf and qf[a] != v for a, v in pf.items()):
        return False
    t = p.tree | q.tree
    firm = {**pf, **qf}
    lower: dict = {}
    for src in (p.promised, q.promised):
        for a, v in src.items():
            lower[a] = max(lower.get(a, v), v)
    # children are visited before parents, so each parent sees its final floor
    floor: dict = {}
    for a in sorted(t, key=lambda a: (-len(a), a)):
        need = max(floor.get(a, Ordinal()), lower.get(a, Ordinal()))
        if a in firm:
            if need > firm[a]:
                return False
            need = firm[a]
        if not need < alpha:
            return False
        if a:
            up = a[:-1]
            floor[up] = max(floor.get(up, Ordinal()), need + 1)
    return True


def steel_merge_witness(alpha, p: SteelCondition, r: SteelCondition, reading: str = STRUCTURAL):
    """Pointwise maximum of every defined tag on the union tree.

    Returns ``(witness, None)`` when it is a condition below both, else
    ``(None, reasons)``.
    """
    t = p.tree | r.tree
    tags = {}
    for a in t:
        vals = [c.tag(a) for c in (p, r) if c.tag(a) is not None]
        tags[a] = max(vals)
    w = SteelCondition.make(tags)
    reasons = steel_violations(alpha, w, reading)
    if not steel_leq(w, p):
        reasons.append("witness is not below the first condition")
    if not steel_leq(w, r):
        reasons.append("witness is not below the second condition")
    return (None, reasons) if reasons else (w, None)


def refined_threshold(
    p: SteelCondition, beta, height_bound: int, at_least_beta: bool = False
) -> tuple[Ordinal, SteelCondition]:
    """beta' = (sup of tags below beta + height_bound) + 1, and the retag at beta'.

    ``at_least_beta`` raises beta' to beta when the formula lands below it.
    """
    beta = as_ordinal(beta)
    limit = beta + height_bound
    below = [v for v in p.tags() if v < limit]
    b2 = max(below, default=Ordinal()) + 1
    if at_least_beta:
        b2 = max(b2, beta)
    return b2, retag(p, b2)


def prefix_closed_trees(size: int, width: int) -> list[frozenset]:
    """All trees with at most ``size`` nodes whose child indices are below ``width``."""
    out = {frozenset({()})}
    frontier = [frozenset({()})]
    while frontier:
        nxt = []
        for t in frontier:
            if len(t) >= size:
                continue
            for a in t:
                for i in range(width):
                    c = a + (i,)
                    if c not in t:
                        u = t | {c}
                        if u not in out:
                            out.add(u)
                            nxt.append(u)
        frontier = nxt
    return sorted(out, key=lambda t: (len(t), sorted(t)))


def enumerate_conditions(
    alpha, menu: Sequence, size: int, width: int, reading: str = STRUCTURAL
) -> Iterator[SteelCondition]:
    """Every valid condition on a small tree with tags from ``menu``."""
    alpha = as_ordinal(alpha)
    menu = [as_ordinal(m) for m in menu]
    choices = [(kind, v) for kind in ("firm", "promise") for v in menu]
    for t in prefix_closed_trees(size, width):
        nodes = sorted(t)
        for assign in itertools.product(choices, repeat=len(nodes)):
            rho = {a: v for a, (k, v) in zip(nodes, assign) if k == "firm"}
            rho_bar = {a: v for a, (k, v) in zip(nodes, assign) if k == "promise"}
            p = SteelCondition.make(rho, rho_bar)
            if not steel_violations(alpha, p, reading):
                yield p


def strict_chain_union(chain: Iterable[SteelCondition]) -> SteelCondition:
    tags: dict = {}
    for p in chain:
        tags.update(p.firm)
    return SteelCondition.make(tags)
