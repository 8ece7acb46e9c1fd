"""Finite Borel codes over finite spaces with labeled subbasic sets.

A leaf denotes its labeled subbasic set; an internal node denotes the
intersection of the complements of what its children denote.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .template_trees import Address, format_address, parse_address

SIGMA = "Sigma"
PI = "Pi"


class UnknownLabel(KeyError):
    pass


@dataclass(frozen=True)
class FiniteSpace:
    points: tuple
    subbasics: Mapping[str, frozenset]

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if len(set(pts)) != len(pts):
            raise ValueError("duplicate point ids")
        if not self.subbasics:
            raise ValueError("subbasic family must be nonempty")
        known = set(pts)
        sub = {}
        for label, members in self.subbasics.items():
            members = frozenset(members)
            if not members <= known:
                raise ValueError(f"subbasic {label!r} mentions unknown points {sorted(members - known)}")
            sub[str(label)] = members
        object.__setattr__(self, "subbasics", sub)

    def __hash__(self):
        return hash((self.points, tuple(sorted((k, tuple(sorted(v))) for k, v in self.subbasics.items()))))

    @property
    def universe(self) -> frozenset:
        return frozenset(self.points)

    def basic(self, label: str) -> frozenset:
        try:
            return self.subbasics[label]
        except KeyError:
            raise UnknownLabel(label) from None

    def labels_containing(self, x) -> list[str]:
        return sorted(lab for lab, s in self.subbasics.items() if x in s)

    @classmethod
    def cylinders(cls, length: int, max_label: Optional[int] = None, alphabet: str = "01") -> "FiniteSpace":
        """All strings of ``length`` with every cylinder ``[s]`` for ``|s| <= max_label``."""
        max_label = length if max_label is None else max_label
        pts = ["".join(p) for p in itertools.product(alphabet, repeat=length)]
        sub = {}
        for n in range(max_label + 1):
            for s in itertools.product(alphabet, repeat=n):
                s = "".join(s)
                sub[s] = frozenset(p for p in pts if p.startswith(s))
        return cls(tuple(pts), sub)

    def to_json(self) -> dict:
        return {"points": list(self.points), "subbasics": {k: sorted(v, key=self.points.index) for k, v in self.subbasics.items()}}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteSpace":
        if "points" not in data:
            raise ValueError("space: missing field 'points'")
        if "subbasics" not in data:
            raise ValueError("space: missing field 'subbasics'")
        return cls(tuple(data["points"]), {k: frozenset(v) for k, v in data["subbasics"].items()})


@dataclass(frozen=True)
class BorelCode:
    nodes: frozenset  # prefix-closed set of addresses
    labels: Mapping[Address, str]

    def __post_init__(self):
        nodes = frozenset(tuple(a) for a in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if () not in nodes:
            raise ValueError("code tree must contain the root")
        for a in nodes:
            if a and a[:-1] not in nodes:
                raise ValueError(f"code tree not prefix-closed at {format_address(a)}")
        labels = {tuple(a): str(v) for a, v in self.labels.items()}
        for a in nodes:
            if self.is_leaf(a) and a not in labels:
                raise ValueError(f"leaf {format_address(a)} has no label")
        for a in labels:
            if a not in nodes or not self.is_leaf(a):
                raise ValueError(f"label given for non-leaf {format_address(a)}")
        object.__setattr__(self, "labels", labels)

    def __hash__(self):
        return hash((self.nodes, tuple(sorted(self.labels.items()))))

    def children(self, addr: Address) -> list[Address]:
        addr = tuple(addr)
        return sorted(a for a in self.nodes if len(a) == len(addr) + 1 and a[:-1] == addr)

    def is_leaf(self, addr: Address) -> bool:
        n = len(addr)
        return not any(len(a) == n + 1 and a[:n] == tuple(addr) for a in self.nodes)

    def rank(self, addr: Address = ()) -> int:
        kids = self.children(addr)
        return 0 if not kids else max(self.rank(k) + 1 for k in kids)

    @classmethod
    def leaf(cls, label: str) -> "BorelCode":
        return cls(frozenset({()}), {(): label})

    @classmethod
    def node(cls, *subcodes: "BorelCode") -> "BorelCode":
        """Intersection of the complements of the given subcodes."""
        nodes = {()}
        labels = {}
        for i, sub in enumerate(subcodes):
            nodes |= {(i,) + a for a in sub.nodes}
            labels.update({(i,) + a: v for a, v in sub.labels.items()})
        return cls(frozenset(nodes), labels)

    def to_json(self) -> dict:
        def nest(addr):
            return [nest(c) for c in self.children(addr)]

        return {"tree": nest(()), "leaves": {format_address(a): v for a, v in sorted(self.labels.items())}}

    @classmethod
    def from_json(cls, data: dict) -> "BorelCode":
        if "tree" not in data:
            raise ValueError("code: missing field 'tree'")
        nodes = set()

        def walk(sub, addr):
            if not isinstance(sub, list):
                raise ValueError(f"code.tree at {format_address(addr)}: expected a list of children")
            nodes.add(addr)
            for i, c in enumerate(sub):
                walk(c, addr + (i,))

        walk(data["tree"], ())
        labels = {parse_address(k): v for k, v in data.get("leaves", {}).items()}
        return cls(frozenset(nodes), labels)


def interpret(code: BorelCode, space: FiniteSpace, node: Address = ()) -> frozenset:
    node = tuple(node)
    if node not in code.nodes:
        raise KeyError(f"node {format_address(node)} not in code")
    memo: dict = {}

    def go(a):
        if a in memo:
            return memo[a]
        if code.is_leaf(a):
            out = space.basic(code.labels[a])
        else:
            out = space.universe
            for c in code.children(a):
                out = out & (space.universe - go(c))
        memo[a] = out
        return out

    return go(node)


def code_class(code: BorelCode, node: Address = ()) -> tuple[str, int]:
    """Syntactic (polarity, level) of a code.

    Leaves count as clopen level 0. An internal node intersects complements:
    children of class (Pi, n) contribute n+1, children of class (Sigma, n)
    contribute n. A node with a single internal child is exactly a complement
    and flips the polarity of that child.
    """
    kids = code.children(node)
    if not kids:
        return (PI, 0)
    classes = [code_class(code, k) for k in kids]
    if len(kids) == 1 and kids[0] not in code.labels:
        pol, lvl = classes[0]
        return (SIGMA if pol == PI else PI, lvl)
    level = max(lvl + 1 if pol == PI else lvl for pol, lvl in classes)
    return (PI, max(level, 1))


def _union_closure(family: Iterable[int]) -> set[int]:
    out = {0}
    for m in set(family):
        out |= {s | m for s in out}
    return out


def saturation_levels(space: FiniteSpace, max_levels: int = 16) -> list[set[int]]:
    """Bitmask families for levels 1, 2, ... until the hierarchy stabilises."""
    index = {p: i for i, p in enumerate(space.points)}
    full = (1 << len(space.points)) - 1

    def mask(s):
        return sum(1 << index[p] for p in s)

    subs = [mask(s) for s in space.subbasics.values()]
    inters = {full}
    for m in subs:
        inters |= {s & m for s in inters}
    levels = [_union_closure(inters)]
    while len(levels) < max_levels:
        # levels are cumulative, so the last one already holds everything below
        below = levels[-1]
        nxt = _union_closure(below | {full & ~m for m in below})
        if nxt == levels[-1]:
            break
        levels.append(nxt)
    return levels


def exact_level_oracle(space: FiniteSpace, target: Iterable) -> int:
    target = frozenset(target)
    if not target <= space.universe:
        raise ValueError(f"target mentions unknown points {sorted(target - space.universe)}")
    index = {p: i for i, p in enumerate(space.points)}
    full = (1 << len(space.points)) - 1
    t = sum(1 << index[p] for p in target)
    for n, fam in enumerate(saturation_levels(space), start=1):
        if t in fam and (full & ~t) in fam:
            return n
    raise ValueError("target is not generated by the subbasis (points not separated)")


def demorgan_holds(code: BorelCode, space: FiniteSpace) -> bool:
    """Internal nodes equal the space minus the union of their children."""
    for a in code.nodes:
        kids = code.children(a)
        if not kids:
            continue
        union = frozenset().union(*(interpret(code, space, k) for k in kids))
        if interpret(code, space, a) != space.universe - union:
            return False
    return True


def load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)
