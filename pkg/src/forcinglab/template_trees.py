"""Lazy navigation of the template trees ``T_alpha``.

A node is a tuple of child indices. Its rank is computed symbolically by
descending from ``alpha``: a successor ``g+1`` passes ``g`` to every child,
a limit ``d`` has exactly ``limit_width`` children of rank ``d[i] + 4``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .ordinals import Cof, Ordinal, as_ordinal

Address = tuple[int, ...]


class NotInTree(KeyError):
    pass


class LeafError(ValueError):
    pass


def parse_address(text: str) -> Address:
    src = re.sub(r"\s+", "", text)
    if not (src.startswith("[") and src.endswith("]")):
        raise ValueError(f"address must look like [i0,i1,...], got {text!r}")
    body = src[1:-1]
    if not body:
        return ()
    try:
        out = tuple(int(x) for x in body.split(","))
    except ValueError:
        raise ValueError(f"address entries must be naturals: {text!r}") from None
    if any(i < 0 for i in out):
        raise ValueError(f"address entries must be naturals: {text!r}")
    return out


def format_address(addr: Iterable[int]) -> str:
    return "[" + ",".join(str(i) for i in addr) + "]"


def pred(addr: Address) -> Optional[Address]:
    return addr[:-1] if addr else None


@dataclass(frozen=True)
class TemplateTree:
    alpha: Ordinal
    limit_width: int = 2
    _ranks: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_ordinal(self.alpha))
        if self.limit_width < 2:
            raise ValueError("limit_width must be at least 2")

    _SPEC = re.compile(r"^Talpha\((.+?)(?:,c=(\d+))?\)$")

    @classmethod
    def parse(cls, text: str) -> "TemplateTree":
        m = cls._SPEC.match(re.sub(r"\s+", "", text))
        if not m:
            raise ValueError(f"tree spec must look like Talpha(<ordinal>, c=<n>), got {text!r}")
        return cls(Ordinal.parse(m.group(1)), int(m.group(2) or 2))

    def __str__(self) -> str:
        return f"Talpha({self.alpha}, c={self.limit_width})"

    def rank(self, addr: Address) -> Optional[Ordinal]:
        """Symbolic rank of ``addr``, or ``None`` when it is not a node."""
        addr = tuple(addr)
        hit = self._ranks.get(addr, False)
        if hit is not False:
            return hit
        if not addr:
            out = self.alpha
        else:
            up = self.rank(addr[:-1])
            out = None if up is None else self._child_rank(up, addr[-1])
        self._ranks[addr] = out
        return out

    def _child_rank(self, parent: Ordinal, i: int) -> Optional[Ordinal]:
        kind = parent.cof()
        if kind is Cof.ZERO or i < 0:
            return None
        if kind is Cof.SUCCESSOR:
            return parent.predecessor()
        if i >= self.limit_width:
            return None
        return parent.fundamental(i) + 4

    def contains(self, addr: Address) -> bool:
        return self.rank(addr) is not None

    def _rank_or_raise(self, addr: Address) -> Ordinal:
        r = self.rank(addr)
        if r is None:
            raise NotInTree(format_address(addr))
        return r

    def is_leaf(self, addr: Address) -> bool:
        return self._rank_or_raise(addr).is_zero()

    def is_small_limit(self, addr: Address) -> bool:
        return self._rank_or_raise(addr).cof() is Cof.SMALL_LIMIT

    def is_limit_node(self, addr: Address) -> bool:
        return self._rank_or_raise(addr).is_limit()

    def child_indices(self, addr: Address, window: int) -> range:
        r = self._rank_or_raise(addr)
        if r.is_zero():
            raise LeafError(f"{format_address(addr)} is a leaf")
        if r.is_successor():
            return range(window)
        return range(self.limit_width)

    def children(self, addr: Address, window: int) -> list[Address]:
        addr = tuple(addr)
        return [addr + (i,) for i in self.child_indices(addr, window)]

    def descendants(self, addr: Address, depth: int, window: int) -> Iterator[Address]:
        """Nodes exactly ``depth`` levels below ``addr`` within the window."""
        frontier = [tuple(addr)]
        for _ in range(depth):
            frontier = [c for a in frontier if not self.is_leaf(a) for c in self.children(a, window)]
        return iter(frontier)

    def nodes(self, depth: int, window: int) -> Iterator[Address]:
        """Breadth-first enumeration of nodes up to ``depth`` within the window."""
        frontier: list[Address] = [()]
        for _ in range(depth + 1):
            yield from frontier
            frontier = [c for a in frontier if not self.is_leaf(a) for c in self.children(a, window)]

    def neighborhood(self, addr: Address, window: int) -> list[set]:
        addr = tuple(addr)
        up = pred(addr)
        return [
            {up} if up is not None else set(),
            {addr},
            set(self.descendants(addr, 1, window)),
            set(self.descendants(addr, 2, window)),
            set(self.descendants(addr, 3, window)),
        ]

    def neighborhood_disjointness_check(self, a1: Address, a2: Address, window: int = 3) -> bool:
        """Do the local neighbourhoods of two small-limit nodes stay apart?

        Compares pred, the node, and one to three levels of successors of
        each node, plus the leaves, allowing only a shared predecessor.
        """
        a1, a2 = tuple(a1), tuple(a2)
        if a1 == a2:
            raise ValueError("the two addresses must differ")
        for a in (a1, a2):
            if not self.is_small_limit(a):
                raise ValueError(f"{format_address(a)} is not a small-limit node")
        sets = self.neighborhood(a1, window) + self.neighborhood(a2, window)
        for s in sets:
            if any(self.is_leaf(n) for n in s):
                return False
        for i in range(len(sets)):
            for j in range(i + 1, len(sets)):
                if (i, j) == (0, 5):
                    continue
                if sets[i] & sets[j]:
                    return False
        return True


def node_rank(t: TemplateTree, addr: Address) -> Optional[Ordinal]:
    return t.rank(addr)


def is_leaf(t: TemplateTree, addr: Address) -> bool:
    return t.is_leaf(addr)


def is_small_limit_node(t: TemplateTree, addr: Address) -> bool:
    return t.is_small_limit(addr)


def children(t: TemplateTree, addr: Address, window: int) -> list[Address]:
    return t.children(addr, window)


def neighborhood_disjointness_check(t: TemplateTree, a1: Address, a2: Address, window: int = 3) -> bool:
    return t.neighborhood_disjointness_check(a1, a2, window)
