"""Finite fragments of the alpha-forcing and fast exhaustive enumeration.

A fragment fixes a depth cap, an index window at successor nodes and a label
set. Its entries are compiled into bit positions so that validity of a
condition inside the fragment is a handful of mask operations.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .alpha_forcing import AlphaCondition, ForcingParams, hard_cap
from .template_trees import Address


class FragmentTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class Fragment:
    params: ForcingParams
    depth: int
    labels: Optional[tuple] = None

    @property
    def window(self) -> int:
        return self.params.width


class CompiledFragment:
    def __init__(self, frag: Fragment):
        self.frag = frag
        P = frag.params
        t = P.tree
        space = P.space
        labels = sorted(space.subbasics) if frag.labels is None else list(frag.labels)
        nodes = list(t.nodes(frag.depth, frag.window))
        self.nodes = nodes
        entries: list[tuple] = []
        for a in nodes:
            if t.is_leaf(a):
                entries.extend(("f", a, lab) for lab in labels)
            else:
                entries.extend(("R", a, x) for x in space.points)
        self.entries = entries
        self.index = {e: i for i, e in enumerate(entries)}
        n = len(entries)
        self.f_mask = sum(1 << i for i, e in enumerate(entries) if e[0] == "f")
        self.R_mask = sum(1 << i for i, e in enumerate(entries) if e[0] == "R")
        self.unary_bad = 0
        conflicts = [0] * n
        for i, (kind, a, v) in enumerate(entries):
            if kind == "R":
                if not a and v in P.B or len(a) == 1 and v in P.A:
                    self.unary_bad |= 1 << i
                if a:
                    j = self.index.get(("R", a[:-1], v))
                    if j is not None:
                        conflicts[i] |= 1 << j
                        conflicts[j] |= 1 << i
            else:
                for lab in labels:
                    if lab != v:
                        conflicts[i] |= 1 << self.index[("f", a, lab)]
                if a:
                    for x in space.basic(v):
                        j = self.index.get(("R", a[:-1], x))
                        if j is not None:
                            conflicts[i] |= 1 << j
                            conflicts[j] |= 1 << i
        self.conflicts = conflicts
        # criticality patterns: (pre mask or -1 for always, per-child grandchild masks, child-pair mask)
        self.patterns = []
        for eta in nodes:
            if t.is_leaf(eta) or not t.is_small_limit(eta):
                continue
            kids = t.children(eta, frag.window)
            for x in space.points:
                always = (len(eta) == 1 and x in P.A) or (not eta and x in P.B)
                pre = 0
                if eta:
                    j = self.index.get(("R", eta[:-1], x))
                    pre = 0 if j is None else 1 << j
                grand = []
                for c in kids:
                    m = 0
                    if len(c) < frag.depth:
                        for g in t.children(c, frag.window):
                            j = self.index.get(("R", g, x))
                            if j is not None:
                                m |= 1 << j
                    grand.append(m)
                child_pairs = sum(1 << self.index[("R", c, x)] for c in kids if ("R", c, x) in self.index)
                if (always or pre) and all(grand):
                    self.patterns.append((eta, x, always, pre, tuple(grand), child_pairs))
        self.rank_of = [t.rank(e[1]) for e in entries]
        self.symmetries = space_automorphisms(P, labels)
        self._reps: dict = {}

    # ---- mask level -------------------------------------------------
    def valid(self, m: int, cap: Optional[int] = None) -> bool:
        cap = self.frag.params.size_cap if cap is None else cap
        if m & self.unary_bad:
            return False
        if (m & self.f_mask).bit_count() > cap or (m & self.R_mask).bit_count() > cap:
            return False
        rest = m
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            if self.conflicts[i] & m:
                return False
            rest ^= low
        return not self.criticality_broken(m)

    def criticality_broken(self, m: int) -> bool:
        for _, _, always, pre, grand, _ in self.patterns:
            if (always or pre & m) and all(g & m for g in grand):
                return True
        return False

    def strict(self, m: int) -> bool:
        for _, _, always, pre, grand, kids in self.patterns:
            if (always or pre & m) and any(g & m for g in grand) and not kids & m:
                return False
        return True

    def bits(self, m: int) -> Iterator[int]:
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def to_condition(self, m: int) -> AlphaCondition:
        f, R = set(), set()
        for i in self.bits(m):
            kind, a, v = self.entries[i]
            (f if kind == "f" else R).add((a, v))
        return AlphaCondition(frozenset(f), frozenset(R))

    def to_mask(self, p: AlphaCondition) -> Optional[int]:
        """Mask of ``p``, or ``None`` when ``p`` leaves the fragment."""
        m = 0
        for a, v in p.f:
            j = self.index.get(("f", a, v))
            if j is None:
                return None
            m |= 1 << j
        for a, v in p.R:
            j = self.index.get(("R", a, v))
            if j is None:
                return None
            m |= 1 << j
        return m

    # ---- enumeration -------------------------------------------------
    def enumerate(self, cap: Optional[int] = None, pool: Optional[int] = None, limit: Optional[int] = None) -> list[int]:
        """All valid masks built from ``pool`` (default: every entry), sorted."""
        limit = hard_cap() if limit is None else limit
        pool = (1 << len(self.entries)) - 1 if pool is None else pool
        order = list(self.bits(pool))
        out: list[int] = []

        def grow(m: int, start: int):
            out.append(m)
            if len(out) > limit:
                raise FragmentTooLarge(f"more than {limit} conditions; narrow the fragment or raise LAB_HARD_CAP")
            for k in range(start, len(order)):
                nm = m | (1 << order[k])
                if self.valid(nm, cap):
                    grow(nm, k + 1)

        grow(0, 0)
        return out

    def canonical(self, m: int) -> int:
        """Representative of the orbit of ``m`` under the fragment's symmetries.

        The symmetries are permutations of children of successor-rank nodes
        combined with automorphisms of the space that fix A and B.
        """
        items = [self.entries[i] for i in self.bits(m)]
        best = None
        for pmap, lmap in self.symmetries:
            moved = [(k, a, pmap[v] if k == "R" else lmap[v]) for k, a, v in items]
            c = self._tree_canonical(moved)
            if best is None or c < best:
                best = c
        return best

    def _tree_canonical(self, items: list) -> int:
        t = self.frag.params.tree

        def go(prefix: Address, its: list) -> tuple:
            depth = len(prefix)
            local = [(k, a, v) for k, a, v in its if len(a) == depth]
            here = tuple(sorted((k, str(v)) for k, _, v in local))
            groups: dict = {}
            for it in its:
                if len(it[1]) > depth:
                    groups.setdefault(it[1][depth], []).append(it)
            subs = [go(prefix + (idx,), group) + (idx,) for idx, group in groups.items()]
            if groups and t.rank(prefix).is_successor():
                subs.sort(key=lambda s: s[0])
                subs = [(sig, rebuilt, new) for new, (sig, rebuilt, _) in enumerate(subs)]
            else:
                subs.sort(key=lambda s: s[2])
            out = list(local)
            for _, rebuilt, new in subs:
                out.extend((k, a[:depth] + (new,) + a[depth + 1 :], v) for k, a, v in rebuilt)
            return (here, tuple((new, sig) for sig, _, new in subs)), out

        _, rebuilt = go((), items)
        return sum(1 << self.index[e] for e in rebuilt)

    def orbit_representatives(self, cap: Optional[int] = None, limit: Optional[int] = None) -> list[int]:
        """Canonical masks of every valid condition, grown level by level."""
        key = (cap, limit)
        if key not in self._reps:
            self._reps[key] = self._orbit_representatives(cap, limit)
        return self._reps[key]

    def _orbit_representatives(self, cap: Optional[int], limit: Optional[int]) -> list[int]:
        limit = hard_cap() if limit is None else limit
        reps = {0}
        frontier = {0}
        n = len(self.entries)
        while frontier:
            nxt = set()
            for m in frontier:
                for i in range(n):
                    if m >> i & 1:
                        continue
                    if self.conflicts[i] & m or self.unary_bad >> i & 1:
                        continue
                    nm = m | (1 << i)
                    if self.valid(nm, cap):
                        c = self.canonical(nm)
                        if c not in reps:
                            reps.add(c)
                            nxt.add(c)
                            if len(reps) > limit:
                                raise FragmentTooLarge(f"more than {limit} orbit representatives")
            frontier = nxt
        return sorted(reps)

    def distinguishable_nodes(self, m: int) -> list[Address]:
        """One node per class of nodes that the condition ``m`` cannot tell apart.

        Below a successor-rank node, untouched children are interchangeable by an
        automorphism fixing ``m``; only the least untouched index is kept.
        """
        t = self.frag.params.tree
        touched = {self.entries[i][1] for i in self.bits(m)}
        prefixes = {a[:k] for a in touched for k in range(len(a) + 1)}
        out = []
        frontier: list[Address] = [()]
        while frontier:
            nxt = []
            for a in frontier:
                out.append(a)
                if t.is_leaf(a) or len(a) >= self.frag.depth:
                    continue
                if t.rank(a).is_successor():
                    used = sorted(c[-1] for c in prefixes if len(c) == len(a) + 1 and c[:-1] == a)
                    free = next((i for i in range(self.frag.window) if i not in used), None)
                    idx = used + ([free] if free is not None else [])
                    nxt.extend(a + (i,) for i in idx)
                else:
                    nxt.extend(t.children(a, self.frag.window))
            frontier = nxt
        return out

    def conflict_pool(self, m: int) -> int:
        """Entries that can take part, together with entries of ``m``, in a violation."""
        pool = 0
        for i in self.bits(m):
            pool |= self.conflicts[i]
        for _, _, always, pre, grand, _ in self.patterns:
            pattern = pre
            for g in grand:
                pattern |= g
            if pattern & m:
                pool |= pattern
        return pool & ~m


def space_automorphisms(P: ForcingParams, labels: Sequence[str]) -> list[tuple[dict, dict]]:
    """Point permutations fixing A and B that permute the labeled subbasics."""
    import itertools

    space = P.space
    pts = list(space.points)
    by_set: dict = {}
    for lab in labels:
        by_set.setdefault(space.basic(lab), []).append(lab)
    out = []
    for perm in itertools.permutations(pts):
        pmap = dict(zip(pts, perm))
        if frozenset(pmap[x] for x in P.A) != P.A or frozenset(pmap[x] for x in P.B) != P.B:
            continue
        lmap = {}
        for lab in labels:
            image = frozenset(pmap[x] for x in space.basic(lab))
            cands = by_set.get(image)
            if not cands or len(cands) != len(by_set[space.basic(lab)]):
                break
            lmap[lab] = cands[by_set[space.basic(lab)].index(lab)]
        else:
            out.append((pmap, lmap))
        if len(pts) > 7:
            break
    return out


def entries_json(cf: CompiledFragment, m: int) -> dict:
    return cf.to_condition(m).to_json()
