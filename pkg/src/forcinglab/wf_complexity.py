"""Well-founded trees on a finite grid: ranks, the bounded-rank classes, and Borel codes for them.

Points of the ambient space are membership sets, i.e. arbitrary subsets of
the grid. Basic clopen sets are consistent conjunctions of the literals
"n in T" and "n not in T".
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from .borel_codes import PI, SIGMA, BorelCode, FiniteSpace
from .ordinals import Ordinal, as_ordinal
from .template_trees import Address, format_address

MAX_GRID_NODES = 12


class GridTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    branching: int
    depth: int

    @functools.cached_property
    def nodes(self) -> tuple:
        out = []
        for n in range(self.depth + 1):
            out.extend(itertools.product(range(self.branching), repeat=n))
        return tuple(tuple(a) for a in out)

    def contains(self, a: Address) -> bool:
        return len(a) <= self.depth and all(0 <= i < self.branching for i in a)

    def children(self, a: Address) -> list:
        if len(a) >= self.depth:
            return []
        return [a + (i,) for i in range(self.branching)]

    def check_size(self) -> None:
        if len(self.nodes) > MAX_GRID_NODES:
            raise GridTooLarge(f"grid has {len(self.nodes)} nodes; at most {MAX_GRID_NODES} are supported")

    def membership_sets(self) -> Iterator[frozenset]:
        self.check_size()
        nodes = self.nodes
        for bits in range(1 << len(nodes)):
            yield frozenset(a for i, a in enumerate(nodes) if bits >> i & 1)

    def trees(self) -> list[frozenset]:
        return [s for s in self.membership_sets() if is_prefix_closed(s)]

    def point_id(self, members: frozenset) -> str:
        return "".join("1" if a in members else "0" for a in self.nodes)

    @classmethod
    def parse(cls, text: str) -> "Grid":
        """Read ``grid(b=2,d=2)``."""
        import re

        m = re.fullmatch(r"\s*grid\(\s*b\s*=\s*(\d+)\s*,\s*d\s*=\s*(\d+)\s*\)\s*", text)
        if not m:
            raise ValueError(f"expected grid(b=<n>,d=<n>), got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))


def is_prefix_closed(T) -> bool:
    return all(a[:-1] in T for a in T if a)


def wf_rank(T) -> Ordinal:
    """Rank of the root; the empty tree has rank 0."""
    T = frozenset(tuple(a) for a in T)
    if not is_prefix_closed(T):
        raise ValueError("membership set is not a tree")
    if not T:
        return Ordinal()

    @functools.lru_cache(maxsize=None)
    def rank(a):
        kids = [c for c in T if len(c) == len(a) + 1 and c[:-1] == a]
        return max((rank(c) + 1 for c in kids), default=0)

    return Ordinal.nat(rank(()))


def wf_membership(T, alpha) -> bool:
    T = frozenset(tuple(a) for a in T)
    return is_prefix_closed(T) and wf_rank(T) < as_ordinal(alpha)


def beta_menu(alpha: Ordinal, depth: int) -> list[Ordinal]:
    """Ordinals below alpha that the recursion needs on a grid of this depth.

    Finite ranks 0..depth+1 cover every subtree; for alpha at or above k the
    forms k*a'+n below alpha are included as well.
    """
    alpha = as_ordinal(alpha)
    out = [Ordinal.nat(n) for n in range(depth + 2) if Ordinal.nat(n) < alpha]
    if alpha.kappa_part:
        a = dict(alpha.kappa_part).get(0, 0)
        if len(alpha.kappa_part) > 1 or alpha.kappa_part[0][0] != 0:
            raise ValueError(f"beta menu supports only k*a+b with finite a, got {alpha}")
        for a2 in range(1, a + 1):
            for n in range(depth + 2):
                b = Ordinal.kappa(a2, n)
                if b < alpha:
                    out.append(b)
    return out


def recursion_membership(T, alpha, eta: Address = (), depth: Optional[int] = None, branching: Optional[int] = None) -> bool:
    """Evaluate "eta in T and some beta < alpha has every child absent or in WF_beta(child)".

    At the root the empty tree is accepted for alpha >= 1, matching the
    convention of ``wf_membership``.
    """
    T = frozenset(tuple(a) for a in T)
    alpha = as_ordinal(alpha)
    eta = tuple(eta)
    if depth is None or branching is None:
        depth = max((len(a) for a in T), default=0) if depth is None else depth
        branching = max((max(a) + 1 for a in T if a), default=1) if branching is None else branching
    grid = Grid(branching, depth)

    @functools.lru_cache(maxsize=None)
    def rec(a: Ordinal, node: Address) -> bool:
        if node not in T:
            return False
        kids = grid.children(node)
        return any(all(c not in T or rec(b, c) for c in kids) for b in beta_menu(a, depth))

    if not eta and not T:
        return not alpha.is_zero()
    return rec(alpha, eta)


def claimed_class(alpha) -> tuple[str, Ordinal]:
    """(Sigma, 2a) for alpha = k*a, (Pi, 2a+1) for alpha = k*a+b with b nonzero."""
    alpha = as_ordinal(alpha)
    if alpha.is_zero():
        raise ValueError("WF_0 is empty; no class is claimed for alpha = 0")
    a = alpha.kappa_part
    doubled = tuple((e, c * 2 if e == 0 else c) for e, c in a)
    level = Ordinal((), doubled)
    if alpha.tail_part:
        return (PI, level + 1)
    return (SIGMA, level)


# Symbolic classes. Level 0 is clopen; k-sized unions and intersections
# raise the level, small ones do not.

def _as_sigma(c) -> int:
    pol, n = c
    return n if pol == SIGMA or n == 0 else n + 1


def _as_pi(c) -> int:
    pol, n = c
    return n if pol == PI or n == 0 else n + 1


def kappa_union(cs) -> tuple:
    return (SIGMA, max(max(_as_sigma(c) for c in cs), 1))


def kappa_intersection(cs) -> tuple:
    return (PI, max(max(_as_pi(c) for c in cs), 1))


def small_union(cs) -> tuple:
    cs = list(cs)
    if all(n == 0 for _, n in cs):
        return (PI, 0)
    if all(pol == PI or n == 0 for pol, n in cs):
        return (PI, max(n for _, n in cs))
    s, p = max(_as_sigma(c) for c in cs), max(_as_pi(c) + 1 for c in cs)
    return (SIGMA, s) if s <= p else (PI, p)


def small_intersection(cs) -> tuple:
    cs = list(cs)
    if all(n == 0 for _, n in cs):
        return (PI, 0)
    if all(pol == SIGMA or n == 0 for pol, n in cs):
        return (SIGMA, max(n for _, n in cs))
    p, s = max(_as_pi(c) for c in cs), max(_as_sigma(c) + 1 for c in cs)
    return (PI, p) if p <= s else (SIGMA, s)


CLOPEN = (PI, 0)


def template_class(alpha) -> tuple[str, int]:
    """Class of the unbounded recursion skeleton for WF_alpha(eta).

    Children are quantified over k, so their conjunction is k-sized. The
    disjunction over beta < alpha runs over a cofinal set: the predecessor
    when alpha is a successor, or the k-sized set k*(a-1)+n when alpha = k*a.
    """
    alpha = as_ordinal(alpha)
    if alpha.is_zero():
        return CLOPEN  # the empty set
    if alpha.tail_part and alpha.tail_part[-1][0] != 0 or len(alpha.kappa_part) > 1 or (
        alpha.kappa_part and alpha.kappa_part[0][0] != 0
    ):
        raise ValueError(f"template classes are computed for k*a+b with finite a and b, got {alpha}")
    if alpha.is_successor():
        disjunction = body_class(alpha.predecessor())
    else:
        a = dict(alpha.kappa_part)[0]
        members = [body_class(Ordinal.kappa(a - 1, n)) for n in (0, 1, 2)]
        disjunction = kappa_union(members)
    return small_intersection([CLOPEN, disjunction])


def body_class(beta) -> tuple:
    """Class of "every child is absent or in WF_beta(child)"."""
    return kappa_intersection([small_union([CLOPEN, template_class(beta)])])


# Normal forms for the finite codes. A conjunction of literals is a tuple of
# (address, present) sorted by address; it denotes a basic clopen set.

def _conj_label(conj: tuple) -> str:
    if not conj:
        return "all"
    return "&".join(("+" if v else "-") + format_address(a) for a, v in conj)


NONE_LABEL = "none"


def _conj_and(conj: tuple, lit: tuple) -> Optional[tuple]:
    d = dict(conj)
    a, v = lit
    if a in d and d[a] != v:
        return None
    d[a] = v
    return tuple(sorted(d.items()))


@dataclass(frozen=True)
class PiForm:
    """Intersection of the complements of the basic sets in ``clauses`` and of the given Sigma forms."""

    level: int
    clauses: tuple = ()  # conjunctions whose complements are intersected
    sigmas: tuple = ()  # SigmaForm of level - 1


@dataclass(frozen=True)
class SigmaForm:
    level: int
    parts: tuple = ()  # PiForm of level - 1


def _neg(lit):
    return (lit[0], not lit[1])


def lift(form, level: int):
    """The same set as a form of a higher level."""
    if form.level == level:
        return form
    if isinstance(form, PiForm):
        if level % 2 == 0:
            return SigmaForm(level, (lift(form, level - 1),))
        return PiForm(level, form.clauses, tuple(lift(sf, level - 1) for sf in form.sigmas))
    if level % 2 == 1:
        return PiForm(level, (), (lift(form, level - 1),))
    return SigmaForm(level, tuple(lift(pf, level - 1) for pf in form.parts))


def literal_form(lit) -> PiForm:
    return PiForm(1, ((_neg(lit),),))


def and_literal(form, lit):
    if isinstance(form, PiForm):
        return PiForm(form.level, form.clauses + ((_neg(lit),),), form.sigmas)
    return SigmaForm(form.level, tuple(and_literal(pf, lit) for pf in form.parts))


def or_literal(form, lit):
    if isinstance(form, PiForm):
        clauses = tuple(c for c in (_conj_and(k, _neg(lit)) for k in form.clauses) if c is not None)
        return PiForm(form.level, clauses, tuple(or_literal(sf, lit) for sf in form.sigmas))
    if not form.parts:
        return SigmaForm(form.level, (lift(literal_form(lit), form.level - 1),))
    return SigmaForm(form.level, tuple(or_literal(pf, lit) for pf in form.parts))


def or_conjunction(form, conj: tuple):
    """form or (every literal of conj)."""
    if isinstance(form, SigmaForm):
        extra = lift(PiForm(1, tuple((_neg(lit),) for lit in conj)), form.level - 1)
        return SigmaForm(form.level, form.parts + (extra,))
    return big_and([or_literal(form, lit) for lit in conj], form.level)


def big_and(forms, level: int):
    """Intersection of Pi forms of the given odd level (or lower)."""
    forms = [lift(f, level) for f in forms]
    return PiForm(level, sum((f.clauses for f in forms), ()), sum((f.sigmas for f in forms), ()))


def big_or(forms, level: int):
    forms = [lift(f, level) for f in forms]
    return SigmaForm(level, sum((f.parts for f in forms), ()))


TRUE_FORM = PiForm(1, ())
FALSE_FORM = PiForm(1, ((),))  # complement of everything


def wf_form(alpha: Ordinal, eta: Address, grid: Grid):
    """Normal form for WF_alpha(eta) on the grid, built along the recursion."""
    alpha = as_ordinal(alpha)
    here = (eta, True)
    if alpha.is_zero():
        return FALSE_FORM
    if alpha.is_successor():
        body = body_form(alpha.predecessor(), eta, grid)
        return and_literal(body, here)
    a = dict(alpha.kappa_part)[0]
    options = [body_form(b, eta, grid) for b in beta_menu(alpha, grid.depth) if not b < Ordinal.kappa(a - 1)]
    top = 2 * a
    return and_literal(big_or(options, top), here)


def body_form(beta: Ordinal, eta: Address, grid: Grid):
    parts = [or_literal(wf_form(beta, c, grid), (c, False)) for c in grid.children(eta)]
    if not parts:
        return TRUE_FORM
    level = max(part.level for part in parts)
    if level % 2 == 0:
        level += 1
    return big_and(parts, level)


def compile_form(form) -> BorelCode:
    if isinstance(form, PiForm):
        kids = [BorelCode.leaf(_conj_label(c)) for c in form.clauses]
        kids += [_sigma_complement(s) for s in form.sigmas]
        if not kids:
            kids = [BorelCode.leaf(NONE_LABEL)]
        return BorelCode.node(*kids)
    return BorelCode.node(_sigma_complement(form))


def _sigma_complement(form: SigmaForm) -> BorelCode:
    """Code for the complement of a Sigma form: intersection of complements of its parts."""
    kids = [compile_form(p) for p in form.parts]
    if not kids:
        return BorelCode.node(BorelCode.leaf(NONE_LABEL))
    return BorelCode.node(*kids)


def build_wf_code(alpha, grid: Grid, eta: Address = ()) -> BorelCode:
    """Code for WF_alpha(eta) on the grid; at the root the empty tree is included."""
    grid.check_size()
    eta = tuple(eta)
    if not grid.contains(eta):
        raise ValueError(f"{format_address(eta)} is not a grid node")
    alpha = as_ordinal(alpha)
    form = wf_form(alpha, eta, grid)
    if not eta and not alpha.is_zero():
        form = or_conjunction(form, tuple((a, False) for a in grid.nodes))
    return compile_form(form)


def grid_space(grid: Grid, labels: Optional[set] = None) -> FiniteSpace:
    """Membership sets as points; basic clopen sets as subbasics (restricted to ``labels`` if given)."""
    grid.check_size()
    sets = list(grid.membership_sets())
    pts = [grid.point_id(s) for s in sets]
    sub = {"all": frozenset(pts), NONE_LABEL: frozenset()}
    nodes = grid.nodes
    for choice in itertools.product((None, True, False), repeat=len(nodes)):
        conj = tuple(sorted((a, v) for a, v in zip(nodes, choice) if v is not None))
        lab = _conj_label(conj)
        if labels is not None and lab not in labels:
            continue
        sub[lab] = frozenset(p for p, s in zip(pts, sets) if all((a in s) == v for a, v in conj))
    return FiniteSpace(tuple(pts), sub)
