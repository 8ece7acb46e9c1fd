"""Finite products of alpha-forcings with concrete ground parameters.

A good condition assigns an ``AlphaCondition`` to finitely many stages.
Because every A_g and B_g is a concrete set, membership questions are
decided by the trivial condition, so validity and compatibility are
checked stage by stage.
"""
from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from . import alpha_forcing as af
from .alpha_forcing import AlphaCondition, ForcingParams, SizeOverflow, Violation
from .borel_codes import FiniteSpace
from .ordinals import Cof, Ordinal, as_ordinal
from .template_trees import Address


class SpecError(ValueError):
    pass


class LocusInfeasible(ValueError):
    """A stage must be covered entirely but is larger than the budget."""


class _Infinity:
    """Rank of a condition supported outside the locus; above every ordinal."""

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("infinity")

    def __str__(self):
        return "inf"

    __repr__ = __str__


INFINITY = _Infinity()


def _is_zero_ab(P: ForcingParams) -> bool:
    return not (P.A or P.B)


def successor_of_small_limit(alpha: Ordinal) -> bool:
    return alpha.is_successor() and alpha.predecessor().cof() is Cof.SMALL_LIMIT


@dataclass(frozen=True)
class IterationSpec:
    stages: tuple

    def __post_init__(self):
        stages = tuple(self.stages)
        object.__setattr__(self, "stages", stages)
        if not stages:
            raise SpecError("an iteration needs at least one stage")
        first = stages[0]
        if not _is_zero_ab(first):
            raise SpecError("stages[0]: A and B must be empty")
        for g, P in enumerate(stages[1:], start=1):
            if _is_zero_ab(P):
                continue
            if not P.alpha.is_successor():
                raise SpecError(f"stages[{g}]: alpha must be a successor when A or B is nonempty")
            if not (P.alpha > first.alpha or len(P.space.points) < len(first.space.points)):
                raise SpecError(f"stages[{g}]: needs alpha above alpha_0 or fewer points than stage 0")

    def __len__(self) -> int:
        return len(self.stages)

    def __getitem__(self, g: int) -> ForcingParams:
        return self.stages[g]

    @property
    def alpha0(self) -> Ordinal:
        return self.stages[0].alpha

    def needs_all_or_nothing(self, g: int) -> bool:
        """Stages whose locus entry must be empty or the whole space."""
        P = self.stages[g]
        return g > 0 and not P.alpha > self.alpha0 and not _is_zero_ab(P)

    @classmethod
    def from_json(cls, data) -> "IterationSpec":
        if not isinstance(data, list):
            raise SpecError("spec: expected an array of stage objects")
        stages = [params_from_json(st, f"spec[{g}]") for g, st in enumerate(data)]
        return cls(tuple(stages))

    def to_json(self) -> list:
        return [
            {
                "alpha": str(P.alpha),
                "space": P.space.to_json(),
                "A": sorted(P.A),
                "B": sorted(P.B),
                "s": P.size_cap,
                "w": P.width,
                "c": P.limit_width,
            }
            for P in self.stages
        ]


def params_from_json(st, where: str = "params") -> ForcingParams:
    """Forcing parameters from ``{"alpha", "space", "A", "B", "s", "w", "c"}``."""
    if not isinstance(st, dict):
        raise SpecError(f"{where}: expected an object")
    for key in ("alpha", "space"):
        if key not in st:
            raise SpecError(f"{where}.{key}: missing")
    space = _space_from_json(st["space"], f"{where}.space")
    try:
        alpha = as_ordinal(st["alpha"])
    except ValueError as exc:
        raise SpecError(f"{where}.alpha: {exc}") from exc
    try:
        return ForcingParams(
            alpha,
            space,
            A=frozenset(st.get("A", [])),
            B=frozenset(st.get("B", [])),
            size_cap=int(st.get("s", 2)),
            width=int(st.get("w", 3)),
            limit_width=int(st.get("c", 2)),
        )
    except (TypeError, ValueError) as exc:
        raise SpecError(f"{where}: {exc}") from exc


def _space_from_json(data, where: str) -> FiniteSpace:
    if isinstance(data, str):
        name, _, arg = data.partition(":")
        if name == "cylinders" and arg.isdigit():
            return FiniteSpace.cylinders(int(arg))
        if data.startswith("grid("):
            from .wf_complexity import Grid, grid_space

            try:
                return grid_space(Grid.parse(data))
            except ValueError as exc:
                raise SpecError(f"{where}: {exc}") from exc
        raise SpecError(f"{where}: unknown space reference {data!r}")
    try:
        return FiniteSpace.from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise SpecError(f"{where}: {exc}") from exc


@dataclass(frozen=True)
class GoodCondition:
    coords: tuple = ()  # sorted (stage, AlphaCondition) with trivial stages dropped

    @classmethod
    def make(cls, coords: Optional[Mapping[int, AlphaCondition]] = None) -> "GoodCondition":
        items = ((int(g), c) for g, c in (coords or {}).items() if c.size())
        return cls(tuple(sorted(items, key=lambda e: e[0])))

    def get(self, g: int) -> AlphaCondition:
        return dict(self.coords).get(g, af.ONE)

    @property
    def support(self) -> frozenset:
        return frozenset(g for g, _ in self.coords)

    def __le__(self, other: "GoodCondition") -> bool:
        return all(self.get(g) <= c for g, c in other.coords)

    def __or__(self, other: "GoodCondition") -> "GoodCondition":
        stages = self.support | other.support
        return GoodCondition.make({g: self.get(g) | other.get(g) for g in stages})

    def to_json(self) -> dict:
        return {str(g): c.to_json() for g, c in self.coords}

    @classmethod
    def from_json(cls, data) -> "GoodCondition":
        if not isinstance(data, dict):
            raise ValueError("condition: expected an object keyed by stage index")
        coords = {}
        for key, value in data.items():
            if not str(key).isdigit():
                raise ValueError(f"condition[{key!r}]: stage keys must be natural numbers")
            try:
                coords[int(key)] = AlphaCondition.from_json(value)
            except ValueError as exc:
                raise ValueError(f"condition[{key!r}].{exc}") from exc
        return cls.make(coords)


TRIVIAL = GoodCondition()


def validate_good(spec: IterationSpec, p: GoodCondition, cap: Optional[int] = None) -> list[tuple[int, Violation]]:
    out = []
    for g, c in p.coords:
        if not 0 <= g < len(spec):
            out.append((g, Violation("structure", None, None, f"stage {g} is outside the iteration")))
            continue
        out.extend((g, v) for v in af.violations(spec[g], c, cap))
    return out


def compatible_good(spec: IterationSpec, p: GoodCondition, q: GoodCondition, cap: Optional[int] = None) -> bool:
    return all(
        _stage_compatible(spec[g], p.get(g), q.get(g), cap) for g in p.support & q.support
    )


@functools.lru_cache(maxsize=1 << 18)
def _stage_compatible(P: ForcingParams, a: AlphaCondition, b: AlphaCondition, cap: Optional[int]) -> bool:
    return af.compatible(P, a, b, cap)


@dataclass(frozen=True)
class GroundLocus:
    H: tuple  # one frozenset of points per stage

    @classmethod
    def make(cls, spec: IterationSpec, H: Mapping[int, Iterable] | Sequence[Iterable]) -> "GroundLocus":
        if isinstance(H, Mapping):
            sets = [frozenset(H.get(g, ())) for g in range(len(spec))]
        else:
            sets = [frozenset(h) for h in H] + [frozenset()] * (len(spec) - len(H))
        return cls(tuple(sets))

    def at(self, g: int) -> frozenset:
        return self.H[g] if g < len(self.H) else frozenset()

    @property
    def support(self) -> frozenset:
        """Stages with a nonempty entry; stage 0 always counts as supported."""
        return frozenset(g for g, h in enumerate(self.H) if h) | {0}

    def to_json(self) -> dict:
        return {str(g): sorted(h) for g, h in enumerate(self.H)}


def locus_violations(spec: IterationSpec, H: GroundLocus) -> list[str]:
    out = []
    if len(H.H) != len(spec):
        out.append(f"locus has {len(H.H)} entries for {len(spec)} stages")
    for g, h in enumerate(H.H[: len(spec)]):
        X = spec[g].space.universe
        if not h <= X:
            out.append(f"H({g}) is not a subset of the stage space")
        if spec.needs_all_or_nothing(g) and h and h != X:
            out.append(f"H({g}) must be empty or the whole space")
    # The predensity clause holds automatically: the trivial condition decides
    # membership in concrete sets and has rank 0.
    return out


def crank_ground(spec: IterationSpec, p: GoodCondition, H: GroundLocus):
    if not p.support <= H.support:
        return INFINITY
    return max((af.crank_single(spec[g], c, H.at(g)) for g, c in p.coords), default=Ordinal())


def pointwise_union(
    spec: IterationSpec, family: Iterable[GoodCondition], cap: Optional[int] = None
) -> tuple[Optional[GoodCondition], dict]:
    """The stagewise union, or ``None`` with the offending stages and their violations."""
    u = TRIVIAL
    for p in family:
        u = u | p
    bad: dict = {}
    for g, c in u.coords:
        if g >= len(spec):
            bad[g] = [Violation("structure", None, None, f"stage {g} is outside the iteration")]
            continue
        found = af.violations(spec[g], c, 2 * spec[g].size_cap if cap is None else cap)
        if found:
            bad[g] = found
    return (None, bad) if bad else (u, {})


def is_immaculate(spec: IterationSpec, p: GoodCondition, H: GroundLocus) -> bool:
    """Always true here: with concrete A and B every membership is decided by the trivial condition."""
    return True


def _grandchild_under(nodes: set, child: Address) -> bool:
    return any(len(a) == len(child) + 1 and a[:-1] == child for a in nodes)


def prepare_pred_strict(P: ForcingParams, p: AlphaCondition) -> AlphaCondition:
    """Child promises for critical nodes whose predecessor carries the same point."""
    for eta, x in af.critical_nodes(P, p):
        if eta and eta[:-1] in p.nodes_for(x):
            p = af.make_strict_at(P, p, eta, x)
    return p


def prepare_low_children(P: ForcingParams, p: AlphaCondition, beta: Ordinal) -> AlphaCondition:
    """Below a root child with grandchild promises, promise a low-rank child lacking any."""
    if not successor_of_small_limit(P.alpha):
        return p
    t = P.tree
    additions = []
    for x in sorted({x for _, x in p.R}, key=str):
        nodes = p.nodes_for(x)
        for eta in sorted({a[:1] for a in nodes if len(a) >= 3}):
            if eta in nodes or not any(len(a) == 3 and a[:1] == eta for a in nodes):
                continue
            low = [c for c in t.children(eta, 0) if not t.rank(c) > beta and not _grandchild_under(nodes, c)]
            if low and not any(c in nodes for c in low):
                additions.append((low[0], x))
    return p.add(R=additions)


def prepare_stage(P: ForcingParams, p: AlphaCondition, beta: Ordinal, low_children: bool = True) -> AlphaCondition:
    p = af.prepare_for_reduct(P, p, beta)
    p = prepare_pred_strict(P, p)
    return prepare_low_children(P, p, beta) if low_children else p


@functools.lru_cache(maxsize=1 << 16)
def _stage_reduct(P: ForcingParams, c: AlphaCondition, beta: Ordinal, h: frozenset, prepare: bool, low_children: bool):
    prepared = prepare_stage(P, c, beta, low_children) if prepare else c
    return prepared, af.truncate(P, prepared, beta, h)


def rank_reduct_ground(
    spec: IterationSpec,
    p: GoodCondition,
    beta,
    H: GroundLocus,
    prepare: bool = True,
    low_children: bool = True,
    cap: Optional[int] = None,
) -> tuple[GoodCondition, GoodCondition]:
    """Prepare ``p`` stage by stage, then keep promises on H or of rank at most beta.

    The reduct is trivial outside supp(p) and supp(H).
    """
    beta = as_ordinal(beta)
    if not beta < spec.alpha0:
        raise ValueError(f"beta = {beta} must lie below alpha_0 = {spec.alpha0}")
    prepared, q = {}, {}
    for g, c in p.coords:
        pc, qc = _stage_reduct(spec[g], c, beta, H.at(g), prepare, low_children)
        if cap is not None and pc.size() > cap:
            raise SizeOverflow(f"stage {g}: preparation has {pc.size()} entries, cap {cap}")
        prepared[g] = pc
        if g in H.support:
            q[g] = qc
    return GoodCondition.make(prepared), GoodCondition.make(q)


def small_locus_builder(spec: IterationSpec, F: Iterable[GoodCondition], budget: int) -> GroundLocus:
    """Least locus on which every condition in F has rank 0."""
    points = [set() for _ in spec.stages]
    used = set()
    for p in F:
        for g, c in p.coords:
            if g >= len(spec):
                raise ValueError(f"condition uses stage {g} outside the iteration")
            used.add(g)
            points[g] |= {x for _, x in c.R}
    H = []
    for g, pts in enumerate(points):
        X = spec[g].space.universe
        h = frozenset(pts)
        if g in used and spec.needs_all_or_nothing(g):
            if len(X) > budget:
                raise LocusInfeasible(f"stage {g} must be covered entirely, {len(X)} points exceed budget {budget}")
            h = X
        elif g in used and g > 0 and not h:
            # a stage touched only through f must still be in the support
            h = frozenset([min(X, key=str)])
        H.append(h)
    if len(H[0]) > budget:
        raise LocusInfeasible(f"H(0) needs {len(H[0])} points, budget {budget}")
    return GroundLocus(tuple(H))


def load_spec(path: str) -> IterationSpec:
    with open(path) as fh:
        return IterationSpec.from_json(json.load(fh))
