"""The closed description algebra for subsets of the naturals and of pairs.

Expressions denote (possibly infinite) subsets of one of the two ground sets.
`member` gives pointwise semantics, `truncate` the finite-window oracle both
the tests and the bounded certificate tiers are built on.  SelectorSchema is
the one schematic node: it stands for the whole family of partial selectors
of a partition and is rejected by the pointwise operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import registry
from .errors import (
    ArityError,
    GroundSetMismatch,
    SchematicExpression,
)
from .grounds import BLOCKS, Ground, point_ground, universe


class SetExpr:
    """Base class; every node is a frozen dataclass."""

    __slots__ = ()


def _unify(*grounds):
    out = None
    for g in grounds:
        if g is None:
            continue
        if out is None:
            out = g
        elif out is not g:
            raise GroundSetMismatch(f"mixed ground sets {out} and {g}")
    return out


@dataclass(frozen=True)
class Finite(SetExpr):
    points: frozenset
    # the ground set only disambiguates the empty description; it is not part
    # of the structural identity
    ground: Ground | None = field(default=None, compare=False)

    def __post_init__(self):
        pts = frozenset(self.points)
        object.__setattr__(self, "points", pts)
        inferred = _unify(*(point_ground(p) for p in pts))
        if self.ground is None:
            object.__setattr__(self, "ground", inferred)
        elif inferred is not None and inferred is not self.ground:
            raise GroundSetMismatch("points disagree with declared ground")


@dataclass(frozen=True)
class CoFinite(SetExpr):
    holes: frozenset
    ground: Ground | None = field(default=None, compare=False)

    def __post_init__(self):
        hs = frozenset(self.holes)
        object.__setattr__(self, "holes", hs)
        inferred = _unify(*(point_ground(p) for p in hs))
        if self.ground is None:
            object.__setattr__(self, "ground", inferred)
        elif inferred is not None and inferred is not self.ground:
            raise GroundSetMismatch("holes disagree with declared ground")


@dataclass(frozen=True)
class Column(SetExpr):
    n: int


@dataclass(frozen=True)
class Row(SetExpr):
    m: int


@dataclass(frozen=True)
class BandFrom(SetExpr):
    n: int


@dataclass(frozen=True)
class Block(SetExpr):
    n: int


@dataclass(frozen=True)
class BlockUnion(SetExpr):
    index: SetExpr

    def __post_init__(self):
        g = ground_of(self.index)
        if g is Ground.PAIRS:
            raise GroundSetMismatch("block index family must be over the naturals")


@dataclass(frozen=True)
class Stride(SetExpr):
    start: int
    step: int

    def __post_init__(self):
        if self.step < 1:
            raise ArityError("stride step must be >= 1")


@dataclass(frozen=True)
class Union(SetExpr):
    left: SetExpr
    right: SetExpr

    def __post_init__(self):
        _unify(ground_of(self.left), ground_of(self.right))


@dataclass(frozen=True)
class Inter(SetExpr):
    left: SetExpr
    right: SetExpr

    def __post_init__(self):
        _unify(ground_of(self.left), ground_of(self.right))


@dataclass(frozen=True)
class Diff(SetExpr):
    left: SetExpr
    right: SetExpr

    def __post_init__(self):
        _unify(ground_of(self.left), ground_of(self.right))


@dataclass(frozen=True)
class Complement(SetExpr):
    inner: SetExpr


@dataclass(frozen=True)
class Preimage(SetExpr):
    map_id: str
    inner: SetExpr

    def __post_init__(self):
        m = registry.get_map(self.map_id)
        g = ground_of(self.inner)
        if m.codomain is not None and g is not None and g is not m.codomain:
            raise GroundSetMismatch(f"map {self.map_id} does not land in {g}")


@dataclass(frozen=True)
class Image(SetExpr):
    map_id: str
    inner: SetExpr

    def __post_init__(self):
        m = registry.get_map(self.map_id)
        if not m.flags.finite_to_one:
            raise ArityError(f"map {self.map_id} lacks finite fibers; image not representable")
        g = ground_of(self.inner)
        if m.domain is not None and g is not None and g is not m.domain:
            raise GroundSetMismatch(f"map {self.map_id} does not act on {g}")


@dataclass(frozen=True)
class SelectorSchema(SetExpr):
    partition_id: str
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ArityError("selector bound must be >= 1")


@dataclass(frozen=True)
class PartitionUnion(SetExpr):
    """Union of the blocks K_n of a registered partition over an index family.

    Internal node (not part of the DSL surface): realizes expressions like
    "the union of K_n over n in A" that the base algebra cannot spell.
    """

    partition_id: str
    index: SetExpr

    def __post_init__(self):
        g = ground_of(self.index)
        if g is Ground.PAIRS:
            raise GroundSetMismatch("partition index family must be over the naturals")


EMPTY = Finite(frozenset())


def full(ground: Ground) -> SetExpr:
    return CoFinite(frozenset(), ground)


def ground_of(e: SetExpr) -> Ground | None:
    """The ground set an expression lives on, or None if polymorphic."""
    if isinstance(e, (Finite, CoFinite)):
        return e.ground
    if isinstance(e, (Column, Row, BandFrom)):
        return Ground.PAIRS
    if isinstance(e, (Block, BlockUnion, Stride)):
        return Ground.NAT
    if isinstance(e, (Union, Inter, Diff)):
        return _unify(ground_of(e.left), ground_of(e.right))
    if isinstance(e, Complement):
        return ground_of(e.inner)
    if isinstance(e, Preimage):
        m = registry.get_map(e.map_id)
        return m.domain if m.domain is not None else ground_of(e.inner)
    if isinstance(e, Image):
        m = registry.get_map(e.map_id)
        return m.codomain if m.codomain is not None else ground_of(e.inner)
    if isinstance(e, SelectorSchema):
        return registry.get_partition(e.partition_id).ground
    if isinstance(e, PartitionUnion):
        return registry.get_partition(e.partition_id).ground
    raise TypeError(f"not a SetExpr: {e!r}")


def is_schematic(e: SetExpr) -> bool:
    if isinstance(e, SelectorSchema):
        return True
    if isinstance(e, (Union, Inter, Diff)):
        return is_schematic(e.left) or is_schematic(e.right)
    if isinstance(e, Complement):
        return is_schematic(e.inner)
    if isinstance(e, (Preimage, Image)):
        return is_schematic(e.inner)
    if isinstance(e, (BlockUnion, PartitionUnion)):
        return is_schematic(e.index)
    return False


def member(e: SetExpr, p) -> bool:
    """Pointwise semantics.  Rejects schematic expressions."""
    if isinstance(e, Finite):
        return p in e.points
    if isinstance(e, CoFinite):
        return p not in e.holes
    if isinstance(e, Column):
        return p[0] == e.n
    if isinstance(e, Row):
        return p[1] == e.m
    if isinstance(e, BandFrom):
        return p[0] >= e.n
    if isinstance(e, Block):
        return BLOCKS.block_index(p) == e.n
    if isinstance(e, BlockUnion):
        return member(e.index, BLOCKS.block_index(p))
    if isinstance(e, Stride):
        return p >= e.start and (p - e.start) % e.step == 0
    if isinstance(e, Union):
        return member(e.left, p) or member(e.right, p)
    if isinstance(e, Inter):
        return member(e.left, p) and member(e.right, p)
    if isinstance(e, Diff):
        return member(e.left, p) and not member(e.right, p)
    if isinstance(e, Complement):
        return not member(e.inner, p)
    if isinstance(e, Preimage):
        return member(e.inner, registry.get_map(e.map_id).apply(p))
    if isinstance(e, Image):
        m = registry.get_map(e.map_id)
        return any(member(e.inner, x) for x in m.fiber(p))
    if isinstance(e, PartitionUnion):
        part = registry.get_partition(e.partition_id)
        bi = part.block_index(p)
        return bi is not None and member(e.index, bi)
    if isinstance(e, SelectorSchema):
        raise SchematicExpression("selector schema has no pointwise semantics")
    raise TypeError(f"not a SetExpr: {e!r}")


def truncate(e: SetExpr, bound: int, ground: Ground | None = None):
    """Exactly { p in Universe(bound) : member(e, p) }, in canonical order."""
    if is_schematic(e):
        raise SchematicExpression("cannot truncate a schematic expression")
    g = ground_of(e) or ground
    if g is None:
        raise GroundSetMismatch("ground set unresolved; pass one explicitly")
    return [p for p in universe(g, bound) if member(e, p)]


def structural_constant(e: SetExpr) -> int:
    """Largest integer constant mentioned by the expression tree."""
    if isinstance(e, Finite):
        return max((max(p) if isinstance(p, tuple) else p for p in e.points), default=0)
    if isinstance(e, CoFinite):
        return max((max(p) if isinstance(p, tuple) else p for p in e.holes), default=0)
    if isinstance(e, (Column, BandFrom, Block)):
        return e.n
    if isinstance(e, Row):
        return e.m
    if isinstance(e, Stride):
        return max(e.start, e.step)
    if isinstance(e, (Union, Inter, Diff)):
        return max(structural_constant(e.left), structural_constant(e.right))
    if isinstance(e, Complement):
        return structural_constant(e.inner)
    if isinstance(e, (Preimage, Image)):
        return structural_constant(e.inner)
    if isinstance(e, (BlockUnion, PartitionUnion)):
        return structural_constant(e.index)
    if isinstance(e, SelectorSchema):
        return e.k
    raise TypeError(f"not a SetExpr: {e!r}")
