"""Ideal catalog, combinators, exact deciders and constructive partitions.

Every decide answer is exact: In and Positive are only returned when the
summary layer (values.py) proves membership or positivity; everything the
closed analysis cannot settle comes back Unknown rather than guessed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

from . import registry
from .epsets import EPSet
from .errors import (
    GroundSetMismatch,
    NotPositive,
    SchematicExpression,
    UnsupportedIdeal,
)
from .grounds import BLOCKS, Ground, block_members_frozen, element, index
from .setexpr import (
    BandFrom,
    Block,
    BlockUnion,
    Column,
    Complement,
    Finite,
    Inter,
    PartitionUnion,
    Row,
    SelectorSchema,
    SetExpr,
    Stride,
    Union,
    full,
    ground_of,
    is_schematic,
    member,
)
from .values import (
    natval,
    nv_block_traces_bounded,
    nv_block_union,
    nv_is_empty,
    nv_is_finite,
    pairsval,
)
from .verdicts import EXACT, IN, POSITIVE, UNKNOWN, Certificate, Verdict, V, tri


# -- handles -------------------------------------------------------------


@dataclass(frozen=True)
class IdealHandle:
    kind: str
    ground: Ground
    k: int = 0
    map_id: str | None = None
    inner: "IdealHandle | None" = None
    within: SetExpr | None = None

    def name(self) -> str:
        if self.kind == "faniter":
            return f"faniter:{self.k}"
        if self.kind == "unioniter":
            return f"unioniter:{self.map_id}"
        if self.kind == "restrict":
            return f"restrict({self.inner.name()})"
        if self.kind == "dualview":
            return f"dual({self.inner.name()})"
        return self.kind


FIN = IdealHandle("fin", Ground.NAT)
FIN_PAIRS = IdealHandle("fin", Ground.PAIRS)
FINXFIN = IdealHandle("finxfin", Ground.PAIRS)
BLOCKBOUNDED = IdealHandle("blockbounded", Ground.NAT)
COLBLOCK = IdealHandle("colblock", Ground.PAIRS)
FANCOLSFIN = IdealHandle("faniter", Ground.PAIRS, k=0)


def faniter(k: int) -> IdealHandle:
    return IdealHandle("faniter", Ground.PAIRS, k=k)


def unioniter(map_id: str = "fanshift", kmax: int = 8) -> IdealHandle:
    return IdealHandle("unioniter", Ground.PAIRS, k=kmax, map_id=map_id)


def restrict(inner: IdealHandle, within: SetExpr) -> IdealHandle:
    if decide(inner, within).value is not V.POSITIVE:
        raise NotPositive("restriction carrier must be positive for the inner ideal")
    return IdealHandle("restrict", inner.ground, inner=inner, within=within)


def dual_view(inner: IdealHandle) -> IdealHandle:
    return IdealHandle("dualview", inner.ground, inner=inner)


def catalog() -> dict:
    return {
        "fin": FIN,
        "finxfin": FINXFIN,
        "blockbounded": BLOCKBOUNDED,
        "colblock": COLBLOCK,
        "fandual": FANCOLSFIN,
    }


# -- the deciders ---------------------------------------------------------


def decide(I: IdealHandle, e: SetExpr) -> Verdict:
    """Tri-valued exact membership of the denoted set in the ideal."""
    g = ground_of(e)
    if g is not None and g is not I.ground:
        raise GroundSetMismatch(f"{I.name()} lives on {I.ground}, expression on {g}")
    if I.kind == "restrict":
        return decide(I.inner, Inter(e, I.within))
    if I.kind == "dualview":
        return decide(I.inner, Complement(e))
    if is_schematic(e):
        return _decide_schema(I, e)
    if isinstance(e, PartitionUnion):
        v = _decide_partition_union(I, e)
        if v is not None:
            return v
    if I.kind == "fin":
        return _decide_fin(e, I.ground)
    if I.kind == "finxfin":
        pv = pairsval(e)
        if pv is None:
            return UNKNOWN
        return tri(nv_is_finite(pv.tail))
    if I.kind == "blockbounded":
        return tri(nv_block_traces_bounded(natval(e)))
    if I.kind == "colblock":
        pv = pairsval(e)
        if pv is None:
            return UNKNOWN
        flags = [nv_block_traces_bounded(t) for t in pv.excepts.values()]
        flags.append(nv_block_traces_bounded(pv.tail))
        return _all_tri(flags)
    if I.kind == "faniter":
        pv = pairsval(e)
        if pv is None:
            return UNKNOWN
        flags = [nv_is_finite(t) for n, t in pv.excepts.items() if n >= I.k]
        flags.append(nv_is_finite(pv.tail))
        return _all_tri(flags)
    if I.kind == "unioniter":
        return _decide_unioniter(I, e)
    if I.kind == "opaque":
        return UNKNOWN
    raise UnsupportedIdeal(f"no decider for {I.kind}")


def _all_tri(flags) -> Verdict:
    if any(f is False for f in flags):
        return POSITIVE
    if all(f is True for f in flags):
        return IN
    return UNKNOWN


def _decide_fin(e: SetExpr, ground: Ground) -> Verdict:
    if ground is Ground.NAT:
        return tri(nv_is_finite(natval(e)))
    pv = pairsval(e)
    if pv is None:
        return UNKNOWN
    tail_empty = nv_is_empty(pv.tail)
    col_fin = [nv_is_finite(t) for t in pv.excepts.values()]
    if tail_empty is False:
        return POSITIVE
    if any(f is False for f in col_fin):
        return POSITIVE
    if tail_empty is True and all(f is True for f in col_fin):
        return IN
    return UNKNOWN


def _decide_unioniter(I: IdealHandle, e: SetExpr) -> Verdict:
    """Dual ideal of the union of the iterated filters f^k(F).

    Membership holds iff some iterate's dual ideal contains the set; the
    chain law makes the existential monotone, and for the fan shift the
    closed form settles the negative side too.
    """
    for k in range(I.k + 1):
        if decide(faniter(k), e).value is V.IN:
            return IN
    if I.map_id == "fanshift":
        return decide(FINXFIN, e)
    return UNKNOWN


def _decide_schema(I: IdealHandle, e: SetExpr) -> Verdict:
    """Universal semantics: In only when every instantiation is In.

    The empty set instantiates every schema, so a universal Positive can
    never be established; answers are In or Unknown.
    """
    if not isinstance(e, SelectorSchema):
        return UNKNOWN
    part = registry.get_partition(e.partition_id)
    if part.ground is not I.ground:
        raise GroundSetMismatch("schema partition lives on a different ground set")
    if I.kind == "blockbounded" and part.block_meet_bound is not None:
        # any selector meets L_n in at most k * bound points
        return IN
    if I.kind == "colblock" and part.kind == "colblock":
        # one block per (column, L_n) pair: every column trace is k-bounded
        return IN
    if I.kind == "faniter" and part.column_meet_bound is not None:
        return IN
    if I.kind == "finxfin" and part.column_meet_bound is not None:
        return IN
    return UNKNOWN


def _decide_partition_union(I: IdealHandle, e: PartitionUnion) -> Verdict | None:
    part = registry.get_partition(e.partition_id)
    if part.ground is not I.ground:
        raise GroundSetMismatch("partition union over a different ground set")
    if part.ground is Ground.NAT:
        return None  # summary layer handles these exactly
    ixv = natval(e.index)
    fin = nv_is_finite(ixv)
    if I.kind == "fin":
        # blocks are finite and pairwise disjoint, so the union is finite
        # exactly when the index family is
        return tri(fin)
    if part.contained_cols is not None:
        if I.kind in ("finxfin", "unioniter"):
            return IN  # only the finitely many listed columns can be infinite
        if I.kind == "faniter":
            if all(c < I.k for c in part.contained_cols):
                return IN
            if fin is True:
                return IN
            if fin is False and all(c >= I.k for c in part.contained_cols):
                return POSITIVE  # pigeonhole: some listed column is infinite
            return UNKNOWN
        if I.kind == "colblock" and part.kind == "col0":
            return tri(nv_block_traces_bounded(ixv))
        return None
    if part.kind in ("triangle", "colblock", "shells"):
        if I.kind in ("finxfin", "unioniter", "faniter"):
            return tri(fin)
        if I.kind == "colblock":
            if part.kind == "colblock":
                return tri(fin)
            return tri(nv_block_traces_bounded(ixv))
    return None


def dual_member(I: IdealHandle, e: SetExpr) -> Verdict:
    """Membership of e in the dual filter I*: In iff the complement is In I."""
    if is_schematic(e):
        raise SchematicExpression("dual membership needs a concrete expression")
    return decide(I, Complement(e))


# -- generator families ---------------------------------------------------


def in_generators(I: IdealHandle, span: int = 3):
    """A finite parametrized family of sets In the ideal.

    These drive the exact quantifications of the continuity / Katetov
    checks: "for every generator" stands in for "for every ideal set".
    """
    if I.kind == "restrict":
        return [Inter(g, I.within) for g in in_generators(I.inner, span)]
    if I.kind == "fin" and I.ground is Ground.NAT:
        return [Finite(frozenset()), Finite(frozenset(range(span))), Finite(frozenset({0, 5}))]
    if I.kind == "fin" and I.ground is Ground.PAIRS:
        return [Finite(frozenset()), Finite(frozenset({(0, 0), (1, 2)}))]
    if I.kind in ("finxfin", "unioniter"):
        out = [Finite(frozenset({(0, 1), (2, 2)}))]
        out += [Column(j) for j in range(span)]
        out += [Complement(BandFrom(c)) for c in range(1, span)]
        out.append(Union(Column(1), Finite(frozenset({(4, 0)}))))
        return out
    if I.kind == "faniter":
        out = [Finite(frozenset({(0, 1), (3, 3)}))]
        out += [Row(m) for m in range(span)]
        out.append(Union(Row(0), Finite(frozenset({(2, 5)}))))
        if I.k > 0:
            out.append(Union(Column(0), Row(1)))
        return out
    if I.kind == "blockbounded":
        return [
            Finite(frozenset({0, 3})),
            Block(2),
            Union(Block(0), Block(3)),
            BlockUnion(Finite(frozenset({1, 4}))),
        ]
    if I.kind == "colblock":
        return [
            Finite(frozenset({(0, 1)})),
            Row(0),
            Row(3),
            Union(Row(1), Finite(frozenset({(2, 7)}))),
        ]
    if I.kind == "dualview":
        return [Complement(g) for g in in_generators(I.inner, span)]
    raise UnsupportedIdeal(f"no generator family for {I.kind}")


def filter_generators(I: IdealHandle, span: int = 3):
    """Generators of the dual filter: complements of In generators."""
    return [Complement(g) for g in in_generators(I, span)]


# -- partitions -----------------------------------------------------------


@dataclass(frozen=True)
class JNTPartition:
    """A partition into finite blocks, with enough structure for the deciders.

    block_meet_bound bounds how many blocks can meet a single L_n (naturals
    partitions); column_meet_bound bounds how many blocks meet one column
    (pairs partitions); contained_cols confines the whole partition to a
    fixed finite set of columns.  None means unbounded / not applicable.
    """

    pid: str
    ground: Ground
    kind: str
    block_meet_bound: int | None = None
    column_meet_bound: int | None = None
    contained_cols: frozenset | None = None
    ideal: IdealHandle | None = None

    def block_of(self, n: int) -> frozenset:
        if self.kind == "singletons":
            if self.ground is Ground.PAIRS:
                return frozenset({element(Ground.PAIRS, n)})
            return frozenset({n})
        if self.kind == "blocks":
            return block_members_frozen(n)
        if self.kind == "triangle":
            return frozenset((i, n) for i in range(n + 1))
        if self.kind == "shells":
            return frozenset((i, n) for i in range(n + 1)) | frozenset(
                (n, j) for j in range(n)
            )
        if self.kind == "colblock":
            core = frozenset((i, m) for i in range(n + 1) for m in BLOCKS.members(n))
            pad = frozenset((n, m) for m in range(BLOCKS.start(n)))
            return core | pad
        if self.kind == "col0":
            return frozenset({(0, n)})
        raise UnsupportedIdeal(f"partition kind {self.kind} has no block map")

    def block_index(self, p):
        if self.kind == "singletons":
            if self.ground is Ground.PAIRS:
                return index(Ground.PAIRS, p)
            return p
        if self.kind == "blocks":
            return BLOCKS.block_index(p)
        if self.kind == "triangle":
            i, m = p
            return m if i <= m else None
        if self.kind == "shells":
            return max(p)
        if self.kind == "colblock":
            i, m = p
            nb = BLOCKS.block_index(m)
            return nb if i <= nb else i
        if self.kind == "col0":
            i, m = p
            return m if i == 0 else None
        raise UnsupportedIdeal(f"partition kind {self.kind} has no index map")

    def nat_union_val(self, ixv):
        if self.kind == "singletons":
            return ixv
        if self.kind == "blocks":
            return nv_block_union(ixv)
        raise GroundSetMismatch(f"partition {self.pid} is not over the naturals")

    def union_expr(self, index: SetExpr) -> SetExpr:
        """Union of the blocks over an index family, as a set expression."""
        if self.kind == "singletons":
            return index
        if self.kind == "blocks":
            return BlockUnion(index)
        return PartitionUnion(self.pid, index)


PART_SINGLETONS = JNTPartition("singletons", Ground.NAT, "singletons")
PART_SINGLETONS_PAIRS = JNTPartition("singletonpairs", Ground.PAIRS, "singletons")
PART_L = JNTPartition("L", Ground.NAT, "blocks", block_meet_bound=1)
PART_TRIANGLE = JNTPartition("triangle", Ground.PAIRS, "triangle")
PART_SHELLS = JNTPartition("shells", Ground.PAIRS, "shells")
PART_COLBLOCK = JNTPartition("colblock", Ground.PAIRS, "colblock")
PART_COL0 = JNTPartition("col0", Ground.PAIRS, "col0", contained_cols=frozenset({0}))

for _p in (
    PART_SINGLETONS,
    PART_SINGLETONS_PAIRS,
    PART_L,
    PART_TRIANGLE,
    PART_SHELLS,
    PART_COLBLOCK,
    PART_COL0,
):
    registry.register_partition(_p)


def jnt_partition(I: IdealHandle) -> JNTPartition:
    """The constructive Jalali-Naini/Talagrand partition for a catalog ideal."""
    table = {
        "fin": PART_SINGLETONS,
        "blockbounded": PART_L,
        "finxfin": PART_TRIANGLE,
        "colblock": PART_COLBLOCK,
    }
    if I.kind not in table:
        raise UnsupportedIdeal(f"no constructive partition registered for {I.name()}")
    return replace(table[I.kind], ideal=I)


def verify_jnt(P: JNTPartition, index_families) -> Certificate:
    """Check the Talagrand property on the supplied infinite index families."""
    if P.ideal is None:
        raise UnsupportedIdeal("partition carries no ideal reference")
    parts = []
    for fam in index_families:
        label = f"union over {type(fam).__name__}"
        inf = decide(FIN, fam)
        if inf.value is not V.POSITIVE:
            parts.append(
                Certificate(label, False, EXACT, witness={"reason": "index family not infinite"})
            )
            continue
        u = P.union_expr(fam)
        v = decide(P.ideal, u)
        ok = True if v.value is V.POSITIVE else (False if v.value is V.IN else None)
        parts.append(Certificate(label, ok, EXACT, witness={"verdict": v.render()}))
    cert = Certificate(
        claim=f"jnt-property({P.pid}, {P.ideal.name()})",
        ok=_conj(parts),
        tier=EXACT,
        params={"families": len(parts)},
        details=tuple(c.summary() for c in parts),
    )
    return cert


def _conj(parts):
    if any(c.ok is False for c in parts):
        return False
    if all(c.ok is True for c in parts):
        return True
    return None


# -- the Lemma 3.2 splitter ------------------------------------------------


def ep_to_expr(ep: EPSet) -> SetExpr:
    """Rebuild an eventually periodic index set as a set expression."""
    ep = ep.normalize()
    expr: SetExpr = Finite(frozenset(ep.prefix), Ground.NAT)
    for r in sorted(ep.residues):
        first = ep.threshold + ((r - ep.threshold) % ep.period)
        expr = Union(expr, Stride(first, ep.period))
    return expr


def split_positive(I: IdealHandle, e: SetExpr, G: JNTPartition, budget: int):
    """Split a positive set in two positive halves along a finite partition.

    Mirrors the recursive construction: alternately absorb whole blocks of
    the ideal's JNT partition (through the G-blocks covering them) into the
    two sides, then close off with a parity rule on untouched G-indices.
    """
    if decide(I, e).value is not V.POSITIVE:
        raise NotPositive("split requires an ideal-positive set")
    K = jnt_partition(I)
    assigned: dict = {}
    side = 0
    rounds = 0
    max_idx = -1
    for i in itertools.count():
        if rounds >= budget or i >= 4 * budget:
            break
        ki = [p for p in K.block_of(i) if member(e, p)]
        if not ki:
            continue
        cover = {G.block_index(p) for p in ki}
        if None in cover or any(g in assigned for g in cover):
            continue
        for g in cover:
            assigned[g] = side
        max_idx = max(max_idx, max(cover))
        side = 1 - side
        rounds += 1
    t = max_idx + 1
    prefix = frozenset(g for g, s in assigned.items() if s == 0)
    b_ep = EPSet(t, frozenset(x for x in prefix if x < t), 2, frozenset({t % 2}))
    b_expr = ep_to_expr(b_ep)
    nb_expr = Complement(b_expr)
    vb = decide(I, G.union_expr(b_expr))
    vnb = decide(I, G.union_expr(nb_expr))
    ok: bool | None
    if vb.value is V.POSITIVE and vnb.value is V.POSITIVE:
        ok = True
    elif vb.value is V.UNKNOWN or vnb.value is V.UNKNOWN:
        ok = None
    else:
        ok = False
    cert = Certificate(
        claim=f"split-positive({I.name()}, {G.pid})",
        ok=ok,
        tier=EXACT,
        params={"budget": budget, "rounds": rounds},
        witness={"side": vb.render(), "other": vnb.render()},
    )
    return b_expr, cert


def positive_carrier(I: IdealHandle) -> SetExpr:
    return full(I.ground)
