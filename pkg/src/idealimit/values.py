"""Exact semantic summaries of set expressions.

Two abstract views back the exact deciders:

* an eventually periodic view (EPSet) for sets of naturals built from finite,
  cofinite and stride parts;
* a block view: explicit traces on finitely many blocks L_n plus a tail rule
  "block n is full iff n lies in an index set", itself a summarized value.

A NatVal carries whichever views survive the construction (plus a pointwise
membership function that always works); pairs expressions get a per-column
summary whose column traces are NatVals.  A query answers True/False, or None
when no surviving view can decide it; deciders translate None into the
Unknown verdict instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from . import registry
from .epsets import EPSet
from .errors import GroundSetMismatch, SchematicExpression
from .grounds import BLOCKS, BLOCK_MATERIALIZE_CAP, Ground, block_members_frozen
from .setexpr import (
    BandFrom,
    Block,
    BlockUnion,
    CoFinite,
    Column,
    Complement,
    Diff,
    Finite,
    Image,
    Inter,
    PartitionUnion,
    Preimage,
    Row,
    SelectorSchema,
    SetExpr,
    Stride,
    Union,
    ground_of,
    member,
)


@dataclass(eq=False)
class BlockView:
    excepts: dict
    tail: "NatVal"


@dataclass(eq=False)
class NatVal:
    mem: Callable[[int], bool]
    ep: Optional[EPSet]
    bv: Optional[BlockView]


def _materializable(n: int) -> bool:
    return n < BLOCK_MATERIALIZE_CAP


def nv_from_ep(ep: EPSet) -> NatVal:
    return NatVal(ep.member, ep, None)


def nv_empty() -> NatVal:
    ep = EPSet.empty()
    return NatVal(ep.member, ep, BlockView({}, nv_from_ep(EPSet.empty())))


def nv_full() -> NatVal:
    ep = EPSet.full()
    return NatVal(ep.member, ep, BlockView({}, nv_from_ep(EPSet.full())))


def nv_finite(points) -> NatVal:
    pts = frozenset(points)
    ep = EPSet.from_finite(pts)
    bv = None
    touched = {BLOCKS.block_index(x) for x in pts}
    if all(_materializable(n) for n in touched):
        excepts = {
            n: frozenset(x for x in pts if BLOCKS.block_index(x) == n) for n in touched
        }
        bv = BlockView(excepts, nv_empty())
    return NatVal(ep.member, ep, bv)


def nv_cofinite(holes) -> NatVal:
    hs = frozenset(holes)
    ep = EPSet.from_cofinite(hs)
    bv = None
    touched = {BLOCKS.block_index(x) for x in hs}
    if all(_materializable(n) for n in touched):
        excepts = {n: block_members_frozen(n) - hs for n in touched}
        bv = BlockView(excepts, nv_from_ep(EPSet.from_cofinite(touched)))
    return NatVal(ep.member, ep, bv)


def nv_block_union(index: NatVal) -> NatVal:
    """Union of blocks L_n over an index set."""
    bv = BlockView({}, index)
    mem = lambda x: index.mem(BLOCKS.block_index(x))
    ep = None
    if nv_is_finite(index) is True:
        ixs = nv_members_all(index)
        if ixs is not None and all(_materializable(n) for n in ixs):
            pts = set()
            for n in ixs:
                pts |= block_members_frozen(n)
            ep = EPSet.from_finite(pts)
    elif nv_is_cofinite(index) is True:
        holes_ix = nv_members_all(nv_compl(index))
        if holes_ix is not None and all(_materializable(n) for n in holes_ix):
            holes = set()
            for n in holes_ix:
                holes |= block_members_frozen(n)
            ep = EPSet.from_cofinite(holes)
    return NatVal(mem, ep, bv)


# -- queries (True / False / None) --------------------------------------


def nv_is_finite(v: NatVal):
    if v.ep is not None:
        return v.ep.is_finite()
    if v.bv is not None:
        return nv_is_finite(v.bv.tail)
    return None


def nv_is_empty(v: NatVal):
    if v.ep is not None:
        return v.ep.is_empty()
    if v.bv is not None:
        if any(v.bv.excepts.values()):
            return False
        return nv_is_empty(v.bv.tail)
    return None


def nv_is_cofinite(v: NatVal):
    if v.ep is not None:
        return v.ep.is_cofinite()
    if v.bv is not None:
        return nv_is_cofinite(v.bv.tail)
    return None


def nv_block_traces_bounded(v: NatVal):
    """Is sup_n |S intersect L_n| finite?"""
    if v.ep is not None:
        return v.ep.is_finite()
    if v.bv is not None:
        fin = nv_is_finite(v.bv.tail)
        if fin is None:
            return None
        return fin
    return None


def nv_eventual(v: NatVal):
    """Eventual membership value: True (cofinite), False (finite), else None."""
    cf = nv_is_cofinite(v)
    if cf is True:
        return True
    fin = nv_is_finite(v)
    if fin is True:
        return False
    return None


def nv_boundary(v: NatVal):
    """Explicit finite list of points where membership differs from eventual."""
    ev = nv_eventual(v)
    if ev is False:
        return nv_members_all(v)
    if ev is True:
        return nv_members_all(nv_compl(v))
    return None


def nv_members_all(v: NatVal):
    """Sorted members of a finite value, or None if not enumerable."""
    if v.ep is not None:
        if not v.ep.is_finite():
            return None
        return v.ep.members_all()
    if v.bv is not None:
        if nv_is_finite(v.bv.tail) is not True:
            return None
        ixs = nv_members_all(v.bv.tail)
        if ixs is None or not all(_materializable(n) for n in ixs):
            return None
        pts = set()
        for n in ixs:
            pts |= block_members_frozen(n)
        for n, tr in v.bv.excepts.items():
            pts -= block_members_frozen(n)
            pts |= tr
        return sorted(pts)
    return None


def nv_members_below(v: NatVal, bound: int):
    return [x for x in range(bound) if v.mem(x)]


# -- boolean algebra -----------------------------------------------------


def _trace_at(v: NatVal, n: int):
    """Explicit trace of a BV-backed value on block n (requires bv)."""
    bv = v.bv
    if n in bv.excepts:
        return bv.excepts[n]
    if not _materializable(n):
        return None
    return block_members_frozen(n) if bv.tail.mem(n) else frozenset()


def _bv_binop(a: NatVal, b: NatVal, setop, ixop) -> Optional[BlockView]:
    if a.bv is None or b.bv is None:
        return None
    keys = set(a.bv.excepts) | set(b.bv.excepts)
    if not all(_materializable(n) for n in keys):
        return None
    excepts = {}
    for n in keys:
        ta = _trace_at(a, n)
        tb = _trace_at(b, n)
        if ta is None or tb is None:
            return None
        excepts[n] = setop(ta, tb)
    return BlockView(excepts, ixop(a.bv.tail, b.bv.tail))


def nv_union(a: NatVal, b: NatVal) -> NatVal:
    mem = lambda x: a.mem(x) or b.mem(x)
    ep = a.ep.union(b.ep) if a.ep is not None and b.ep is not None else None
    bv = _bv_binop(a, b, lambda s, t: s | t, nv_union)
    return NatVal(mem, ep, bv)


def nv_inter(a: NatVal, b: NatVal) -> NatVal:
    mem = lambda x: a.mem(x) and b.mem(x)
    ep = a.ep.inter(b.ep) if a.ep is not None and b.ep is not None else None
    bv = _bv_binop(a, b, lambda s, t: s & t, nv_inter)
    return NatVal(mem, ep, bv)


def nv_diff(a: NatVal, b: NatVal) -> NatVal:
    mem = lambda x: a.mem(x) and not b.mem(x)
    ep = a.ep.diff(b.ep) if a.ep is not None and b.ep is not None else None
    bv = _bv_binop(a, b, lambda s, t: s - t, nv_diff)
    return NatVal(mem, ep, bv)


def nv_compl(a: NatVal) -> NatVal:
    mem = lambda x: not a.mem(x)
    ep = a.ep.complement() if a.ep is not None else None
    bv = None
    if a.bv is not None and all(_materializable(n) for n in a.bv.excepts):
        excepts = {n: block_members_frozen(n) - tr for n, tr in a.bv.excepts.items()}
        bv = BlockView(excepts, nv_compl(a.bv.tail))
    return NatVal(mem, ep, bv)


def nv_shift_up(a: NatVal, k: int) -> NatVal:
    mem = lambda x: x >= k and a.mem(x - k)
    ep = a.ep.shift_up(k) if a.ep is not None else None
    return NatVal(mem, ep, None)


def nv_shift_down(a: NatVal, k: int) -> NatVal:
    mem = lambda x: a.mem(x + k)
    ep = a.ep.shift_down(k) if a.ep is not None else None
    return NatVal(mem, ep, None)


# -- within-column transforms for the catalog maps -----------------------


def nv_double_pre(a: NatVal) -> NatVal:
    """{x : x // 2 in S} (preimage of halving)."""
    mem = lambda x: a.mem(x // 2)
    ep = a.ep.double_preimage() if a.ep is not None else None
    return NatVal(mem, ep, None)


def nv_halve_img(a: NatVal) -> NatVal:
    """{x // 2 : x in S}."""
    mem = lambda y: a.mem(2 * y) or a.mem(2 * y + 1)
    ep = a.ep.halve_image() if a.ep is not None else None
    return NatVal(mem, ep, None)


def nv_double_img(a: NatVal) -> NatVal:
    """{2x : x in S} (image under the least-lift section)."""
    mem = lambda y: y % 2 == 0 and a.mem(y // 2)
    ep = a.ep.double_image() if a.ep is not None else None
    return NatVal(mem, ep, None)


def nv_half_pre_even(a: NatVal) -> NatVal:
    """{x : 2x in S} (preimage under the least-lift section)."""
    mem = lambda x: a.mem(2 * x)
    ep = a.ep.half_preimage_even() if a.ep is not None else None
    return NatVal(mem, ep, None)


def _bs_apply(x: int) -> int:
    n = BLOCKS.block_index(x)
    if n == 0:
        return 0
    return BLOCKS.start(n - 1) + BLOCKS.position(x) // 2


def _bs_fiber(y: int):
    n = BLOCKS.block_index(y)
    i = BLOCKS.position(y)
    up = BLOCKS.start(n + 1)
    out = [up + 2 * i, up + 2 * i + 1]
    if y == 0:
        out = [0] + out
    return out


def nv_bs_pre(a: NatVal) -> NatVal:
    """Preimage under the block shift (2-to-1 from L_{n+1} onto L_n)."""
    mem = lambda x: a.mem(_bs_apply(x))
    bv = None
    if a.bv is not None:
        keys = {n + 1 for n in a.bv.excepts} | {0, 1}
        if all(_materializable(n) for n in keys):
            excepts = {}
            ok = True
            for m in keys:
                src = _trace_at(a, m - 1) if m >= 1 else None
                if m == 0:
                    excepts[0] = frozenset({0}) if a.mem(0) else frozenset()
                    continue
                if src is None:
                    ok = False
                    break
                excepts[m] = frozenset(
                    x for s in src for x in _bs_fiber(s) if BLOCKS.block_index(x) == m
                )
            if ok:
                bv = BlockView(excepts, nv_shift_up(a.bv.tail, 1))
    return NatVal(mem, None, bv)


def nv_bs_img(a: NatVal) -> NatVal:
    """Image under the block shift."""
    mem = lambda y: any(a.mem(x) for x in _bs_fiber(y))
    bv = None
    if a.bv is not None:
        keys = {n - 1 for n in a.bv.excepts if n >= 1} | {0}
        if all(_materializable(n + 1) for n in keys):
            excepts = {}
            ok = True
            for m in keys:
                if m == 0:
                    t0 = _trace_at(a, 0)
                    t1 = _trace_at(a, 1)
                    if t0 is None or t1 is None:
                        ok = False
                        break
                    excepts[0] = frozenset(_bs_apply(x) for x in (t0 | t1))
                    continue
                src = _trace_at(a, m + 1)
                if src is None:
                    ok = False
                    break
                excepts[m] = frozenset(_bs_apply(x) for x in src)
            if ok:
                bv = BlockView(excepts, nv_shift_down(a.bv.tail, 1))
    return NatVal(mem, None, bv)


def _bsl_apply(y: int) -> int:
    if y == 0:
        return 0
    n = BLOCKS.block_index(y)
    return BLOCKS.start(n + 1) + 2 * BLOCKS.position(y)


def nv_bsl_img(a: NatVal) -> NatVal:
    """Image under the least-lift section of the block shift."""
    return NatVal(lambda x: _bsl_mem_img(a, x), None, None)


def _bsl_fiber_src(x: int):
    if x == 0:
        return [0]
    n = BLOCKS.block_index(x)
    i = BLOCKS.position(x)
    if n >= 1 and i % 2 == 0:
        return [BLOCKS.start(n - 1) + i // 2]
    return []


def _bsl_mem_img(a: NatVal, x: int) -> bool:
    return any(a.mem(s) for s in _bsl_fiber_src(x))


def nv_bsl_pre(a: NatVal) -> NatVal:
    return NatVal(lambda y: a.mem(_bsl_apply(y)), None, None)


# -- pairs summaries -----------------------------------------------------


@dataclass(eq=False)
class PairsVal:
    excepts: dict
    tail: NatVal


def pv_trace(pv: PairsVal, n: int) -> NatVal:
    return pv.excepts.get(n, pv.tail)


def _pv_binop(a: PairsVal, b: PairsVal, op) -> PairsVal:
    keys = set(a.excepts) | set(b.excepts)
    excepts = {n: op(pv_trace(a, n), pv_trace(b, n)) for n in keys}
    return PairsVal(excepts, op(a.tail, b.tail))


def pv_compl(a: PairsVal) -> PairsVal:
    return PairsVal({n: nv_compl(t) for n, t in a.excepts.items()}, nv_compl(a.tail))


def pv_columnwise(a: PairsVal, fn) -> PairsVal:
    return PairsVal({n: fn(t) for n, t in a.excepts.items()}, fn(a.tail))


def pv_fanshift_pre(a: PairsVal) -> Optional[PairsVal]:
    """Preimage summary under the fan shift (n,0)->(0,n), (n,m)->(n+1,m-1)."""
    col0 = pv_trace(a, 0)
    ev0 = nv_eventual(col0)
    bnd0 = nv_boundary(col0)
    if ev0 is None or bnd0 is None:
        return None

    def shifted(n: int) -> NatVal:
        src = pv_trace(a, n + 1)
        out = nv_shift_up(src, 1)
        if col0.mem(n):
            out = nv_union(out, nv_finite({0}))
        return out

    tail = nv_shift_up(a.tail, 1)
    if ev0:
        tail = nv_union(tail, nv_finite({0}))
    keys = {n - 1 for n in a.excepts if n >= 1} | set(bnd0)
    excepts = {n: shifted(n) for n in keys}
    return PairsVal(excepts, tail)


# -- evaluation ----------------------------------------------------------

_NAT_CACHE: dict = {}
_PAIRS_CACHE: dict = {}


def natval(e: SetExpr) -> NatVal:
    """Summary of a naturals-ground expression; mem is always usable."""
    if is_schematic_here(e):
        raise SchematicExpression("schematic expression has no summary")
    g = ground_of(e)
    if g is Ground.PAIRS:
        raise GroundSetMismatch("expression is over pairs")
    key = e
    if key in _NAT_CACHE:
        return _NAT_CACHE[key]
    v = _natval(e)
    _NAT_CACHE[key] = v
    return v


def _natval(e: SetExpr) -> NatVal:
    if isinstance(e, Finite):
        return nv_finite(e.points)
    if isinstance(e, CoFinite):
        return nv_cofinite(e.holes)
    if isinstance(e, Block):
        bv = BlockView({}, nv_finite({e.n}))
        ep = (
            EPSet.from_finite(block_members_frozen(e.n))
            if _materializable(e.n)
            else None
        )
        return NatVal(lambda x: BLOCKS.block_index(x) == e.n, ep, bv)
    if isinstance(e, BlockUnion):
        return nv_block_union(natval(e.index))
    if isinstance(e, Stride):
        return nv_from_ep(EPSet.from_stride(e.start, e.step))
    if isinstance(e, Union):
        return nv_union(natval(e.left), natval(e.right))
    if isinstance(e, Inter):
        return nv_inter(natval(e.left), natval(e.right))
    if isinstance(e, Diff):
        return nv_diff(natval(e.left), natval(e.right))
    if isinstance(e, Complement):
        return nv_compl(natval(e.inner))
    if isinstance(e, (Preimage, Image)):
        m = registry.get_map(e.map_id)
        hook = m.pre_val if isinstance(e, Preimage) else m.img_val
        out = hook(natval(e.inner)) if hook is not None else None
        if out is not None:
            return out
        return NatVal(lambda x: member(e, x), None, None)
    if isinstance(e, PartitionUnion):
        part = registry.get_partition(e.partition_id)
        return part.nat_union_val(natval(e.index))
    raise GroundSetMismatch(f"cannot summarize {type(e).__name__} over the naturals")


def pairsval(e: SetExpr) -> Optional[PairsVal]:
    """Column summary of a pairs-ground expression, or None when blocked."""
    if is_schematic_here(e):
        raise SchematicExpression("schematic expression has no summary")
    key = e
    if key in _PAIRS_CACHE:
        return _PAIRS_CACHE[key]
    v = _pairsval(e)
    _PAIRS_CACHE[key] = v
    return v


def _pairsval(e: SetExpr) -> Optional[PairsVal]:
    if isinstance(e, Finite):
        cols = {}
        for (n, m) in e.points:
            cols.setdefault(n, set()).add(m)
        return PairsVal({n: nv_finite(ms) for n, ms in cols.items()}, nv_empty())
    if isinstance(e, CoFinite):
        cols = {}
        for (n, m) in e.holes:
            cols.setdefault(n, set()).add(m)
        return PairsVal({n: nv_cofinite(ms) for n, ms in cols.items()}, nv_full())
    if isinstance(e, Column):
        return PairsVal({e.n: nv_full()}, nv_empty())
    if isinstance(e, Row):
        return PairsVal({}, nv_finite({e.m}))
    if isinstance(e, BandFrom):
        return PairsVal({i: nv_empty() for i in range(e.n)}, nv_full())
    if isinstance(e, (Union, Inter, Diff)):
        a = pairsval(e.left)
        b = pairsval(e.right)
        if a is None or b is None:
            return None
        op = {Union: nv_union, Inter: nv_inter, Diff: nv_diff}[type(e)]
        return _pv_binop(a, b, op)
    if isinstance(e, Complement):
        a = pairsval(e.inner)
        return pv_compl(a) if a is not None else None
    if isinstance(e, (Preimage, Image)):
        m = registry.get_map(e.map_id)
        if isinstance(e, Preimage) and m.pre_from_nat is not None:
            return m.pre_from_nat(natval(e.inner))
        hook = m.pre_val if isinstance(e, Preimage) else m.img_val
        if hook is None:
            return None
        inner = pairsval(e.inner)
        return hook(inner) if inner is not None else None
    if isinstance(e, PartitionUnion):
        return None
    raise GroundSetMismatch(f"cannot summarize {type(e).__name__} over pairs")


def is_schematic_here(e: SetExpr) -> bool:
    from .setexpr import is_schematic

    return is_schematic(e)


def clear_caches() -> None:
    _NAT_CACHE.clear()
    _PAIRS_CACHE.clear()


# -- the per-column finiteness analysis ----------------------------------


@dataclass(frozen=True)
class FiniteTrace:
    points: tuple


@dataclass(frozen=True)
class CofiniteTrace:
    holes: tuple


def column_profile(e: SetExpr, n: int):
    """Classify {m : (n, m) in e} as finite, cofinite with listed holes, or
    None (unknown, when an image over a non-column-preserving map blocks the
    analysis)."""
    pv = pairsval(e)
    if pv is None:
        return None
    t = pv_trace(pv, n)
    fin = nv_is_finite(t)
    if fin is True:
        pts = nv_members_all(t)
        if pts is not None:
            return FiniteTrace(tuple(pts))
        return None
    cof = nv_is_cofinite(t)
    if cof is True:
        holes = nv_members_all(nv_compl(t))
        if holes is not None:
            return CofiniteTrace(tuple(holes))
    return None
