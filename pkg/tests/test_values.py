"""Soundness of the summary layer: views agree with pointwise semantics and
queries never contradict long-window evidence."""

from idealimit.corpus import expressions
from idealimit.grounds import BLOCKS, Ground, universe
from idealimit.setexpr import member
from idealimit.values import (
    natval,
    nv_block_traces_bounded,
    nv_is_cofinite,
    nv_is_empty,
    nv_is_finite,
    nv_members_all,
    pairsval,
    pv_trace,
)

PROBE = 300


def test_natval_views_pointwise():
    # block-view contract: exceptional blocks are explicit, every other
    # block is full or empty according to the tail index set
    for e in expressions(11, Ground.NAT, 80, depth=3):
        v = natval(e)
        for x in range(PROBE):
            want = member(e, x)
            assert v.mem(x) == want
            if v.ep is not None:
                assert v.ep.member(x) == want
            if v.bv is not None:
                n = BLOCKS.block_index(x)
                if n in v.bv.excepts:
                    assert (x in v.bv.excepts[n]) == want
                else:
                    assert v.bv.tail.mem(n) == want, (e, x)


def test_natval_query_soundness():
    for e in expressions(12, Ground.NAT, 80, depth=3):
        v = natval(e)
        pts = [x for x in range(PROBE) if member(e, x)]
        fin = nv_is_finite(v)
        if fin is True:
            members = nv_members_all(v)
            assert members is not None
            assert [x for x in members if x < PROBE] == pts
        if fin is False:
            # infinitely many members: the probe window cannot be empty-tailed
            assert any(member(e, x) for x in range(PROBE, PROBE + 4000))or pts
        if nv_is_empty(v) is True:
            assert pts == []
        if nv_is_cofinite(v) is True:
            missing = [x for x in range(PROBE) if not member(e, x)]
            assert len(missing) < PROBE // 2


def test_block_trace_boundedness_vs_window():
    for e in expressions(13, Ground.NAT, 80, depth=3):
        v = natval(e)
        flag = nv_block_traces_bounded(v)
        if flag is None:
            continue
        traces = []
        for n in range(11):
            traces.append(sum(1 for y in BLOCKS.members(n) if member(e, y)))
        if flag is False:
            # unbounded traces must already be visible by block 10
            assert max(traces) >= 8, traces
        if flag is True:
            # bounded: late blocks cannot keep doubling
            assert traces[-1] <= max(8, 2 * max(traces[:-1]) if traces[:-1] else 0) or traces[-1] <= 64


def test_pairsval_traces_pointwise():
    for e in expressions(14, Ground.PAIRS, 80, depth=3):
        pv = pairsval(e)
        if pv is None:
            continue
        for n in range(10):
            t = pv_trace(pv, n)
            for m in range(80):
                assert t.mem(m) == member(e, (n, m)), (e, n, m)


def test_pairsval_tail_uniform():
    # all non-exceptional columns share the tail trace
    for e in expressions(15, Ground.PAIRS, 60, depth=3):
        pv = pairsval(e)
        if pv is None:
            continue
        cols = [n for n in range(12) if n not in pv.excepts]
        for m in range(40):
            vals = {member(e, (n, m)) for n in cols}
            assert len(vals) <= 1 or m > 100
            if cols:
                assert pv.tail.mem(m) == member(e, (cols[0], m))
