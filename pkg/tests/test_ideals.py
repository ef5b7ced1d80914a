"""Exact deciders, duality, partitions and the splitter."""

import dataclasses

import pytest

from idealimit import registry
from idealimit.corpus import expressions
from idealimit.dsl import parse, to_text
from idealimit.errors import NotPositive, UnsupportedIdeal
from idealimit.grounds import BLOCKS, Ground
from idealimit.ideals import (
    BLOCKBOUNDED,
    COLBLOCK,
    FANCOLSFIN,
    FIN,
    FIN_PAIRS,
    FINXFIN,
    PART_COL0,
    decide,
    dual_member,
    dual_view,
    faniter,
    in_generators,
    jnt_partition,
    restrict,
    split_positive,
    unioniter,
    verify_jnt,
)
from idealimit.setexpr import (
    BandFrom,
    Block,
    BlockUnion,
    CoFinite,
    Column,
    Complement,
    Diff,
    Finite,
    Inter,
    SelectorSchema,
    Stride,
    Union,
    full,
    member,
    truncate,
)
from idealimit.verdicts import V

CATALOG = (FIN, FINXFIN, BLOCKBOUNDED, COLBLOCK, FANCOLSFIN, faniter(2), unioniter())


def test_freeness_and_nontriviality():
    for I in CATALOG:
        fin_set = (
            Finite(frozenset({0, 3, 7}), Ground.NAT)
            if I.ground is Ground.NAT
            else Finite(frozenset({(0, 0), (2, 5)}), Ground.PAIRS)
        )
        assert decide(I, fin_set).value is V.IN
        assert decide(I, full(I.ground)).value is V.POSITIVE


def test_decide_examples():
    assert decide(FINXFIN, Column(5)).value is V.IN
    # the displayed band family is positive: each member keeps infinitely
    # many infinite columns (the printed sign in the source display is off)
    assert decide(FINXFIN, BandFrom(3)).value is V.POSITIVE
    assert decide(BLOCKBOUNDED, SelectorSchema("L", 1)).value is V.IN
    assert decide(BLOCKBOUNDED, BlockUnion(CoFinite(frozenset({0}), Ground.NAT))).value is V.POSITIVE


def test_decide_windows_corroborate():
    # Positive block-union: trace counts grow through the windows
    e = BlockUnion(CoFinite(frozenset({0}), Ground.NAT))
    counts = []
    for N in (32, 64, 128):
        pts = truncate(e, N, Ground.NAT)
        per = {}
        for x in pts:
            per[BLOCKS.block_index(x)] = per.get(BLOCKS.block_index(x), 0) + 1
        full_blocks = [n for n, c in per.items() if c == BLOCKS.size(n)]
        counts.append(max(per.values()))
    assert counts[0] < counts[1] < counts[2]


def test_dual_member_examples():
    assert dual_member(FINXFIN, Complement(Finite(frozenset({(0, 0)})))).value is V.IN
    assert dual_member(FIN, CoFinite(frozenset({1, 2}), Ground.NAT)).value is V.IN
    # complement of a column fails the fan filter at that column
    assert dual_member(FANCOLSFIN, Complement(Column(2))).value is V.POSITIVE


def test_colblock_decides():
    from idealimit.setexpr import Row

    assert decide(COLBLOCK, Row(3)).value is V.IN
    assert decide(COLBLOCK, Column(2)).value is V.POSITIVE
    assert decide(COLBLOCK, Finite(frozenset({(1, 1)}))).value is V.IN
    assert decide(COLBLOCK, BandFrom(4)).value is V.POSITIVE


def test_faniter_closed_form():
    I3 = faniter(3)
    # columns below the cut are unconstrained
    assert decide(I3, Column(1)).value is V.IN
    assert decide(I3, Column(5)).value is V.POSITIVE
    assert decide(I3, Union(Column(0), Column(2))).value is V.IN


def test_unioniter_matches_dual_of_finxfin():
    U = unioniter("fanshift", 8)
    for e in expressions(21, Ground.PAIRS, 120, depth=3):
        a = decide(U, e)
        b = decide(FINXFIN, e)
        if V.UNKNOWN in (a.value, b.value):
            continue
        assert a.value is b.value, to_text(e)


def test_duality_involution_corpus():
    for I in (FINXFIN, BLOCKBOUNDED, FANCOLSFIN):
        D = dual_view(I)
        for e in expressions(22, I.ground, 100, depth=2):
            lhs = dual_member(D, e)
            rhs = decide(I, e)
            if V.UNKNOWN in (lhs.value, rhs.value):
                continue
            assert lhs.value is rhs.value


def test_monotonicity_on_provable_subsets():
    for I in (FINXFIN, BLOCKBOUNDED, FANCOLSFIN, COLBLOCK):
        for e in expressions(23, I.ground, 60, depth=2):
            for f in expressions(24, I.ground, 2, depth=2):
                big = Union(e, f)
                small = Inter(e, f)
                if decide(I, big).value is V.IN:
                    assert decide(I, e).value in (V.IN, V.UNKNOWN)
                if decide(I, e).value is V.IN:
                    assert decide(I, small).value in (V.IN, V.UNKNOWN)


def test_restriction_law():
    A = BandFrom(2)
    R = restrict(FINXFIN, A)
    for e in expressions(25, Ground.PAIRS, 60, depth=2):
        assert decide(R, e).value is decide(FINXFIN, Inter(e, A)).value


def test_restrict_requires_positive():
    with pytest.raises(NotPositive):
        restrict(FINXFIN, Column(0))


def test_jnt_partitions():
    assert sorted(jnt_partition(BLOCKBOUNDED).block_of(3)) == list(BLOCKS.members(3))
    assert sorted(jnt_partition(FINXFIN).block_of(2)) == [(0, 2), (1, 2), (2, 2)]
    assert jnt_partition(FIN).block_of(5) == frozenset({5})
    cb = jnt_partition(COLBLOCK).block_of(2)
    assert all(i <= 2 or m < BLOCKS.start(2) for (i, m) in cb)
    with pytest.raises(UnsupportedIdeal):
        jnt_partition(unioniter())


def test_partition_block_index_consistency():
    for pid in ("singletons", "L", "shells", "colblock", "singletonpairs"):
        part = registry.get_partition(pid)
        for n in range(6):
            for p in part.block_of(n):
                assert part.block_index(p) == n


def test_verify_jnt():
    evens = Stride(0, 2)
    fams = [CoFinite(frozenset(), Ground.NAT), evens, CoFinite(frozenset(range(10)), Ground.NAT)]
    assert verify_jnt(jnt_partition(BLOCKBOUNDED), fams).passing()
    assert verify_jnt(jnt_partition(FINXFIN), fams).passing()
    assert verify_jnt(jnt_partition(FIN), [CoFinite(frozenset(), Ground.NAT)]).passing()
    assert verify_jnt(jnt_partition(COLBLOCK), fams).passing()
    # a partition squeezed into one column fails: the union stays small
    bad = dataclasses.replace(PART_COL0, ideal=FINXFIN)
    assert verify_jnt(bad, [CoFinite(frozenset(), Ground.NAT)]).ok is False


def test_split_positive_examples():
    shells = registry.get_partition("shells")
    b, cert = split_positive(FINXFIN, full(Ground.PAIRS), shells, 10)
    assert cert.passing()
    # B is the even indices: both shell unions keep every column infinite
    assert [n for n in range(12) if member(b, n)] == [0, 2, 4, 6, 8, 10]

    L = registry.get_partition("L")
    b2, cert2 = split_positive(BLOCKBOUNDED, full(Ground.NAT), L, 10)
    assert cert2.passing()
    assert [n for n in range(10) if member(b2, n)] == [0, 2, 4, 6, 8]

    sing = registry.get_partition("singletons")
    b3, cert3 = split_positive(FIN, full(Ground.NAT), sing, 10)
    assert cert3.passing()
    assert [n for n in range(10) if member(b3, n)] == [0, 2, 4, 6, 8]


def test_split_positive_self_validation_and_precondition():
    with pytest.raises(NotPositive):
        split_positive(FINXFIN, Column(3), registry.get_partition("shells"), 5)
    # determinism: same budget, same output
    shells = registry.get_partition("shells")
    b1, _ = split_positive(FINXFIN, full(Ground.PAIRS), shells, 8)
    b2, _ = split_positive(FINXFIN, full(Ground.PAIRS), shells, 8)
    assert b1 == b2


def test_schema_universal_semantics():
    # universal Positive is unreachable (the empty set instantiates any
    # schema), so non-In verdicts surface as Unknown
    assert decide(FINXFIN, SelectorSchema("triangle", 1)).value is V.UNKNOWN
    assert decide(FIN, SelectorSchema("singletons", 1)).value is V.UNKNOWN
    assert decide(COLBLOCK, SelectorSchema("colblock", 1)).value is V.IN


def test_generator_families_are_in():
    for I in (FIN, FINXFIN, BLOCKBOUNDED, COLBLOCK, FANCOLSFIN):
        for g in in_generators(I):
            assert decide(I, g).value is V.IN, (I.name(), to_text(g))
