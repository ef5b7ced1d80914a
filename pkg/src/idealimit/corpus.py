"""Seeded generation of expression corpora.

Used by the invariant tests and the reproduce suites; everything is driven
by an explicit seed so replays are byte-for-byte identical.  Constants stay
small so the window statistics of module windows remain sound.
"""

from __future__ import annotations

import random

from .grounds import Ground
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
    Preimage,
    Row,
    SetExpr,
    Stride,
    Union,
)

MAX_CONST = 6
MAX_POINTS = 4


def _points(rng: random.Random, ground: Ground):
    k = rng.randrange(MAX_POINTS + 1)
    if ground is Ground.NAT:
        return frozenset(rng.randrange(8) for _ in range(k))
    return frozenset((rng.randrange(6), rng.randrange(8)) for _ in range(k))


def _leaf(rng: random.Random, ground: Ground) -> SetExpr:
    if ground is Ground.NAT:
        pick = rng.randrange(6)
        if pick == 0:
            return Finite(_points(rng, ground), ground)
        if pick == 1:
            return CoFinite(_points(rng, ground), ground)
        if pick == 2:
            return Block(rng.randrange(MAX_CONST))
        if pick == 3:
            return BlockUnion(_leaf_index(rng))
        if pick == 4:
            return Stride(rng.randrange(4), rng.randrange(1, 4))
        return CoFinite(frozenset(), ground)
    pick = rng.randrange(6)
    if pick == 0:
        return Finite(_points(rng, ground), ground)
    if pick == 1:
        return CoFinite(_points(rng, ground), ground)
    if pick == 2:
        return Column(rng.randrange(MAX_CONST))
    if pick == 3:
        return Row(rng.randrange(MAX_CONST))
    if pick == 4:
        return BandFrom(rng.randrange(MAX_CONST))
    return CoFinite(frozenset(), ground)


def _leaf_index(rng: random.Random) -> SetExpr:
    pick = rng.randrange(3)
    if pick == 0:
        return CoFinite(_points(rng, Ground.NAT), Ground.NAT)
    if pick == 1:
        return Stride(rng.randrange(3), rng.randrange(1, 4))
    return Finite(_points(rng, Ground.NAT), Ground.NAT)


_NAT_MAPS = ("blockshift", "identity")
_PAIRS_MAPS = ("col2to1", "gmap", "fanshift", "identity")
_PAIRS_IMG_MAPS = ("col2to1", "gmap")  # flagged column preserving


def expression(rng: random.Random, ground: Ground, depth: int = 3, maps: bool = True) -> SetExpr:
    if depth <= 0:
        return _leaf(rng, ground)
    pick = rng.randrange(8 if maps else 6)
    if pick <= 1:
        return _leaf(rng, ground)
    if pick == 2:
        return Union(expression(rng, ground, depth - 1, maps), expression(rng, ground, depth - 1, maps))
    if pick == 3:
        return Inter(expression(rng, ground, depth - 1, maps), expression(rng, ground, depth - 1, maps))
    if pick == 4:
        return Diff(expression(rng, ground, depth - 1, maps), expression(rng, ground, depth - 1, maps))
    if pick == 5:
        return Complement(expression(rng, ground, depth - 1, maps))
    if pick == 6:
        mid = rng.choice(_NAT_MAPS if ground is Ground.NAT else _PAIRS_MAPS)
        return Preimage(mid, expression(rng, ground, depth - 1, maps))
    mid = rng.choice(("blockshift",) if ground is Ground.NAT else _PAIRS_IMG_MAPS)
    return Image(mid, expression(rng, ground, depth - 1, maps))


def expressions(seed: int, ground: Ground, count: int, depth: int = 3, maps: bool = True):
    rng = random.Random(seed)
    return [expression(rng, ground, depth, maps) for _ in range(count)]


def infinite_pairs_sets(seed: int, count: int, depth: int = 3):
    """Corpus of pairs expressions filtered to provably infinite ones."""
    from .ideals import FIN_PAIRS, decide
    from .verdicts import V

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        e = expression(rng, Ground.PAIRS, depth)
        if decide(FIN_PAIRS, e).value is V.POSITIVE:
            out.append(e)
    return out


def exact_pairs_sets(seed: int, count: int, depth: int = 3):
    """Pairs expressions on which the column analysis is complete."""
    from .ideals import FINXFIN, decide
    from .verdicts import V

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        e = expression(rng, Ground.PAIRS, depth)
        if decide(FINXFIN, e).value is not V.UNKNOWN:
            out.append(e)
    return out
