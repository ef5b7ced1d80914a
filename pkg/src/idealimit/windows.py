"""Finite-window statistics backing the BOUNDED certificate tier.

The statistics are chosen so that (over the closed corpus the toolkit
generates) membership in a catalog ideal keeps them bounded across growing
windows while positivity makes them grow strictly; bounded certificates and
the decide/truncation coherence tests share these definitions.
"""

from __future__ import annotations

from .grounds import BLOCKS, Ground

WINDOWS = (16, 32, 64)


def heavy_column_count(points, bound: int) -> int:
    """Number of window columns holding at least bound/2 window points."""
    per = {}
    for (n, m) in points:
        if n < bound and m < bound:
            per[n] = per.get(n, 0) + 1
    return sum(1 for c in per.values() if c >= bound // 2)


def max_block_trace(points, bound: int) -> int:
    """Largest |S intersect L_n| over blocks fully inside the window."""
    per = {}
    for x in points:
        if x < bound:
            n = BLOCKS.block_index(x)
            per[n] = per.get(n, 0) + 1
    best = 0
    for n, c in per.items():
        if BLOCKS.start(n) + BLOCKS.size(n) <= bound:
            best = max(best, c)
    return best


def stat_for(ground: Ground, kind: str):
    if ground is Ground.PAIRS:
        return heavy_column_count
    if kind == "blockbounded":
        return max_block_trace
    return lambda pts, bound: sum(1 for x in pts if x < bound)


def strictly_growing(values) -> bool:
    return all(a < b for a, b in zip(values, values[1:]))


def small_consistent(values) -> bool:
    """Sound necessary condition for membership on the generated corpus:
    the statistic must not grow strictly while also getting large."""
    return not (strictly_growing(values) and values[-1] > 8)
