"""Eventually periodic subsets of the naturals.

An EPSet is an explicit finite prefix below a threshold plus a periodic tail
given by a set of residues.  The class is closed under the boolean operations
and shifts, and finiteness / cofiniteness / emptiness are decidable, which is
what the exact deciders lean on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce


@dataclass(frozen=True)
class EPSet:
    threshold: int
    prefix: frozenset
    period: int
    residues: frozenset

    def __post_init__(self):
        assert self.period >= 1
        assert all(0 <= x < self.threshold for x in self.prefix)
        assert all(0 <= r < self.period for r in self.residues)

    # -- construction -------------------------------------------------

    @staticmethod
    def empty() -> "EPSet":
        return EPSet(0, frozenset(), 1, frozenset())

    @staticmethod
    def full() -> "EPSet":
        return EPSet(0, frozenset(), 1, frozenset({0}))

    @staticmethod
    def from_finite(points) -> "EPSet":
        pts = frozenset(points)
        t = max(pts) + 1 if pts else 0
        return EPSet(t, pts, 1, frozenset())

    @staticmethod
    def from_cofinite(holes) -> "EPSet":
        hs = frozenset(holes)
        t = max(hs) + 1 if hs else 0
        return EPSet(t, frozenset(range(t)) - hs, 1, frozenset({0}))

    @staticmethod
    def from_stride(start: int, step: int) -> "EPSet":
        assert step >= 1
        return EPSet(start, frozenset(), step, frozenset({start % step}))

    # -- queries ------------------------------------------------------

    def member(self, x: int) -> bool:
        if x < self.threshold:
            return x in self.prefix
        return (x % self.period) in self.residues

    def is_finite(self) -> bool:
        return not self.residues

    def is_empty(self) -> bool:
        return not self.prefix and not self.residues

    def is_cofinite(self) -> bool:
        return len(self.residues) == self.period

    def members_below(self, bound: int):
        return [x for x in range(bound) if self.member(x)]

    def members_all(self):
        """All members; only valid for finite sets."""
        assert self.is_finite()
        return sorted(self.prefix)

    def count_in(self, lo: int, hi: int) -> int:
        if hi - lo <= 4 * self.period + self.threshold:
            return sum(1 for x in range(lo, hi) if self.member(x))
        lo2 = max(lo, self.threshold)
        head = sum(1 for x in range(lo, min(hi, lo2)) if self.member(x))
        span = hi - lo2
        full, rem = divmod(span, self.period)
        tail = full * len(self.residues)
        tail += sum(1 for x in range(lo2 + full * self.period, hi) if self.member(x))
        return head + tail

    # -- normalization ------------------------------------------------

    def normalize(self) -> "EPSet":
        period = self.period
        residues = self.residues
        for d in sorted(_divisors(period)):
            if d == period:
                break
            buckets = {}
            ok = True
            for r in range(period):
                v = r in residues
                if buckets.setdefault(r % d, v) != v:
                    ok = False
                    break
            if ok:
                period = d
                residues = frozenset(r for r in residues if r < d)
                break
        t = self.threshold
        prefix = set(self.prefix)
        while t > 0:
            x = t - 1
            if (x in prefix) == ((x % period) in residues):
                prefix.discard(x)
                t -= 1
            else:
                break
        return EPSet(t, frozenset(p for p in prefix if p < t), period, residues)

    # -- boolean algebra ----------------------------------------------

    def _aligned(self, other: "EPSet"):
        t = max(self.threshold, other.threshold)
        p = math.lcm(self.period, other.period)
        return t, p

    def _binop(self, other: "EPSet", fn) -> "EPSet":
        t, p = self._aligned(other)
        prefix = frozenset(x for x in range(t) if fn(self.member(x), other.member(x)))
        residues = frozenset(
            r for r in range(p)
            if fn((r % self.period) in self.residues, (r % other.period) in other.residues)
        )
        return EPSet(t, prefix, p, residues).normalize()

    def union(self, other):
        return self._binop(other, lambda a, b: a or b)

    def inter(self, other):
        return self._binop(other, lambda a, b: a and b)

    def diff(self, other):
        return self._binop(other, lambda a, b: a and not b)

    def complement(self):
        prefix = frozenset(x for x in range(self.threshold) if x not in self.prefix)
        residues = frozenset(r for r in range(self.period) if r not in self.residues)
        return EPSet(self.threshold, prefix, self.period, residues).normalize()

    # -- shifts and scalings -------------------------------------------

    def shift_up(self, k: int) -> "EPSet":
        """{x + k : x in S}."""
        assert k >= 0
        t = self.threshold + k
        prefix = frozenset(x + k for x in self.prefix)
        residues = frozenset((r + k) % self.period for r in self.residues)
        return EPSet(t, prefix, self.period, residues).normalize()

    def shift_down(self, k: int) -> "EPSet":
        """{x - k : x in S, x >= k}."""
        assert k >= 0
        t = max(self.threshold - k, 0)
        prefix = frozenset(x - k for x in self.prefix if x >= k and x - k < t)
        residues = frozenset((r - k) % self.period for r in self.residues)
        return EPSet(t, prefix, self.period, residues).normalize()

    def double_preimage(self) -> "EPSet":
        """{x : x // 2 in S} = {2s, 2s+1 : s in S}."""
        t = 2 * self.threshold
        prefix = frozenset(y for s in self.prefix for y in (2 * s, 2 * s + 1))
        p = 2 * self.period
        residues = frozenset(
            y % p for r in self.residues for y in (2 * r, 2 * r + 1)
        )
        # residue arithmetic: x // 2 mod period == r  <=>  x mod 2p in {2r, 2r+1}
        return EPSet(t, prefix, p, residues).normalize()

    def halve_image(self) -> "EPSet":
        """{x // 2 : x in S}."""
        p = self.period
        # y >= tt guarantees 2y is past the explicit prefix, so membership of
        # 2y and 2y+1 is a function of y mod p.
        tt = (self.threshold + 1) // 2 + p
        prefix = frozenset(
            y for y in range(tt) if self.member(2 * y) or self.member(2 * y + 1)
        )
        residues = frozenset(
            r for r in range(p)
            if ((2 * r) % p) in self.residues or ((2 * r + 1) % p) in self.residues
        )
        return EPSet(tt, prefix, p, residues).normalize()

    def double_image(self) -> "EPSet":
        """{2x : x in S}."""
        t = 2 * self.threshold
        prefix = frozenset(2 * x for x in self.prefix)
        p = 2 * self.period
        residues = frozenset((2 * r) % p for r in self.residues)
        return EPSet(t, prefix, p, residues).normalize()

    def half_preimage_even(self) -> "EPSet":
        """{x : 2x in S} (section preimage of the doubling map)."""
        t = (self.threshold + 1) // 2 + self.period
        prefix = frozenset(x for x in range(t) if self.member(2 * x))
        residues = frozenset(
            r for r in range(self.period) if ((2 * r) % self.period) in self.residues
        )
        return EPSet(t, prefix, self.period, residues).normalize()


def _divisors(n: int):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


def ep_union_all(sets):
    sets = list(sets)
    if not sets:
        return EPSet.empty()
    return reduce(lambda a, b: a.union(b), sets)
