"""Ground sets, canonical enumerations and the power-of-two block system.

Two carriers are supported: the naturals and pairs of naturals.  Each has a
canonical enumeration (identity, Cantor pairing) so that "the n-th point"
is meaningful on either carrier.
"""

from __future__ import annotations

import enum
import math
from functools import lru_cache

from .errors import GroundSetMismatch


class Ground(enum.Enum):
    NAT = "nat"
    PAIRS = "pairs"

    def __repr__(self):
        return f"Ground.{self.name}"


Point = "int | tuple[int, int]"


def point_ground(p) -> Ground:
    if isinstance(p, tuple):
        return Ground.PAIRS
    return Ground.NAT


def check_point(ground: Ground, p) -> None:
    if point_ground(p) is not ground:
        raise GroundSetMismatch(f"point {p!r} does not lie in {ground}")


def cantor_pair(n: int, m: int) -> int:
    s = n + m
    return s * (s + 1) // 2 + m


def cantor_unpair(z: int) -> tuple[int, int]:
    w = (math.isqrt(8 * z + 1) - 1) // 2
    m = z - w * (w + 1) // 2
    return w - m, m


def element(ground: Ground, i: int):
    """The i-th point of the canonical enumeration."""
    if ground is Ground.NAT:
        return i
    return cantor_unpair(i)


def index(ground: Ground, p) -> int:
    """Inverse of :func:`element`."""
    check_point(ground, p)
    if ground is Ground.NAT:
        return p
    return cantor_pair(*p)


def universe(ground: Ground, bound: int):
    """Finite window: {0..N-1} on naturals, the N x N square on pairs."""
    if ground is Ground.NAT:
        return [i for i in range(bound)]
    return [(n, m) for n in range(bound) for m in range(bound)]


def sort_key(p):
    """Deterministic point order: canonical enumeration index."""
    if isinstance(p, tuple):
        return cantor_pair(*p)
    return p


class BlockSystem:
    """The partition of the naturals into consecutive intervals L_n, |L_n| = 2^n.

    Layout: L_n = [2^n - 1, 2^(n+1) - 2].
    """

    def start(self, n: int) -> int:
        return (1 << n) - 1

    def size(self, n: int) -> int:
        return 1 << n

    def members(self, n: int) -> range:
        return range(self.start(n), self.start(n) + self.size(n))

    def block_index(self, x: int) -> int:
        return (x + 1).bit_length() - 1

    def position(self, x: int) -> int:
        """Offset of x inside its block."""
        return x - self.start(self.block_index(x))

    def blocks_below(self, bound: int):
        """Indices of blocks that intersect [0, bound)."""
        n = 0
        while self.start(n) < bound:
            yield n
            n += 1


BLOCKS = BlockSystem()

# Materializing a block of this index or beyond is refused by the summary
# machinery (2^22 elements); honest Unknown beats a memory blowup.
BLOCK_MATERIALIZE_CAP = 22


@lru_cache(maxsize=None)
def block_members_frozen(n: int) -> frozenset:
    return frozenset(BLOCKS.members(n))
