"""Tri-valued verdicts, exactness tiers and machine-checkable certificates."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class V(enum.Enum):
    IN = "In"
    POSITIVE = "Positive"
    UNKNOWN = "Unknown"

    def __repr__(self):
        return self.value


@dataclass(frozen=True)
class Tier:
    kind: str
    bound: int | None = None

    def render(self) -> str:
        if self.kind == "BOUNDED":
            return f"BOUNDED({self.bound})"
        return self.kind


EXACT = Tier("EXACT")


def bounded(n: int) -> Tier:
    return Tier("BOUNDED", n)


def min_tier(*tiers: Tier) -> Tier:
    """EXACT survives only if every part is exact; else the loosest bound."""
    bounds = [t.bound for t in tiers if t.kind == "BOUNDED"]
    if not bounds:
        return EXACT
    return bounded(min(b for b in bounds if b is not None))


@dataclass(frozen=True)
class Verdict:
    value: V
    tier: Tier = EXACT

    def render(self) -> str:
        return f"{self.value.value}[{self.tier.render()}]"


IN = Verdict(V.IN)
POSITIVE = Verdict(V.POSITIVE)
UNKNOWN = Verdict(V.UNKNOWN)


def tri(flag, tier: Tier = EXACT) -> Verdict:
    """Map a True/False/None query result onto In/Positive/Unknown."""
    if flag is True:
        return Verdict(V.IN, tier)
    if flag is False:
        return Verdict(V.POSITIVE, tier)
    return Verdict(V.UNKNOWN, tier)


def tri_not(flag, tier: Tier = EXACT) -> Verdict:
    return tri(None if flag is None else not flag, tier)


@dataclass
class Certificate:
    """Verdict record for one checked claim.

    ok is True (verified), False (refuted) or None (not decided within the
    stated tier/budget).  The witness payload is plain data so that stored
    certificates can be re-verified.
    """

    claim: str
    ok: bool | None
    tier: Tier
    params: dict = field(default_factory=dict)
    witness: dict = field(default_factory=dict)
    details: tuple = ()

    def passing(self) -> bool:
        return self.ok is True

    def summary(self) -> str:
        status = {True: "pass", False: "fail", None: "unknown"}[self.ok]
        return f"{self.claim}: {status} [{self.tier.render()}]"


def combine(claim: str, parts, params=None) -> Certificate:
    """Conjunction certificate: pass iff every part passes."""
    parts = list(parts)
    ok: bool | None = True
    for c in parts:
        if c.ok is False:
            ok = False
            break
        if c.ok is None:
            ok = None
    tier = min_tier(*(c.tier for c in parts)) if parts else EXACT
    return Certificate(
        claim=claim,
        ok=ok,
        tier=tier,
        params=params or {},
        witness={"parts": [c.claim for c in parts]},
        details=tuple(c.summary() for c in parts),
    )
