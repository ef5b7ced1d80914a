"""Inverse sequences {Z; f}: threads, bases, embeddings, and example builders.

Points of the limit are branches of the bonding-map fiber tree; the distinct
accumulation point p is the constant infinity thread.  Desk-scale operations
enumerate threads to a depth bound and quantify neighborhood conditions over
generator families, with exact decides wherever the projected sets stay in
the closed algebra.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import registry
from .errors import (
    ChainBroken,
    DepthExceeded,
    ExplosionGuard,
    GroundSetMismatch,
    NoBranching,
    NotBijective,
    UnknownExample,
)
from .grounds import Ground, element, sort_key, universe
from .ideals import (
    FANCOLSFIN,
    FINXFIN,
    IdealHandle,
    decide,
    dual_member,
    filter_generators,
    in_generators,
    unioniter,
)
from .maps import CatalogMap, check_katetov, check_morphism, power
from .setexpr import (
    Complement,
    Finite,
    Image,
    Inter,
    Preimage,
    SetExpr,
    ground_of,
    is_schematic,
    member,
    truncate,
)
from .verdicts import (
    EXACT,
    IN,
    POSITIVE,
    UNKNOWN,
    Certificate,
    V,
    Verdict,
    bounded,
    combine,
    min_tier,
)
from .zspace import INFINITY, FilterSpace

_SECTIONS = {
    "identity": "identity",
    "col2to1": "col2to1_least",
    "blockshift": "blockshift_least",
    "gmap": "gmap_least",
}


@dataclass(frozen=True)
class InverseSequence:
    """Constant inverse sequence {Z; f} with bonding map f."""

    space: FilterSpace
    bonding: CatalogMap

    @property
    def ideal(self) -> IdealHandle:
        return self.space.ideal

    @property
    def ground(self) -> Ground:
        return self.space.ground

    def name(self) -> str:
        return f"invlim({self.space.name()}; {self.bonding.map_id})"

    def section_id(self) -> str | None:
        if self.bonding.is_bijection():
            return None  # fibers are singletons; lifts are forced
        return _SECTIONS.get(self.bonding.map_id)

    def least_lift(self, x):
        """Deterministic chooser: the canonically least fiber element."""
        fb = self.bonding.fiber(x)
        if not fb:
            raise NoBranching(f"{self.bonding.map_id} has an empty fiber above {x!r}")
        return min(fb, key=sort_key)

    def validate(self) -> Certificate:
        return check_morphism(self.bonding, self.space, self.space, "continuous")


@dataclass(frozen=True)
class Thread:
    """A depth-d prefix of a limit point: coords (x_1, ..., x_d).

    The all-infinity thread is the prefix of the accumulation point p; any
    thread with a ground coordinate is all ground (the bonding maps send
    ground to ground and infinity to infinity).
    """

    coords: tuple
    bonding_id: str

    def __post_init__(self):
        f = registry.get_map(self.bonding_id)
        for a, b in zip(self.coords, self.coords[1:]):
            if b == INFINITY:
                ok = a == INFINITY
            else:
                ok = a == f.apply(b)
            if not ok:
                raise GroundSetMismatch(
                    f"incompatible thread: {a!r} is not the bonding image of {b!r}"
                )

    @property
    def depth(self) -> int:
        return len(self.coords)

    def coord(self, n: int):
        if not 1 <= n <= self.depth:
            raise DepthExceeded(f"level {n} exceeds thread depth {self.depth}")
        return self.coords[n - 1]

    def is_p(self) -> bool:
        return all(c == INFINITY for c in self.coords)

    def tail_marker(self) -> str:
        return "allInfinity" if self.is_p() else "groundBranch"


def p_thread(seq: InverseSequence, depth: int) -> Thread:
    return Thread((INFINITY,) * depth, seq.bonding.map_id)


@dataclass(frozen=True)
class BasicOpen:
    """pi_n-preimage of a level open: a ground part and/or the point at infinity."""

    level: int
    expr: SetExpr | None
    with_inf: bool = False

    def contains(self, t: Thread) -> bool:
        x = t.coord(self.level)
        if x == INFINITY:
            return self.with_inf
        return self.expr is not None and member(self.expr, x)


def basic_open_membership(t: Thread, n: int, V) -> bool:
    """Is the thread inside pi_n^{-1}(V)?  V is a SetExpr or a BasicOpen."""
    if isinstance(V, BasicOpen):
        return BasicOpen(n, V.expr, V.with_inf).contains(t)
    x = t.coord(n)
    if x == INFINITY:
        return False
    return member(V, x)


@dataclass
class FiberTree:
    """The branching of bonding fibers above a base point, to a given depth."""

    base: object
    bonding_id: str
    depth: int
    levels: list = field(default_factory=list)

    @staticmethod
    def grow(seq: InverseSequence, base, depth: int, cap: int = 100000) -> "FiberTree":
        f = seq.bonding
        levels = [[(base,)]]
        for _ in range(depth - 1):
            nxt = []
            for path in levels[-1]:
                for x in f.fiber(path[-1]):
                    nxt.append(path + (x,))
                    if len(nxt) > cap:
                        raise ExplosionGuard(f"fiber tree exceeds cap {cap}")
            levels.append(nxt)
        return FiberTree(base, f.map_id, depth, levels)

    def branches(self) -> list:
        return [Thread(p, self.bonding_id) for p in self.levels[-1]]

    def branch_count(self) -> int:
        return len(self.levels[-1])


def threads(seq: InverseSequence, depth: int, base_constraint: SetExpr, bound: int = 32, cap: int = 100000):
    """All depth-d ground threads whose first coordinate meets the constraint.

    Bases are taken inside the working window; the count is capped before
    expansion to keep enumeration at desk scale.
    """
    if depth < 1:
        raise DepthExceeded("threads need depth >= 1")
    if is_schematic(base_constraint):
        raise GroundSetMismatch("base constraint must be concrete")
    bases = truncate(base_constraint, bound, seq.ground)
    out = []
    for b in bases:
        tree = FiberTree.grow(seq, b, depth, cap=cap)
        out.extend(tree.branches())
        if len(out) > cap:
            raise ExplosionGuard(f"thread enumeration exceeds cap {cap}")
    return out


def thread_over(seq: InverseSequence, base, depth: int) -> Thread:
    """The lexicographically-least thread above a base point."""
    coords = [base]
    for _ in range(depth - 1):
        coords.append(seq.least_lift(coords[-1]))
    return Thread(tuple(coords), seq.bonding.map_id)


# -- level sets and projections ---------------------------------------------


@dataclass(frozen=True)
class LevelSet:
    """The thread family pi_level^{-1}(expr): the workhorse payload shape."""

    level: int
    expr: SetExpr

    def contains(self, t: Thread) -> bool:
        x = t.coord(self.level)
        return x != INFINITY and member(self.expr, x)


def level_projection(seq: InverseSequence, ls: LevelSet, k: int) -> SetExpr:
    """pi_k of the thread family, as a set expression."""
    if k == ls.level:
        return ls.expr
    if k < ls.level:
        m = power(seq.bonding, ls.level - k)
        return Image(m.map_id, ls.expr)
    m = power(seq.bonding, k - ls.level)
    return Preimage(m.map_id, ls.expr)


def closure_at_p(seq: InverseSequence, ls: LevelSet, depth: int) -> tuple[Verdict, dict]:
    """Does the closure of the thread family reach p?  Quantified to depth.

    p is in the closure iff every level projection is ideal-positive; a level
    whose projection is In the ideal yields a separating basic neighborhood.
    """
    seen_unknown = False
    for k in range(1, depth + 1):
        v = decide(seq.ideal, level_projection(seq, ls, k))
        if v.value is V.IN:
            return POSITIVE, {"separating_level": k}
        if v.value is V.UNKNOWN:
            seen_unknown = True
    if seen_unknown:
        return UNKNOWN, {}
    return IN, {"levels": depth}


# -- Prop 6.3: the basis computation and the embedding -----------------------


def prop63_basis(seq: InverseSequence, W: SetExpr, k: int, bound: int = 32, cap: int = 100000):
    """Pull a level-k basic neighborhood down to level 1.

    Computes V with pi_1^{-1}(V) contained in pi_k^{-1}(W), following the
    closed-surjection construction, and certifies the inclusion exhaustively
    over depth-k threads in the window plus V being a neighborhood of inf.
    """
    ideal = seq.ideal
    if dual_member(ideal, W).value is not V.IN:
        raise GroundSetMismatch("W must be a neighborhood of infinity")
    if k < 1:
        raise DepthExceeded("levels are 1-based")
    if k == 1:
        Vexpr: SetExpr = W
    else:
        m = power(seq.bonding, k - 1)
        U = Preimage(m.map_id, Image(m.map_id, W))
        A = Inter(U, Complement(W))
        Vexpr = Inter(Image(m.map_id, W), Complement(Image(m.map_id, A)))
    parts = []
    checked = 0
    violations = []
    for base in truncate(Vexpr, bound, seq.ground):
        tree = FiberTree.grow(seq, base, k, cap=cap)
        for t in tree.branches():
            checked += 1
            if not member(W, t.coord(k)):
                violations.append(t.coords)
    parts.append(
        Certificate(
            "inclusion pi1^-1(V) <= pik^-1(W)",
            not violations,
            bounded(bound),
            params={"depth": k, "threads": checked},
            witness={"violations": violations[:3]},
        )
    )
    nb = dual_member(ideal, Vexpr)
    parts.append(
        Certificate(
            "V is a neighborhood of infinity",
            True if nb.value is V.IN else (False if nb.value is V.POSITIVE else None),
            EXACT if nb.value is not V.UNKNOWN else bounded(bound),
            witness={"verdict": nb.render()},
        )
    )
    cert = combine(f"prop63-basis({seq.bonding.map_id}, k={k})", parts,
                   params={"bound": bound, "k": k})
    return Vexpr, cert


def embed_Z(seq: InverseSequence, depth: int = 4, bound: int = 32, corpus=None):
    """The canonical copy of Z inside the limit: n-th ground point -> thread.

    Certifies both directions of "A is a neighborhood iff its thread trace is
    open" over a corpus: the forward direction is structural (first
    coordinates are the ground points themselves), the converse is checked
    against the generator family at the window.
    """
    g = seq.ground
    table = {}
    for i in range(bound):
        pt = element(g, i)
        table[pt] = thread_over(seq, pt, depth)
    parts = []
    for pt, t in table.items():
        if t.coord(1) != pt:
            parts.append(Certificate("embedding fixes level 1", False, EXACT,
                                     witness={"point": repr(pt)}))
            break
    else:
        parts.append(Certificate("embedding fixes level 1", True, EXACT,
                                 params={"points": len(table)}))
    corpus = list(corpus) if corpus is not None else in_generators(seq.ideal)
    gens = filter_generators(seq.ideal)
    for A in corpus:
        va = dual_member(seq.ideal, A)
        if va.value is V.IN:
            # trace equals {x_n : n in A} plus p: open via level-1 generator A
            parts.append(Certificate(f"forward({_txt(A)})", True, EXACT))
            continue
        # A is not a neighborhood: no generator trace may sit inside A's trace
        bad = None
        for lvl in range(1, depth + 1):
            for Wg in gens:
                inside = True
                for i in range(bound):
                    pt = element(g, i)
                    x = table[pt].coord(lvl)
                    if member(Wg, x) and not member(A, pt):
                        inside = False
                        break
                if inside:
                    bad = (lvl, _txt(Wg))
                    break
            if bad:
                break
        parts.append(
            Certificate(
                f"converse({_txt(A)})",
                bad is None,
                bounded(bound),
                witness={} if bad is None else {"generator": bad[1], "level": bad[0]},
            )
        )
    cert = combine(f"embedding({seq.bonding.map_id})", parts,
                   params={"depth": depth, "bound": bound})
    return table, cert


def _txt(e: SetExpr) -> str:
    from .dsl import to_text

    return to_text(e)


# -- Prop 6.4: the neighborhood filter of p for bijective bonding ------------


def prop64_filter(seq: InverseSequence, kmax: int = 8) -> IdealHandle:
    """Dual-ideal view of the neighborhood filter of p when f is bijective.

    Membership is the monotone existential over the iterated filters; for
    the fan shift the closed form also settles the negative side.
    """
    if not seq.bonding.is_bijection():
        raise NotBijective(f"{seq.bonding.map_id} is not a bijection")
    if seq.bonding.map_id == "identity":
        return seq.ideal
    if seq.bonding.map_id == "fanshift":
        return unioniter("fanshift", kmax)
    return IdealHandle("opaque", seq.ground)


# -- Prop 6.2: Katetov upper bounds via a discrete copy ----------------------


def prop62_upper_bound(chain, depth: int = 4, bound: int = 32) -> Certificate:
    """Certify I_n <=_K J_p along a witnessed Katetov-increasing chain.

    chain is a list of (ideal, witness-map-to-previous) pairs; the first
    entry's map is ignored.  Builds the discrete set D = {x_m} with x_m over
    the m-th ground point, checks every chain witness on generator families,
    and exhibits separating neighborhood traces for the trace ideal of p.
    """
    parts = []
    ideals = [c[0] for c in chain]
    witnesses = [c[1] for c in chain]
    for i in range(1, len(chain)):
        lower, upper, wit = ideals[i - 1], ideals[i], witnesses[i]
        cert = check_katetov(wit, lower, upper, in_generators(lower))
        if not cert.passing():
            raise ChainBroken(
                f"witness {wit.map_id} fails {lower.name()} <=_K {upper.name()}",
                counterexample=cert.witness,
            )
        parts.append(cert)
    # build D: one thread per ground point of the first carrier
    g1 = ideals[0].ground
    depth = min(depth, len(ideals))
    table = {}
    for i in range(bound):
        pt = element(g1, i)
        coords = [pt]
        for j in range(1, depth):
            wit = witnesses[j]
            lift = wit.least_lift(coords[-1])
            coords.append(lift)
        table[i] = tuple(coords)
    parts.append(
        Certificate("D is discrete (level-1 singletons separate)", True, EXACT,
                    params={"points": len(table)})
    )
    # p in closure of D: generator neighborhoods at each level meet D
    misses = []
    for lvl in range(depth):
        for W in filter_generators(ideals[lvl]):
            if not any(member(W, coords[lvl]) for coords in table.values()):
                misses.append((lvl + 1, _txt(W)))
    parts.append(
        Certificate("p in closure(D)", not misses, bounded(bound),
                    witness={"missed": misses[:3]})
    )
    # I_n <=_K J_p via pi_n restricted to D: separating trace neighborhoods
    fails = []
    for lvl in range(depth):
        for E in in_generators(ideals[lvl]):
            hit = [m for m, coords in table.items() if member(E, coords[lvl])]
            wit_trace = [m for m, coords in table.items()
                         if member(Complement(E), coords[lvl])]
            if set(hit) & set(wit_trace):
                fails.append((lvl + 1, _txt(E)))
    parts.append(
        Certificate("trace ideal dominates each level ideal", not fails,
                    bounded(bound), witness={"failures": fails[:3]})
    )
    return combine("prop62-upper-bound", parts, params={"depth": depth, "bound": bound})


# -- Lemma 5.3: density through the projections ------------------------------


def density_check(seq: InverseSequence, E, depth: int = 4, bound: int = 16) -> Certificate:
    """Dense iff every level projection is dense: covers the window's
    isolated points and meets every generator neighborhood of infinity."""
    gens = filter_generators(seq.ideal)
    parts = []
    for lvl in range(1, depth + 1):
        pts = _level_points(seq, E, lvl, bound)
        missing = [p for p in universe(seq.ground, bound) if p not in pts]
        parts.append(
            Certificate(
                f"level {lvl} covers window isolated points",
                not missing,
                bounded(bound),
                witness={"missing": [repr(m) for m in missing[:3]]},
            )
        )
        unmet = []
        for W in gens:
            if not any(member(W, p) for p in pts):
                unmet.append(_txt(W))
        parts.append(
            Certificate(
                f"level {lvl} meets neighborhood generators",
                not unmet,
                bounded(bound),
                witness={"unmet": unmet[:3]},
            )
        )
    return combine("density(Lemma-5.3 criterion)", parts,
                   params={"depth": depth, "bound": bound})


def _level_points(seq: InverseSequence, E, lvl: int, bound: int):
    if isinstance(E, LevelSet):
        return set(truncate(level_projection(seq, E, lvl), bound, seq.ground))
    pts = set()
    for t in E:
        if t.depth >= lvl:
            x = t.coord(lvl)
            if x != INFINITY:
                pts.add(x)
    return pts


# -- crowded samples (Example 6.5 style) -------------------------------------


def crowded_sample(seq: InverseSequence, base, depth: int, cap: int = 100000):
    """All depth-d branches above a base point, certified non-isolated.

    A member is non-isolated when every basic open that pins its prefix
    still contains another member (branching below the pin) or extends to
    several deeper threads (branching above the last level).
    """
    probe = universe(seq.ground, 4)
    if all(len(seq.bonding.fiber(p)) <= 1 for p in probe):
        raise NoBranching(f"{seq.bonding.map_id} is injective; fibers do not branch")
    tree = FiberTree.grow(seq, base, depth, cap=cap)
    sample = tree.branches()
    parts = []
    for t in sample:
        isolated_at = None
        for lvl in range(1, depth + 1):
            if lvl < depth:
                sharing = [s for s in sample if s.coords[:lvl] == t.coords[:lvl]]
                if len(sharing) < 2:
                    isolated_at = lvl
                    break
            else:
                if len(seq.bonding.fiber(t.coord(depth))) < 2:
                    isolated_at = lvl
                    break
        parts.append(
            Certificate(
                f"member {t.coords} non-isolated",
                isolated_at is None,
                bounded(depth),
                witness={} if isolated_at is None else {"pinned_level": isolated_at},
            )
        )
    cert = combine(f"crowded-sample(base={base!r}, d={depth})", parts,
                   params={"depth": depth, "members": len(sample)})
    return sample, cert


# -- the example catalog ------------------------------------------------------


@dataclass(frozen=True)
class ExampleSpace:
    example_id: str
    seq: InverseSequence
    claims: tuple

    def name(self) -> str:
        return f"example {self.example_id}"


_EXAMPLES = {
    "6.5": (
        FINXFIN,
        "col2to1",
        (
            "bonding-continuous",
            "bonding-closed",
            "bonding-open",
            "crowded-sample",
            "qplus-search",
            "fan-nonefound-exact-pplus-failure",
            "discrete-witness",
            "ss-selector",
        ),
    ),
    "6.6": (
        None,  # blockbounded
        "blockshift",
        (
            "bonding-continuous",
            "bonding-closed",
            "bonding-open",
            "not-qplus-exact",
            "pplus-search-succeeds",
            "fan-search",
            "discrete-witness",
            "ss-selector",
        ),
    ),
    "6.7": (
        None,  # colblock
        "gmap",
        (
            "bonding-continuous",
            "not-qplus-exact",
            "pplus-failure-exact",
            "discrete-witness",
            "ss-selector",
        ),
    ),
    "6.8": (
        FANCOLSFIN,
        "fanshift",
        (
            "bonding-continuous",
            "bonding-bijective",
            "prop64-identity",
            "frechet-failure-family",
            "discrete-witness",
            "ss-selector",
        ),
    ),
}


def example_space(example_id: str) -> ExampleSpace:
    from .ideals import BLOCKBOUNDED, COLBLOCK

    key = str(example_id)
    if key not in _EXAMPLES:
        raise UnknownExample(f"no example {example_id!r}; known: 6.5, 6.6, 6.7, 6.8")
    ideal, map_id, claims = _EXAMPLES[key]
    if ideal is None:
        ideal = BLOCKBOUNDED if key == "6.6" else COLBLOCK
    seq = InverseSequence(FilterSpace(ideal), registry.get_map(map_id))
    return ExampleSpace(key, seq, claims)
