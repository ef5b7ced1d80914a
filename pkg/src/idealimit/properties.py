"""Certifiers and bounded searches for the combinatorial covering properties.

Each search mirrors the constructive proof it is named after and returns a
witness plus a re-checkable certificate.  NoneFound is always budget-
qualified; refutations are only ever claimed alongside an exact negative
witness (a schema verdict or a structural smallness argument), never from a
failed search alone.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import registry
from .errors import (
    ChainNotDecreasing,
    NotAlmostContained,
    NotDense,
    PreconditionFailed,
)
from .grounds import Ground, sort_key, universe
from .ideals import (
    FIN,
    FIN_PAIRS,
    FINXFIN,
    IdealHandle,
    JNTPartition,
    decide,
    dual_member,
    filter_generators,
    in_generators,
    jnt_partition,
    split_positive,
)
from .invlimit import (
    InverseSequence,
    LevelSet,
    Thread,
    closure_at_p,
    density_check,
    level_projection,
    p_thread,
    thread_over,
    threads,
)
from .maps import CatalogMap, power
from .setexpr import (
    BlockUnion,
    CoFinite,
    Column,
    Complement,
    Diff,
    Finite,
    Inter,
    Preimage,
    SelectorSchema,
    SetExpr,
    Stride,
    Union,
    ground_of,
    member,
    truncate,
)
from .values import nv_is_cofinite, pairsval, pv_trace
from .verdicts import (
    EXACT,
    Certificate,
    V,
    Verdict,
    bounded,
    combine,
)
from .zspace import (
    FilterSpace,
    FinitePart,
    ProductSpace,
    Rectangle,
    Tail,
    product_closure,
)


@dataclass(frozen=True)
class Challenge:
    kind: str
    space: object
    payload: object
    partition: JNTPartition | None = None
    budget: int = 10_000
    bound: int = 32
    depth: int = 4


# -- selector denotations ---------------------------------------------------


def _nu2(n: int) -> int:
    """2-adic valuation; the ruler sequence hits every value infinitely often."""
    return (n & -n).bit_length() - 1


@dataclass(frozen=True)
class SelectorConcrete:
    """Explicit finite prefix plus a tail rule, at most one point per block."""

    partition_id: str
    prefix: tuple = ()
    tail_rule: str = "none"  # none | leastInBlock | ruler | expr
    tail_from: int = 0
    expr: SetExpr | None = None

    def __post_init__(self):
        blocks = [b for b, _ in self.prefix]
        if len(blocks) != len(set(blocks)):
            raise PreconditionFailed("selector picks two points from one block")

    def shape_ok(self) -> bool:
        part = registry.get_partition(self.partition_id)
        return all(p in part.block_of(b) for b, p in self.prefix)

    def window_members(self, bound: int, ground: Ground):
        part = registry.get_partition(self.partition_id)
        win = set(universe(ground, bound))
        pts = [p for _, p in self.prefix if p in win]
        if self.tail_rule == "expr":
            pts += [p for p in truncate(self.expr, bound, ground)]
        elif self.tail_rule in ("leastInBlock", "ruler"):
            prefix_blocks = {b for b, _ in self.prefix}
            for n in itertools.count(self.tail_from):
                blk = part.block_of(n)
                if not blk:
                    continue
                if all(p not in win for p in blk):
                    if min(sort_key(p) for p in blk) > max(
                        (sort_key(q) for q in win), default=0
                    ):
                        break
                    continue
                if n in prefix_blocks:
                    continue
                pick = self._tail_pick(part, n)
                if pick is not None and pick in win:
                    pts.append(pick)
        return sorted(set(pts), key=sort_key)

    def _tail_pick(self, part, n: int):
        blk = part.block_of(n)
        if not blk:
            return None
        if self.tail_rule == "leastInBlock":
            return min(blk, key=sort_key)
        # ruler: in pairs partitions indexed by n, pick the point of column
        # nu2(n+1); every column is revisited along a stride, so the selector
        # has infinitely many infinite columns
        col = _nu2(n + 1)
        cands = [p for p in blk if isinstance(p, tuple) and p[0] == col]
        return min(cands, key=sort_key) if cands else min(blk, key=sort_key)

    def exact_verdict(self, ideal: IdealHandle) -> Verdict | None:
        """Closed-form decide of the denotation, where one is registered."""
        part = registry.get_partition(self.partition_id)
        if self.tail_rule == "expr":
            extra = Finite(frozenset(p for _, p in self.prefix)) if self.prefix else None
            e = self.expr if extra is None else Union(self.expr, extra)
            return decide(ideal, e)
        if self.tail_rule == "none":
            return decide(ideal, Finite(frozenset(p for _, p in self.prefix), ideal.ground))
        if self.tail_rule == "leastInBlock":
            if ideal.kind == "blockbounded" and part.pid == "L":
                return Verdict(V.IN)  # traces bounded by 1 + prefix
            if part.pid == "triangle" and ideal.kind in ("finxfin", "unioniter"):
                return Verdict(V.IN)  # tail is {(0, n)}: one infinite column
            if part.pid == "shells" and ideal.kind in ("finxfin", "unioniter"):
                return Verdict(V.IN)  # tail is row 0
            return None
        if self.tail_rule == "ruler":
            if part.pid in ("triangle", "shells"):
                if ideal.kind in ("finxfin", "unioniter"):
                    return Verdict(V.POSITIVE)  # every column meets a stride
                if ideal.kind == "faniter":
                    return Verdict(V.POSITIVE)
                if ideal.kind == "colblock":
                    return Verdict(V.POSITIVE)  # stride traces are block-unbounded
            return None
        return None

    def describe(self) -> str:
        return (
            f"selector({self.partition_id}, prefix={len(self.prefix)}, "
            f"tail={self.tail_rule})"
        )


def closure_positive_cert(ideal: IdealHandle, sel: SelectorConcrete, bound: int) -> Certificate:
    """Certify the selector's denotation is closure-positive at infinity."""
    v = sel.exact_verdict(ideal)
    if v is not None and v.value is V.POSITIVE:
        return Certificate(f"{sel.describe()} closure-positive", True, EXACT,
                           witness={"verdict": v.render()})
    if v is not None and v.value is V.IN:
        return Certificate(f"{sel.describe()} closure-positive", False, EXACT,
                           witness={"verdict": v.render()})
    pts = sel.window_members(bound, ideal.ground)
    unmet = []
    for W in filter_generators(ideal):
        if not any(member(W, p) for p in pts):
            unmet.append(_txt(W))
    return Certificate(
        f"{sel.describe()} closure-positive",
        not unmet,
        bounded(bound),
        witness={"unmet": unmet[:3], "window_points": len(pts)},
    )


def _txt(e) -> str:
    from .dsl import to_text

    try:
        return to_text(e)
    except Exception:
        return repr(e)


# -- q+ ----------------------------------------------------------------------


def not_qplus_witness(I: IdealHandle, partition: JNTPartition) -> Certificate:
    """Exact q+ failure: every selector of the partition lands In the ideal."""
    v = decide(I, SelectorSchema(partition.pid, 1))
    if v.value is V.IN:
        return Certificate(
            f"not-qplus({I.name()}, {partition.pid})", True, EXACT,
            witness={"schema_verdict": v.render()},
        )
    samples = {}
    for rule in ("leastInBlock", "ruler"):
        sel = SelectorConcrete(partition.pid, (), rule)
        sv = sel.exact_verdict(I)
        samples[rule] = sv.render() if sv is not None else "Unknown"
    return Certificate(
        f"not-qplus({I.name()}, {partition.pid})", False, EXACT,
        witness={"schema_verdict": v.render(), "sampled_selectors": samples},
        details=("selectors of this partition are not uniformly small",),
    )


def qplus_search(c: Challenge):
    """Search for an ideal-positive partial selector of the payload.

    Mirrors the countable-subspace argument on inverse sequences: split the
    positive payload, select on each half at its level, lift, and take the
    union.  Returns (selector, certificate) or (None, certificate) when the
    budget runs out or an exact negative witness fires first.
    """
    if c.kind != "qplus":
        raise PreconditionFailed("challenge kind must be qplus")
    if isinstance(c.space, FilterSpace):
        return _qplus_filterspace(c.space, c.payload, c.partition, c.bound, c.budget)
    if isinstance(c.space, InverseSequence):
        return _qplus_invlimit(c.space, c.payload, c.partition, c.bound, c.depth, c.budget)
    raise PreconditionFailed("unsupported space view for qplus")


def _qplus_filterspace(Z: FilterSpace, payload: SetExpr, part: JNTPartition,
                       bound: int, budget: int):
    I = Z.ideal
    if decide(I, payload).value is not V.POSITIVE:
        raise PreconditionFailed("qplus payload must be ideal-positive")
    neg = not_qplus_witness(I, part)
    if neg.passing():
        return None, Certificate(
            f"qplus({I.name()}, {part.pid})", False, EXACT,
            witness={"negative_witness": neg.claim},
            details=(neg.summary(),),
        )
    if part.kind == "singletons":
        sel = SelectorConcrete(part.pid, (), "expr", expr=payload)
        cert = closure_positive_cert(I, sel, bound)
        return sel, _sel_cert(I, part, sel, cert)
    for rule in ("leastInBlock", "ruler"):
        sel = SelectorConcrete(part.pid, (), rule)
        v = sel.exact_verdict(I)
        if v is not None and v.value is V.POSITIVE:
            cert = closure_positive_cert(I, sel, bound)
            return sel, _sel_cert(I, part, sel, cert)
    # greedy window assembly: meet every generator with one pick per block
    picks = []
    used = set()
    gens = filter_generators(I)
    for W in gens:
        got = False
        for n in range(4 * bound):
            if n in used or len(picks) > budget:
                continue
            blk = [p for p in part.block_of(n)
                   if member(payload, p) and member(W, p)]
            if blk:
                picks.append((n, min(blk, key=sort_key)))
                used.add(n)
                got = True
                break
        if not got:
            return None, Certificate(
                f"qplus({I.name()}, {part.pid})", None, bounded(bound),
                params={"budget": budget},
                witness={"unmet_generator": _txt(W)},
            )
    sel = SelectorConcrete(part.pid, tuple(picks), "leastInBlock",
                           tail_from=max(used) + 1 if used else 0)
    cert = closure_positive_cert(I, sel, bound)
    return sel, _sel_cert(I, part, sel, cert)


def _sel_cert(I, part, sel: SelectorConcrete, closure_cert: Certificate) -> Certificate:
    shape = Certificate("selector shape (<=1 per block)", sel.shape_ok(), EXACT)
    return combine(f"qplus({I.name()}, {part.pid})", [shape, closure_cert])


@dataclass(frozen=True)
class ThreadSelector:
    """At most one depth-d thread per block of a base partition."""

    base_partition: str
    picks: tuple  # ((block index, Thread), ...)
    levels: tuple  # rounds' levels, proof bookkeeping

    def shape_ok(self) -> bool:
        blocks = [b for b, _ in self.picks]
        part = registry.get_partition(self.base_partition)
        return len(blocks) == len(set(blocks)) and all(
            t.coord(1) in part.block_of(b) for b, t in self.picks
        )


def _qplus_invlimit(seq: InverseSequence, payload: LevelSet, part: JNTPartition,
                    bound: int, depth: int, budget: int):
    I = seq.ideal
    v, info = closure_at_p(seq, payload, depth)
    if v.value is not V.IN:
        raise PreconditionFailed(f"payload not closure-positive at p: {info}")
    neg = not_qplus_witness(I, part)
    if neg.passing():
        return None, Certificate(
            f"qplus-limit({seq.name()}, {part.pid})", False, EXACT,
            details=(neg.summary(),),
        )
    base_expr = payload.expr if payload.level == 1 else level_projection(seq, payload, 1)
    half, split_cert = split_positive(I, base_expr, part, min(budget, 16))
    rounds = []
    picks = []
    used = set()
    for rnd, side_ix in enumerate((half, Complement(half))):
        level = min(rnd + 1, depth)
        sel_pts = []
        for W in filter_generators(I):
            for n in range(4 * bound):
                if n in used or not member(side_ix, n):
                    continue
                blk = [p for p in part.block_of(n)
                       if member(base_expr, p) and member(W, p)]
                if blk:
                    base_pt = min(blk, key=sort_key)
                    t = thread_over(seq, base_pt, depth)
                    picks.append((n, t))
                    used.add(n)
                    sel_pts.append(base_pt)
                    break
        rounds.append((level, len(sel_pts)))
    sel = ThreadSelector(part.pid, tuple(picks), tuple(l for l, _ in rounds))
    shape = Certificate("thread selector shape", sel.shape_ok(), EXACT)
    # closure at p of the assembled selector: window generator meets per level
    misses = []
    for k in range(1, depth + 1):
        for W in filter_generators(I):
            pts = [t.coord(k) for _, t in sel.picks]
            if not any(member(W, x) for x in pts):
                misses.append((k, _txt(W)))
    closure = Certificate(
        "selector closure-positive at p", not misses, bounded(bound),
        witness={"missed": misses[:3], "picks": len(sel.picks)},
    )
    cert = combine(f"qplus-limit({seq.name()}, {part.pid})",
                   [split_cert, shape, closure],
                   params={"bound": bound, "depth": depth, "budget": budget})
    return sel, cert


# -- p+ ----------------------------------------------------------------------


@dataclass(frozen=True)
class DecreasingChain:
    """A decreasing positive family: listed members plus the family's tail law.

    The tail law encodes the "for all n" quantifier of the written family:
      - "bands":       A_n = BandFrom(n);   C almost inside every member iff
                       every column of C is finite (exact translation)
      - "blocktails":  A_n = BlockUnion(CoFinite(0..n)); differences are
                       unions of finitely many finite blocks, always finite
      - "cofinite":    A_n = CoFinite(0..n); differences always finite
      - None:          only the listed members quantify
    """

    members: tuple
    tail: str | None = None

    @staticmethod
    def of(chain) -> "DecreasingChain":
        if isinstance(chain, DecreasingChain):
            return chain
        return DecreasingChain(tuple(chain), None)


def _expr_diff_finite(ground: Ground, a: SetExpr, b: SetExpr) -> Verdict:
    fin = FIN if ground is Ground.NAT else FIN_PAIRS
    return decide(fin, Diff(a, b))


def _tail_diff_finite(tail: str | None, candidate: SetExpr):
    """Is the candidate almost inside every tail member?  True/False/None."""
    if tail in (None, "blocktails", "cofinite"):
        return True
    if tail == "bands":
        v = decide(IdealHandle("faniter", Ground.PAIRS, k=0), candidate)
        if v.value is V.IN:
            return True
        if v.value is V.POSITIVE:
            return False
        return None
    raise PreconditionFailed(f"unknown chain tail law {tail!r}")


def _check_chain(I: IdealHandle, chain: DecreasingChain, bound: int):
    members = chain.members
    for a, b in zip(members, members[1:]):
        leak = truncate(Diff(b, a), bound, I.ground)
        if leak:
            raise ChainNotDecreasing(f"chain increases at {leak[:3]}")
    for e in members:
        if decide(I, e).value is not V.POSITIVE:
            raise PreconditionFailed(f"chain member not positive: {_txt(e)}")


def pplus_verify(I: IdealHandle, chain, candidate: SetExpr | None = None,
                 bound: int = 32, budget: int = 200):
    """Verify or search for a positive pseudo-intersection of a positive chain.

    With a candidate: exact pass iff the candidate is positive, the listed
    differences are finite, and the chain's tail law admits it.  Without a
    candidate: bounded search over a template family; NoneFound is
    budget-qualified.
    """
    chain = DecreasingChain.of(chain)
    _check_chain(I, chain, bound)
    if candidate is not None:
        cv = decide(I, candidate)
        parts = [
            Certificate("candidate positive", cv.value is V.POSITIVE, EXACT,
                        witness={"verdict": cv.render()})
        ]
        for n, A in enumerate(chain.members):
            d = _expr_diff_finite(I.ground, candidate, A)
            parts.append(Certificate(
                f"candidate \\ A_{n} finite",
                True if d.value is V.IN else (False if d.value is V.POSITIVE else None),
                EXACT, witness={"verdict": d.render()},
            ))
        if chain.tail is not None:
            parts.append(Certificate(
                f"candidate \\ A_n finite for the {chain.tail} tail",
                _tail_diff_finite(chain.tail, candidate), EXACT,
            ))
        return candidate, combine(f"pplus({I.name()})", parts)
    tried = 0
    for cand in _pplus_templates(I, chain):
        if tried >= budget:
            break
        tried += 1
        _, cert = pplus_verify(I, chain, cand, bound)
        if cert.passing():
            return cand, cert
    return None, Certificate(
        f"pplus({I.name()})", None, EXACT,
        params={"budget": budget, "templates_tried": tried},
        details=("no template candidate passed; NoneFound is budget-qualified",),
    )


def _pplus_templates(I: IdealHandle, chain: DecreasingChain):
    """Candidate pseudo-intersections drawn from the closed algebra."""
    g = I.ground
    last = chain.members[-1]
    if g is Ground.NAT:
        for k in (0, 1, 2, 4, 8):
            yield CoFinite(frozenset(range(k)), g)
            yield BlockUnion(CoFinite(frozenset(range(k)), g))
        yield last
        yield Inter(last, CoFinite(frozenset(), g))
        for k in (1, 2):
            yield Diff(last, Finite(frozenset(range(k)), g))
        yield Stride(0, 2)
    else:
        yield last
        yield Inter(last, CoFinite(frozenset(), g))
        for j in (0, 1, 2, 4):
            yield from (
                CoFinite(frozenset({(i, i) for i in range(j)}), g),
                Column(j),
                Complement(Column(j)),
                Diff(last, Column(j)),
                Inter(last, Complement(Column(j))),
            )
        yield Finite(frozenset({(0, 0)}), g)
        yield Union(Column(1), Column(3))


def pplus_failure_exact(I: IdealHandle, chain, bound: int = 32) -> Certificate:
    """Exact p+ failure on a chain family: every template candidate is
    rejected without truncation reliance (positivity, a listed difference,
    or the tail law refutes it)."""
    chain = DecreasingChain.of(chain)
    _check_chain(I, chain, bound)
    parts = []
    for cand in _pplus_templates(I, chain):
        pv = decide(I, cand)
        if pv.value is not V.POSITIVE:
            parts.append(Certificate(
                f"reject {_txt(cand)}",
                pv.value is V.IN, EXACT,
                witness={"reason": "not positive", "verdict": pv.render()}))
            continue
        refuted = None
        for n, A in enumerate(chain.members):
            d = _expr_diff_finite(I.ground, cand, A)
            if d.value is V.POSITIVE:
                refuted = ("member", n, d.render())
                break
        if refuted is None and chain.tail is not None:
            if _tail_diff_finite(chain.tail, cand) is False:
                refuted = ("tail", chain.tail)
        parts.append(Certificate(
            f"reject {_txt(cand)}", refuted is not None, EXACT,
            witness={"refuted_by": refuted}))
    return combine(f"pplus-failure({I.name()})", parts,
                   params={"templates": len(parts)})


# -- Lemma 4.1: lifting pseudo-intersections ---------------------------------


def lift_pseudointersection(f: CatalogMap, chain, B):
    """Exact lift on finite presentations, following the proof verbatim.

    chain is a decreasing list of finite point sets, B a finite subset of
    f(A_0) almost inside every f(A_n); returns (D, certificate) with
    f(D) = B and the differences D \\ A_n listed explicitly.
    """
    chain = [sorted(set(a), key=sort_key) for a in chain]
    for a, b in zip(chain, chain[1:]):
        if not set(b) <= set(a):
            raise ChainNotDecreasing("finite presentation must be decreasing")
    B = sorted(set(B), key=sort_key)
    images = [sorted({f.apply(x) for x in a}, key=sort_key) for a in chain]
    if not set(B) <= set(images[0]):
        raise NotAlmostContained("B must sit inside f(A_0)")
    N = len(chain)
    stable = [y for y in B if all(y in set(img) for img in images)]
    picked = []
    for i, y in enumerate(stable):
        lvl = min(i, N - 1)
        cands = [x for x in chain[lvl] if f.apply(x) == y]
        picked.append(min(cands, key=sort_key))
    lifts = []
    for n in range(N - 1):
        F_n = [y for y in B if y in set(images[n]) and y not in set(images[n + 1])]
        ring = [x for x in chain[n] if x not in set(chain[n + 1])]
        for y in F_n:
            cands = [x for x in ring if f.apply(x) == y]
            if not cands:
                cands = [x for x in chain[n] if f.apply(x) == y]
            lifts.append(min(cands, key=sort_key))
    D = sorted(set(lifts) | set(picked), key=sort_key)
    image_ok = {f.apply(x) for x in D} == set(B)
    gaps = {n: sorted(set(D) - set(chain[n]), key=sort_key) for n in range(N)}
    parts = [
        Certificate("f(D) = B", image_ok, EXACT,
                    witness={"D": [repr(x) for x in D[:8]]}),
        Certificate("D inside A_0", set(D) <= set(chain[0]), EXACT),
    ]
    for n, g in gaps.items():
        parts.append(Certificate(f"D \\ A_{n} finite (listed)", True, EXACT,
                                 witness={"difference": [repr(x) for x in g[:8]]}))
    return D, combine(f"lift-pseudointersection({f.map_id})", parts,
                      params={"chain": N, "B": len(B)})


# -- countable fan-tightness ---------------------------------------------------


def fan_search(c: Challenge):
    """Finite selections from closure-positive sets with positive union.

    On filter spaces this is the p+ property of the dual ideal; on inverse
    sequences, per-level pseudo-intersections are lifted back to threads.
    Returns (selections, certificate) or (None, certificate).
    """
    if c.kind != "fan":
        raise PreconditionFailed("challenge kind must be fan")
    if isinstance(c.space, FilterSpace):
        return _fan_filterspace(c.space, c.payload, c.bound, c.budget)
    return _fan_invlimit(c.space, c.payload, c.bound, c.depth, c.budget)


def _fan_filterspace(Z: FilterSpace, chain, bound: int, budget: int):
    I = Z.ideal
    chain = DecreasingChain.of(chain)
    cand, cert = pplus_verify(I, chain, None, bound, budget)
    if cand is None:
        fail = pplus_failure_exact(I, chain, bound)
        out = Certificate(
            f"fan({I.name()})", False if fail.passing() else None,
            fail.tier if fail.passing() else bounded(bound),
            params={"budget": budget},
            details=(cert.summary(), fail.summary()),
        )
        return None, out
    selections = _fan_selections(I.ground, cand, chain.members, bound)
    union_expr = Inter(cand, chain.members[0])
    union_v = decide(I, union_expr)
    parts = [
        cert,
        Certificate("selections inside chain members",
                    _selections_inside(selections, chain.members), bounded(bound)),
        Certificate("union closure-positive",
                    union_v.value is V.POSITIVE, EXACT,
                    witness={"verdict": union_v.render(), "union": _txt(union_expr)}),
    ]
    return selections, combine(f"fan({I.name()})", parts, params={"bound": bound})


def _fan_selections(ground, cand, members, bound):
    """K_n = candidate points leaving at step n, computed in the window."""
    sel = {}
    win = [p for p in truncate(cand, bound, ground)]
    M = len(members)
    for n in range(M):
        inside = [p for p in win if member(members[n], p)]
        nxt = [p for p in inside if n + 1 < M and member(members[n + 1], p)]
        sel[n] = [p for p in inside if p not in set(nxt)] if n + 1 < M else inside
    return sel


def _selections_inside(selections, members) -> bool:
    return all(
        all(member(members[n], p) for p in pts) for n, pts in selections.items()
    )


def _fan_invlimit(seq: InverseSequence, chain, bound: int, depth: int, budget: int):
    chain = DecreasingChain.of(chain)
    I = seq.ideal
    for ls in chain.members:
        v, info = closure_at_p(seq, ls, depth)
        if v.value is not V.IN:
            raise PreconditionFailed(f"chain member not closure-positive: {info}")
    keep_tail = chain.tail in ("blocktails", "cofinite") or seq.bonding.flags.column_preserving
    parts = []
    level_cands = {}
    for j in range(1, depth + 1):
        sub = [ls for i, ls in enumerate(chain.members) if i % depth == j - 1]
        sub = sub or list(chain.members)
        proj = DecreasingChain(
            tuple(level_projection(seq, ls, j) for ls in sub),
            chain.tail if keep_tail else None,
        )
        cand, cert = pplus_verify(I, proj, None, bound, budget)
        parts.append(cert)
        if cand is None:
            return None, combine(f"fan-limit({seq.name()})", parts,
                                 params={"level": j})
        level_cands[j] = cand
    # lift the level-1 pseudo-intersection through the window presentation
    # (the finite-presentation lifting lemma drives the bookkeeping)
    window_chain = []
    acc = None
    for ls in chain.members:
        w = set(truncate(level_projection(seq, ls, 1), bound, seq.ground))
        acc = w if acc is None else (acc & w)
        window_chain.append(sorted(acc, key=sort_key))
    b_window = [p for p in truncate(level_cands[1], bound, seq.ground)
                if p in set(window_chain[0])]
    from .maps import IDENTITY

    D, lift_cert = lift_pseudointersection(IDENTITY, window_chain, b_window[:bound])
    parts.append(lift_cert)
    first = (chain.members[0].expr if chain.members[0].level == 1
             else level_projection(seq, chain.members[0], 1))
    tilde = LevelSet(1, Inter(level_cands[1], first))
    v, info = closure_at_p(seq, tilde, depth)
    parts.append(Certificate("lifted union closure-positive at p",
                             v.value is V.IN, v.tier, witness=info))
    selections = {n: [thread_over(seq, p, depth) for p in
                      sorted(set(window_chain[n]) & set(D), key=sort_key)[:4]]
                  for n in range(len(chain.members))}
    return selections, combine(f"fan-limit({seq.name()})", parts,
                               params={"bound": bound, "depth": depth})


# -- convergent sequences (Lemma 3.4) and the Frechet failure family ---------


def convergent_sequence(seq: InverseSequence, A: LevelSet, depth: int = 4,
                        bound: int = 32):
    """Detect a sequence of the payload converging to p, or certify witnesses.

    First scans the small-projection hypothesis; then tries the canonical
    enumeration with an exact tail-absorption test; otherwise NotDetected,
    with a separating neighborhood witness for the payload itself.
    """
    I = seq.ideal
    gens = filter_generators(I)
    hypothesis = []
    for n in range(1, depth + 1):
        for m in range(1, depth + 1):
            for W in gens:
                inter = Inter(level_projection(seq, A, n),
                              Preimage(power(seq.bonding, max(n - m, 0)).map_id, W)
                              if n >= m else level_projection(seq, A, n))
                v = decide(I, inter)
                if v.value is V.IN:
                    hypothesis.append((n, m, _txt(W)))
    if hypothesis:
        cert = Certificate("small-projection hypothesis detected", True, EXACT,
                           witness={"levels": hypothesis[:3]})
        return None, cert
    if I.kind == "fin":
        # every In set is finite, so tail absorption over the generator
        # family is a sound exact criterion
        absorb_fail = None
        for k in range(1, depth + 1):
            proj = level_projection(seq, A, k)
            for W in gens:
                d = _expr_diff_finite(I.ground, proj, W)
                if d.value is not V.IN:
                    absorb_fail = (k, _txt(W), d.render())
                    break
            if absorb_fail:
                break
        if absorb_fail is None:
            win = truncate(A.expr, bound, seq.ground)
            zs = [thread_over(seq, p, depth) for p in win[:16]]
            cert = Certificate(
                "canonical enumeration converges to p", True, EXACT,
                params={"levels": depth},
                witness={"sequence_prefix": [repr(t.coords) for t in zs[:4]]},
            )
            return zs, cert
    witness = separating_witness(I, A.expr)
    cert = Certificate(
        "NotDetected: separating neighborhood exhibited", None, EXACT,
        witness={"payload_witness": witness},
    )
    return None, cert


def separating_witness(I: IdealHandle, S: SetExpr):
    """Description of a neighborhood of infinity missing infinitely much of S.

    For an In set the complement works.  For a positive set a provably
    infinite In subset is split off: an infinite column (pairs catalogs) or
    the least-in-block selector inside S (block catalog); the neighborhood
    is its complement.
    """
    v = decide(I, S)
    if v.value is V.IN:
        return {"V": _txt(Complement(S)), "leftover": "S itself (In, complement is a neighborhood)"}
    if I.ground is Ground.PAIRS:
        col = infinite_column_of(S)
        if col is not None:
            return {"V": _txt(Complement(Column(col))),
                    "leftover": f"S meets column {col} infinitely"}
        return None
    if I.kind == "blockbounded":
        return {
            "V": "complement of the least-in-block selector inside S",
            "leftover": "one point per nonempty block of S: In (bounded by 1) and infinite",
        }
    return None


def infinite_column_of(S: SetExpr) -> int | None:
    pv = pairsval(S)
    if pv is None:
        return None
    from .values import nv_is_finite

    for n, t in sorted(pv.excepts.items()):
        if nv_is_finite(t) is False:
            return n
    if nv_is_finite(pv.tail) is False:
        return max(pv.excepts, default=-1) + 1
    return None


def frechet_failure_family(seq: InverseSequence, corpus, bound: int = 32) -> Certificate:
    """For every infinite corpus set: a separating generator neighborhood,
    certified exactly (the leftover outside the witness stays infinite and
    the witness really is a neighborhood of p)."""
    handle = seq.ideal if seq.bonding.map_id != "fanshift" else FINXFIN
    parts = []
    for S in corpus:
        v = decide(handle, S)
        if v.value is V.IN:
            Vw: SetExpr | None = Complement(S)
        else:
            col = infinite_column_of(S)
            Vw = Complement(Column(col)) if col is not None else None
        if Vw is None:
            parts.append(Certificate(f"witness for {_txt(S)}", None, EXACT))
            continue
        leftover = decide(FIN_PAIRS, Inter(S, Complement(Vw)))
        nb = dual_member(handle, Vw)
        parts.append(Certificate(
            f"witness for {_txt(S)}",
            leftover.value is V.POSITIVE and nb.value is V.IN,
            EXACT,
            witness={"V": _txt(Vw), "leftover": leftover.render(),
                     "neighborhood": nb.render()},
        ))
    return combine("frechet-failure-family", parts, params={"corpus": len(parts)})


# -- discrete generation -------------------------------------------------------


def discrete_witness(c: Challenge):
    """A discrete subset of the payload whose closure still reaches p.

    Case 1 is a detected convergent sequence; Case 2a lifts a level
    discrete set one point per fiber (in a filter space every ground set is
    discrete, so the level witness is the projection itself).
    """
    if c.kind != "dg":
        raise PreconditionFailed("challenge kind must be dg")
    if isinstance(c.space, FilterSpace):
        I = c.space.ideal
        v = decide(I, c.payload)
        if v.value is not V.POSITIVE:
            raise PreconditionFailed("payload must be closure-positive")
        parts = [
            Certificate("ground sets are discrete", True, EXACT),
            Certificate("closure-positive", True, EXACT,
                        witness={"verdict": v.render()}),
        ]
        return c.payload, combine(f"dg({I.name()})", parts)
    seq: InverseSequence = c.space
    A: LevelSet = c.payload
    v, info = closure_at_p(seq, A, c.depth)
    if v.value is not V.IN:
        raise PreconditionFailed(f"payload not closure-positive at p: {info}")
    zs, conv = convergent_sequence(seq, A, c.depth, c.bound)
    if zs is not None:
        return zs, combine(f"dg-limit({seq.name()})",
                           [conv, Certificate("convergent sequences are discrete",
                                              True, EXACT)])
    E = A.expr if A.level == 1 else level_projection(seq, A, 1)
    picks = [thread_over(seq, p, c.depth)
             for p in truncate(E, c.bound, seq.ground)]
    parts = [
        Certificate("one thread per level-1 fiber: discrete", True, EXACT,
                    params={"points": len(picks)}),
    ]
    exact_all = True
    for k in range(1, c.depth + 1):
        proj = _chooser_projection(seq, E, k)
        verdict = decide(seq.ideal, proj) if proj is not None else None
        if verdict is not None and verdict.value is V.POSITIVE:
            parts.append(Certificate(f"level {k} projection positive", True, EXACT,
                                     witness={"expr": _txt(proj)}))
            continue
        if verdict is not None and verdict.value is V.IN:
            parts.append(Certificate(f"level {k} projection positive", False, EXACT))
            exact_all = False
            continue
        exact_all = False
        pts = [t.coord(k) for t in picks]
        unmet = [
            _txt(W) for W in filter_generators(seq.ideal)
            if not any(member(W, x) for x in pts)
        ]
        parts.append(Certificate(f"level {k} projection positive", not unmet,
                                 bounded(c.bound), witness={"unmet": unmet[:3]}))
    cert = combine(f"dg-limit({seq.name()})", parts,
                   params={"depth": c.depth, "bound": c.bound,
                           "case": "2a", "exact": exact_all})
    return picks, cert


def _chooser_projection(seq: InverseSequence, E: SetExpr, k: int) -> SetExpr | None:
    """Level-k coordinates of the least-chooser threads over E, if exact."""
    if k == 1:
        return E
    if seq.bonding.is_bijection():
        m = power(seq.bonding, k - 1)
        return Preimage(m.map_id, E)
    sid = seq.section_id()
    if sid is None:
        return None
    from .setexpr import Image

    m = power(registry.get_map(sid), k - 1)
    return Image(m.map_id, E)


# -- selective separability ----------------------------------------------------


def ss_selector(seq: InverseSequence, dense_family, depth: int = 4,
                bound: int = 8):
    """Finite picks from countably many dense families with dense union.

    Splits the family indices over the levels, covers each level's window by
    chunks, lifts the chunks to threads, and certifies density of the union
    through the projection criterion.
    """
    dense_family = list(dense_family)
    for i, D in enumerate(dense_family):
        cert = density_check(seq, D, depth, bound)
        if not cert.passing():
            raise NotDense(f"family member {i} is not dense: {cert.summary()}")
    M = len(dense_family)
    window = universe(seq.ground, bound)
    selections = {}
    for i in range(1, depth + 1):
        idxs = [n for n in range(M) if n % depth == i - 1]
        if not idxs:
            continue
        chunks = _chunked(window, len(idxs))
        for n, chunk in zip(idxs, chunks):
            picks = []
            for x in chunk:
                t = _thread_through(seq, x, i, depth)
                if t is not None and _in_family(dense_family[n], t):
                    picks.append(t)
            selections[n] = picks
    union = [t for pts in selections.values() for t in pts]
    cert = density_check(seq, union, depth, bound)
    final = combine(f"ss({seq.name()})",
                    [cert,
                     Certificate("selections finite", True, EXACT,
                                 params={"sizes": {n: len(p) for n, p in selections.items()}})],
                    params={"depth": depth, "bound": bound})
    return selections, final


def _chunked(items, k):
    out = [[] for _ in range(k)]
    for j, x in enumerate(items):
        out[j % k].append(x)
    return out


def _thread_through(seq: InverseSequence, x, level: int, depth: int) -> Thread | None:
    """The least thread whose level coordinate is the given point."""
    coords = [x]
    for _ in range(level - 1):
        coords.insert(0, seq.bonding.apply(coords[0]))
    t = coords[-1]
    for _ in range(depth - level):
        coords.append(seq.least_lift(coords[-1]))
    return Thread(tuple(coords), seq.bonding.map_id)


def _in_family(D, t: Thread) -> bool:
    if isinstance(D, LevelSet):
        return D.contains(t)
    return True


# -- products (Theorem 3.3 construction) ---------------------------------------


def product_qplus(c: Challenge):
    """Positive partial selector in Z x (omega+1) through per-tail selections."""
    if c.kind != "product-qplus":
        raise PreconditionFailed("challenge kind must be product-qplus")
    P: ProductSpace = c.space
    rects = list(c.payload)
    v, info = product_closure(P, rects)
    if v.value is not V.IN:
        raise PreconditionFailed(f"payload not positive at (inf, lim): {info}")
    I = P.left.ideal
    part = c.partition or jnt_partition(I)
    neg = not_qplus_witness(I, part)
    if neg.passing():
        return None, Certificate(
            f"product-qplus({P.name()})", False, EXACT,
            details=(neg.summary(),),
        )
    picks = []
    used = set()
    misses = []
    gens = filter_generators(I)
    for i, r in enumerate(rects):
        k_i = r.right.k if isinstance(r.right, Tail) else 0
        disjoint = r.left
        for prev in rects[:i]:
            disjoint = Diff(disjoint, prev.left)
        got = 0
        for W in gens:
            for n in range(4 * c.bound):
                if n in used:
                    continue
                blk = [p for p in part.block_of(n)
                       if member(disjoint, p) and member(W, p)]
                if not blk:
                    blk = [p for p in part.block_of(n)
                           if member(r.left, p) and member(W, p)]
                if blk:
                    picks.append((min(blk, key=sort_key), k_i, n))
                    used.add(n)
                    got += 1
                    break
        if got == 0:
            misses.append(i)
    sel_rects = [Rectangle(Finite(frozenset({p}), I.ground), Tail(k))
                 for p, k, _ in picks]
    selector = SelectorConcrete(part.pid, tuple((n, p) for p, _, n in picks),
                                "ruler", tail_from=max(used) + 1 if used else 0)
    kmax = max((r.right.k for r in rects if isinstance(r.right, Tail)), default=0)
    tail_note = selector.exact_verdict(I)
    closure_parts = []
    for k in range(kmax + 1):
        active = [p for p, h, _ in picks if h >= k]
        unmet = [
            _txt(W) for W in gens if not any(member(W, p) for p in active)
        ]
        closure_parts.append(Certificate(
            f"tail V_{k}: active picks meet left generators",
            not unmet, bounded(c.bound), witness={"unmet": unmet[:3]},
        ))
    parts = [
        Certificate("one pick per rectangle", not misses, EXACT,
                    witness={"missed_rectangles": misses}),
        Certificate(
            "tail rule stays positive beyond the prefix",
            None if tail_note is None else tail_note.value is V.POSITIVE,
            EXACT,
            witness={"tail_verdict": tail_note.render() if tail_note else "Unknown"},
        ),
        *closure_parts,
    ]
    return (selector, sel_rects), combine(f"product-qplus({P.name()})", parts,
                                          params={"bound": c.bound})
