"""Catalog of bonding maps, map algebra, and morphism / Katetov checking.

The four catalog maps come straight from the worked examples: a within-column
2-to-1 collapse, the 2-to-1 shift along the power-of-two blocks (made total by
fixing it on L_0), its columnwise version, and the bijective fan shift.  Each
map carries optional value-level summary transforms so preimages and (where
the algebra stays closed) images remain exactly analyzable; powers iterate
the transforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from . import registry
from .errors import NotBijective, OrientationMismatch
from .grounds import BLOCKS, Ground
from .grounds import sort_key as _sort_key
from .values import (
    nv_boundary,
    nv_bs_img,
    nv_bs_pre,
    nv_bsl_img,
    nv_bsl_pre,
    nv_double_img,
    nv_double_pre,
    nv_empty,
    nv_eventual,
    nv_full,
    nv_half_pre_even,
    nv_halve_img,
    PairsVal,
    pv_columnwise,
    pv_fanshift_pre,
)


@dataclass(frozen=True)
class MapFlags:
    injective: bool = False
    surjective: bool = False
    finite_to_one: bool = True
    column_preserving: bool = False
    block_preserving: bool = False


@dataclass(eq=False)
class CatalogMap:
    """A total map of ground sets with computable fibers and summary hooks.

    The optional hooks transform summaries of a set into summaries of its
    preimage/image under the map; a missing hook (or a hook returning None)
    means the analysis falls back to pointwise semantics only.
    """

    map_id: str
    domain: Optional[Ground]
    codomain: Optional[Ground]
    apply: Callable
    fiber: Callable
    flags: MapFlags
    pre_val: Optional[Callable] = None
    img_val: Optional[Callable] = None
    pre_from_nat: Optional[Callable] = None
    lift: Optional[Callable] = None

    @property
    def ground(self):
        return self.domain if self.domain is self.codomain else None

    def is_bijection(self) -> bool:
        return self.flags.injective and self.flags.surjective

    def least_lift(self, y):
        """Canonically least fiber element (overridable for infinite fibers)."""
        if self.lift is not None:
            return self.lift(y)
        fb = self.fiber(y)
        if not fb:
            raise NotBijective(f"{self.map_id} has no lift above {y!r}")
        return min(fb, key=_sort_key)


# -- concrete maps ---------------------------------------------------------

IDENTITY = CatalogMap(
    "identity",
    None,
    None,
    lambda p: p,
    lambda p: [p],
    MapFlags(injective=True, surjective=True, column_preserving=True, block_preserving=True),
    pre_val=lambda v: v,
    img_val=lambda v: v,
)


COL2TO1 = CatalogMap(
    "col2to1",
    Ground.PAIRS,
    Ground.PAIRS,
    lambda p: (p[0], p[1] // 2),
    lambda p: [(p[0], 2 * p[1]), (p[0], 2 * p[1] + 1)],
    MapFlags(surjective=True, column_preserving=True),
    pre_val=lambda pv: pv_columnwise(pv, nv_double_pre),
    img_val=lambda pv: pv_columnwise(pv, nv_halve_img),
)


COL2TO1_LEAST = CatalogMap(
    "col2to1_least",
    Ground.PAIRS,
    Ground.PAIRS,
    lambda p: (p[0], 2 * p[1]),
    lambda p: [(p[0], p[1] // 2)] if p[1] % 2 == 0 else [],
    MapFlags(injective=True, column_preserving=True),
    pre_val=lambda pv: pv_columnwise(pv, nv_half_pre_even),
    img_val=lambda pv: pv_columnwise(pv, nv_double_img),
)


def _bs_apply(x):
    n = BLOCKS.block_index(x)
    if n == 0:
        return 0
    return BLOCKS.start(n - 1) + BLOCKS.position(x) // 2


def _bs_fiber(y):
    up = BLOCKS.start(BLOCKS.block_index(y) + 1) + 2 * BLOCKS.position(y)
    out = [up, up + 1]
    if y == 0:
        out = [0] + out
    return out


BLOCKSHIFT = CatalogMap(
    "blockshift",
    Ground.NAT,
    Ground.NAT,
    _bs_apply,
    _bs_fiber,
    MapFlags(surjective=True, block_preserving=True),
    pre_val=nv_bs_pre,
    img_val=nv_bs_img,
)


def _bsl_apply(y):
    if y == 0:
        return 0
    n = BLOCKS.block_index(y)
    return BLOCKS.start(n + 1) + 2 * BLOCKS.position(y)


def _bsl_fiber(x):
    if x == 0:
        return [0]
    n = BLOCKS.block_index(x)
    i = BLOCKS.position(x)
    if n >= 1 and i % 2 == 0:
        return [BLOCKS.start(n - 1) + i // 2]
    return []


BLOCKSHIFT_LEAST = CatalogMap(
    "blockshift_least",
    Ground.NAT,
    Ground.NAT,
    _bsl_apply,
    _bsl_fiber,
    MapFlags(injective=True),
    pre_val=nv_bsl_pre,
    img_val=nv_bsl_img,
)


GMAP = CatalogMap(
    "gmap",
    Ground.PAIRS,
    Ground.PAIRS,
    lambda p: (p[0], _bs_apply(p[1])),
    lambda p: [(p[0], y) for y in _bs_fiber(p[1])],
    MapFlags(surjective=True, column_preserving=True),
    pre_val=lambda pv: pv_columnwise(pv, nv_bs_pre),
    img_val=lambda pv: pv_columnwise(pv, nv_bs_img),
)


GMAP_LEAST = CatalogMap(
    "gmap_least",
    Ground.PAIRS,
    Ground.PAIRS,
    lambda p: (p[0], _bsl_apply(p[1])),
    lambda p: [(p[0], y) for y in _bsl_fiber(p[1])],
    MapFlags(injective=True, column_preserving=True),
    pre_val=lambda pv: pv_columnwise(pv, nv_bsl_pre),
    img_val=lambda pv: pv_columnwise(pv, nv_bsl_img),
)


def _fanshift_apply(p):
    n, m = p
    if m == 0:
        return (0, n)
    return (n + 1, m - 1)


def _fanshift_fiber(p):
    a, b = p
    if a == 0:
        return [(b, 0)]
    return [(a - 1, b + 1)]


FANSHIFT = CatalogMap(
    "fanshift",
    Ground.PAIRS,
    Ground.PAIRS,
    _fanshift_apply,
    _fanshift_fiber,
    MapFlags(injective=True, surjective=True),
    pre_val=pv_fanshift_pre,
    # images under the shift leave the exact column algebra: img_val absent,
    # Image nodes over it degrade to pointwise semantics (Unknown verdicts)
)


def _no_fiber(y):
    raise NotBijective("column collapse has infinite fibers")


def _colcollapse_pre(v) -> Optional[PairsVal]:
    ev = nv_eventual(v)
    bnd = nv_boundary(v)
    if ev is None or bnd is None:
        return None
    tail = nv_full() if ev else nv_empty()
    excepts = {n: (nv_full() if v.mem(n) else nv_empty()) for n in bnd}
    return PairsVal(excepts, tail)


COLCOLLAPSE = CatalogMap(
    "colcollapse",
    Ground.PAIRS,
    Ground.NAT,
    lambda p: p[0],
    _no_fiber,
    MapFlags(surjective=True, finite_to_one=False),
    pre_from_nat=_colcollapse_pre,
    lift=lambda n: (n, 0),
)


for _m in (
    IDENTITY,
    COL2TO1,
    COL2TO1_LEAST,
    BLOCKSHIFT,
    BLOCKSHIFT_LEAST,
    GMAP,
    GMAP_LEAST,
    FANSHIFT,
    COLCOLLAPSE,
):
    registry.register_map(_m)


# -- composition -----------------------------------------------------------


def power(f: CatalogMap, k: int) -> CatalogMap:
    """k-fold composition; fibers compose along chains, hooks iterate."""
    assert k >= 0
    if k == 0:
        return IDENTITY
    if k == 1:
        return f
    mid = f"pow({f.map_id},{k})"
    if registry.has_map(mid):
        return registry.get_map(mid)

    def apply(p, _f=f, _k=k):
        for _ in range(_k):
            p = _f.apply(p)
        return p

    def fiber(y, _f=f, _k=k):
        level = [y]
        for _ in range(_k):
            level = [x for z in level for x in _f.fiber(z)]
        return level

    out = CatalogMap(
        mid,
        f.domain,
        f.codomain,
        apply,
        fiber,
        f.flags,
        pre_val=_iterate(f.pre_val, k),
        img_val=_iterate(f.img_val, k),
    )
    registry.register_map(out)
    return out


def power_id(base: str, k: int) -> str:
    return power(registry.get_map(base), k).map_id


def _iterate(hook, k):
    if hook is None:
        return None

    def run(v, _hook=hook, _k=k):
        for _ in range(_k):
            v = _hook(v)
            if v is None:
                return None
        return v

    return run


def bonding(f: CatalogMap, n: int, m: int) -> CatalogMap:
    """f_n^m, the composite bonding map between levels n < m."""
    if m <= n:
        raise OrientationMismatch("bonding maps require m > n")
    return power(f, m - n)


# -- Katetov witnesses and space morphisms -----------------------------------


def check_katetov(f: CatalogMap, I, J, test_family) -> "Certificate":
    """Does f: Y -> X witness I <=_K J on the supplied family of I-sets?

    Exact pass iff every family member is In I and its preimage is In J;
    the first counterexample is recorded.
    """
    from .errors import OrientationMismatch as _OM
    from .ideals import decide as _decide
    from .setexpr import Preimage as _Pre, ground_of as _g
    from .verdicts import Certificate as _Cert, EXACT as _EX, V as _V

    if f.codomain is not None and f.codomain is not I.ground:
        raise _OM("map must land in the carrier of the lower ideal")
    if f.domain is not None and f.domain is not J.ground:
        raise _OM("map must start from the carrier of the upper ideal")
    checked = 0
    for E in test_family:
        if _decide(I, E).value is not _V.IN:
            return _Cert(
                f"katetov({f.map_id})", False, _EX,
                witness={"reason": "family member not In the lower ideal",
                         "member": _render(E)},
            )
        v = _decide(J, _Pre(f.map_id, E))
        if v.value is not _V.IN:
            return _Cert(
                f"katetov({f.map_id})", False, _EX,
                witness={"counterexample": _render(E), "verdict": v.render()},
            )
        checked += 1
    return _Cert(f"katetov({f.map_id})", True, _EX, params={"family": checked})


def _render(e) -> str:
    from .dsl import to_text

    try:
        return to_text(e)
    except Exception:
        return repr(e)


def check_morphism(f: CatalogMap, src, dst, mode: str, test_family=None, bound: int = 64) -> "Certificate":
    """Continuity / closedness / openness of f between two filter spaces.

    f is implicitly extended by sending infinity to infinity.  Continuity is
    quantified exactly over the destination generator family; closed and
    open run over a test family of closed sets (resp. filter generators),
    exactly where the image stays in the algebra and at the window otherwise.
    """
    from .ideals import decide as _decide, dual_member as _dm, in_generators as _gens
    from .setexpr import Complement as _C, Image as _Img, Preimage as _Pre, truncate as _tr
    from .grounds import universe as _universe
    from .verdicts import Certificate as _Cert, EXACT as _EX, V as _V, bounded as _bounded
    from .windows import small_consistent, stat_for

    claim = f"morphism({f.map_id}, {mode})"
    if mode == "continuous":
        for g in _gens(dst.ideal):
            v = _decide(src.ideal, _Pre(f.map_id, g))
            if v.value is not _V.IN:
                return _Cert(claim, False, _EX,
                             witness={"generator": _render(g), "verdict": v.render()})
        return _Cert(claim, True, _EX, params={"generators": len(_gens(dst.ideal))})

    custom = test_family is not None
    exact_all = True
    if mode == "closed":
        family = list(test_family) if custom else _gens(src.ideal)
        for D in family:
            verdict = None
            if f.flags.finite_to_one:
                verdict = _decide(dst.ideal, _Img(f.map_id, D))
            if verdict is not None and verdict.value is _V.IN:
                continue
            if verdict is not None and verdict.value is _V.POSITIVE:
                return _Cert(claim, False, _bounded(bound),
                             witness={"closed_set": _render(D), "verdict": verdict.render()})
            exact_all = False
            stat = stat_for(dst.ideal.ground, dst.ideal.kind)
            vals = []
            for w in (bound // 4, bound // 2, bound):
                img = {f.apply(p) for p in _tr(D, w, src.ideal.ground)}
                vals.append(stat(img, w))
            if not small_consistent(vals):
                return _Cert(claim, False, _bounded(bound),
                             witness={"closed_set": _render(D), "stats": vals})
        tier = _EX if (exact_all and not custom and _preserving(f)) else _bounded(bound)
        return _Cert(claim, True, tier, params={"family": len(family)})

    if mode == "open":
        family = list(test_family) if custom else [_C(g) for g in _gens(src.ideal)]
        for Vn in family:
            verdict = None
            if f.flags.finite_to_one:
                verdict = _dm(dst.ideal, _Img(f.map_id, Vn))
            if verdict is not None and verdict.value is _V.IN:
                continue
            if verdict is not None and verdict.value is _V.POSITIVE:
                return _Cert(claim, False, _bounded(bound),
                             witness={"open_set": _render(Vn), "verdict": verdict.render()})
            exact_all = False
            stat = stat_for(dst.ideal.ground, dst.ideal.kind)
            vals = []
            for w in (bound // 4, bound // 2, bound):
                img = {f.apply(p) for p in _tr(Vn, 2 * w, src.ideal.ground)}
                missed = [y for y in _universe(dst.ideal.ground, w) if y not in img]
                vals.append(stat(missed, w))
            if not small_consistent(vals):
                return _Cert(claim, False, _bounded(bound),
                             witness={"open_set": _render(Vn), "missed_stats": vals})
        tier = _EX if (exact_all and not custom and _preserving(f)) else _bounded(bound)
        return _Cert(claim, True, tier, params={"family": len(family)})

    raise ValueError(f"unknown morphism mode {mode!r}")


def _preserving(f: CatalogMap) -> bool:
    return f.flags.column_preserving or f.flags.block_preserving


def iterated_filter(f: CatalogMap, filter_dual, k: int):
    """Dual-ideal view of the pushed-forward filter f^k(F).

    Requires a bijection.  The fan shift has the closed-form decider; the
    identity returns the filter unchanged; any other bijection yields an
    opaque handle whose decides are Unknown.
    """
    from .errors import NotBijective as _NB
    from .grounds import Ground as _G
    from .ideals import IdealHandle as _IH, faniter as _faniter

    if not f.is_bijection():
        raise _NB(f"{f.map_id} is not a bijection")
    if k == 0 or f.map_id == "identity":
        return filter_dual
    if f.map_id == "fanshift" and filter_dual.kind == "faniter" and filter_dual.k == 0:
        return _faniter(k)
    return _IH("opaque", f.domain if f.domain is not None else _G.PAIRS)
