"""Filter spaces Z(F) and the product with a convergent sequence.

Z(F) puts the ground set as isolated points and makes F the neighborhood
filter of the single accumulation point.  All topology queries reduce to the
exact tri-valued deciders of the underlying dual ideal.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import GroundSetMismatch, UnsupportedShape
from .grounds import Ground
from .ideals import IdealHandle, decide, dual_member, in_generators
from .setexpr import (
    Complement,
    Finite,
    Inter,
    SetExpr,
    ground_of,
    is_schematic,
    member,
    truncate,
)
from .verdicts import EXACT, IN, POSITIVE, UNKNOWN, Certificate, V, Verdict

INFINITY = "inf"


@dataclass(frozen=True)
class FilterSpace:
    """The space on ground + {inf} whose neighborhood filter of inf is I*."""

    ideal: IdealHandle

    @property
    def ground(self) -> Ground:
        return self.ideal.ground

    def name(self) -> str:
        return f"Z(dual {self.ideal.name()})"


def in_closure(Z: FilterSpace, e: SetExpr, target=INFINITY) -> Verdict:
    """Is the target point in the closure of the denoted set?

    In means yes; Positive means certified outside (the complement of the
    set is then a separating neighborhood); Unknown when undecided.  For a
    schematic expression the answer is universal over instantiations.
    """
    if target != INFINITY:
        if is_schematic(e):
            return UNKNOWN
        return IN if member(e, target) else POSITIVE
    v = decide(Z.ideal, e)
    if v.value is V.POSITIVE:
        return Verdict(V.IN, v.tier)
    if v.value is V.IN:
        return Verdict(V.POSITIVE, v.tier)
    return UNKNOWN


def closure_witness(Z: FilterSpace, e: SetExpr) -> SetExpr | None:
    """A separating neighborhood of inf when the closure misses it."""
    if in_closure(Z, e).value is V.POSITIVE:
        return Complement(e)
    return None


def neighborhood_ideal(Z: FilterSpace) -> IdealHandle:
    """The ideal of sets whose closure misses inf; equals the dual ideal."""
    return Z.ideal


# -- product with the convergent sequence omega + 1 -------------------------


@dataclass(frozen=True)
class Tail:
    """The basic open {k, k+1, ...} + lim of omega + 1."""

    k: int


@dataclass(frozen=True)
class FinitePart:
    """A finite set of isolated points of omega + 1, optionally with lim."""

    points: frozenset
    with_lim: bool = False


@dataclass(frozen=True)
class Rectangle:
    left: SetExpr
    right: "Tail | FinitePart"


@dataclass(frozen=True)
class ProductSpace:
    """Z(F) x (omega + 1), with its countable local base of tails at lim."""

    left: FilterSpace

    def name(self) -> str:
        return f"{self.left.name()} x (omega+1)"


def _right_meets_tail(r, k: int) -> bool:
    if isinstance(r, Tail):
        return True
    if isinstance(r, FinitePart):
        return r.with_lim or any(p >= k for p in r.points)
    raise UnsupportedShape(f"unsupported right factor part {r!r}")


def product_closure(P: ProductSpace, rectangles, kmax: int = 8) -> tuple[Verdict, dict]:
    """Closure query at (inf, lim) for a finite union of rectangles.

    For each tail neighborhood V_k the active rectangles are those whose
    right part meets V_k; the union of their left parts must be positive.
    The active family is monotone in k and stabilizes past the largest
    structural constant, so finitely many checks are exact.
    """
    rects = list(rectangles)
    for r in rects:
        if not isinstance(r, Rectangle):
            raise UnsupportedShape("product closure needs rectangle descriptions")
    consts = [r.right.k if isinstance(r.right, Tail) else max(r.right.points, default=0) for r in rects]
    k_top = max([kmax] + [c + 1 for c in consts])
    witness: dict = {}
    saw_unknown = False
    for k in range(k_top + 1):
        active = [r.left for r in rects if _right_meets_tail(r.right, k)]
        if not active:
            witness = {"separating_k": k, "reason": "no rectangle reaches the tail"}
            return POSITIVE, witness
        u = active[0]
        for other in active[1:]:
            from .setexpr import Union as _Union

            u = _Union(u, other)
        v = decide(P.left.ideal, u)
        if v.value is V.IN:
            witness = {"separating_k": k, "left_union_verdict": v.render()}
            return POSITIVE, witness
        if v.value is not V.POSITIVE:
            saw_unknown = True
    if saw_unknown:
        return UNKNOWN, {}
    return IN, {"checked_tails": k_top + 1}


def isolated_point_law(Z: FilterSpace, p) -> bool:
    """Singletons are closed off from inf and closed onto themselves."""
    single = Finite(frozenset({p}))
    at_self = in_closure(Z, single, target=p)
    at_inf = in_closure(Z, single)
    return at_self.value is V.IN and at_inf.value is V.POSITIVE
