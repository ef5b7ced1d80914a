"""idealimit: exact deciders for ideals on countable sets, inverse limits of
filter spaces, and the selector/witness searches that certify their
combinatorial properties at desk scale."""

from . import maps as _maps  # registers the map catalog
from . import ideals as _ideals  # registers the partition catalog
from .dsl import parse, to_text
from .grounds import Ground
from .ideals import (
    BLOCKBOUNDED,
    COLBLOCK,
    FANCOLSFIN,
    FIN,
    FINXFIN,
    IdealHandle,
    decide,
    dual_member,
    faniter,
    jnt_partition,
    restrict,
    split_positive,
    unioniter,
    verify_jnt,
)
from .maps import bonding, check_katetov, check_morphism, iterated_filter, power
from .setexpr import SetExpr, member, truncate
from .values import CofiniteTrace, FiniteTrace, column_profile
from .verdicts import Certificate, Verdict, V
from .zspace import FilterSpace, ProductSpace, in_closure, neighborhood_ideal, product_closure

__all__ = [
    "parse",
    "to_text",
    "Ground",
    "IdealHandle",
    "decide",
    "dual_member",
    "member",
    "truncate",
    "FilterSpace",
    "in_closure",
    "neighborhood_ideal",
    "product_closure",
    "ProductSpace",
    "jnt_partition",
    "verify_jnt",
    "split_positive",
    "check_katetov",
    "check_morphism",
    "iterated_filter",
    "power",
    "bonding",
    "Certificate",
    "Verdict",
    "V",
    "FIN",
    "FINXFIN",
    "BLOCKBOUNDED",
    "COLBLOCK",
    "FANCOLSFIN",
    "faniter",
    "unioniter",
    "restrict",
    "SetExpr",
    "column_profile",
    "FiniteTrace",
    "CofiniteTrace",
]
