"""Textual surface syntax for set expressions.

Grammar (ASCII)::

    set := "fin" "{" pts "}" | "cofin" "{" pts "}" | "col" NUM | "row" NUM
         | "band" NUM | "block" NUM | "blocks" "(" set ")"
         | "sel" "(" ID "," NUM ")" | "pre" "(" ID "," set ")"
         | "img" "(" ID "," set ")" | "ap" NUM NUM
         | set "|" set | set "&" set | set "\\" set | "~" set | "(" set ")"
    pts := eps | pt ("," pt)* ;  pt := NUM | "(" NUM "," NUM ")"
    ID  := NAME | "pow" "(" NAME "," NUM ")"

Precedence: ~ > & > (|, \\); binary operators associate to the left.
`ap START STEP` (arithmetic progression) extends the published grammar; the
rest is exactly the documented surface.
"""

from __future__ import annotations

import re

from .errors import DslSyntaxError
from .grounds import sort_key
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
    PartitionUnion,
    Preimage,
    Row,
    SelectorSchema,
    SetExpr,
    Stride,
    Union,
)

_NUM = re.compile(r"\d+")
_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_WS = re.compile(r"\s*")


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        self.pos = _WS.match(self.text, self.pos).end()

    def peek(self):
        self.skip_ws()
        if self.pos < len(self.text):
            return self.text[self.pos]
        return ""

    def eat(self, literal: str) -> bool:
        self.skip_ws()
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str):
        if not self.eat(literal):
            raise DslSyntaxError(f"expected {literal!r}", self.pos)

    def num(self) -> int:
        self.skip_ws()
        m = _NUM.match(self.text, self.pos)
        if not m:
            raise DslSyntaxError("expected a number", self.pos)
        self.pos = m.end()
        return int(m.group(0))

    def name(self) -> str:
        self.skip_ws()
        m = _NAME.match(self.text, self.pos)
        if not m:
            raise DslSyntaxError("expected a name", self.pos)
        self.pos = m.end()
        return m.group(0)


def parse(text: str) -> SetExpr:
    cur = _Cursor(text)
    e = _parse_expr(cur)
    cur.skip_ws()
    if cur.pos != len(text):
        raise DslSyntaxError("unexpected trailing input", cur.pos)
    return e


def _parse_expr(cur: _Cursor) -> SetExpr:
    e = _parse_term(cur)
    while True:
        if cur.eat("|"):
            e = Union(e, _parse_term(cur))
        elif cur.eat("\\"):
            e = Diff(e, _parse_term(cur))
        else:
            return e


def _parse_term(cur: _Cursor) -> SetExpr:
    e = _parse_factor(cur)
    while cur.eat("&"):
        e = Inter(e, _parse_factor(cur))
    return e


def _parse_factor(cur: _Cursor) -> SetExpr:
    if cur.eat("~"):
        return Complement(_parse_factor(cur))
    return _parse_atom(cur)


def _parse_atom(cur: _Cursor) -> SetExpr:
    cur.skip_ws()
    start = cur.pos
    if cur.eat("("):
        e = _parse_expr(cur)
        cur.expect(")")
        return e
    m = _NAME.match(cur.text, cur.pos)
    if not m:
        raise DslSyntaxError("expected a set expression", cur.pos)
    word = m.group(0)
    cur.pos = m.end()
    if word == "fin":
        return Finite(frozenset(_parse_pts(cur)))
    if word == "cofin":
        return CoFinite(frozenset(_parse_pts(cur)))
    if word == "col":
        return Column(cur.num())
    if word == "row":
        return Row(cur.num())
    if word == "band":
        return BandFrom(cur.num())
    if word == "block":
        return Block(cur.num())
    if word == "blocks":
        cur.expect("(")
        inner = _parse_expr(cur)
        cur.expect(")")
        return BlockUnion(inner)
    if word == "ap":
        a = cur.num()
        d = cur.num()
        return Stride(a, d)
    if word == "sel":
        cur.expect("(")
        pid = cur.name()
        cur.expect(",")
        k = cur.num()
        cur.expect(")")
        return SelectorSchema(pid, k)
    if word == "punion":
        cur.expect("(")
        pid = cur.name()
        cur.expect(",")
        inner = _parse_expr(cur)
        cur.expect(")")
        return PartitionUnion(pid, inner)
    if word in ("pre", "img"):
        cur.expect("(")
        map_id = _parse_map_id(cur)
        cur.expect(",")
        inner = _parse_expr(cur)
        cur.expect(")")
        return Preimage(map_id, inner) if word == "pre" else Image(map_id, inner)
    raise DslSyntaxError(f"unknown set form {word!r}", start)


def _parse_map_id(cur: _Cursor) -> str:
    name = cur.name()
    if name == "pow":
        cur.expect("(")
        base = cur.name()
        cur.expect(",")
        k = cur.num()
        cur.expect(")")
        from . import maps

        return maps.power_id(base, k)
    return name


def _parse_pts(cur: _Cursor):
    cur.expect("{")
    pts = []
    if cur.eat("}"):
        return pts
    while True:
        pts.append(_parse_pt(cur))
        if cur.eat("}"):
            return pts
        cur.expect(",")


def _parse_pt(cur: _Cursor):
    cur.skip_ws()
    start = cur.pos
    if cur.eat("("):
        try:
            a = cur.num()
            cur.expect(",")
            b = cur.num()
            cur.expect(")")
        except DslSyntaxError:
            raise DslSyntaxError("malformed pair point", start) from None
        return (a, b)
    return cur.num()


# -- printing ----------------------------------------------------------

_PREC_OR = 1
_PREC_AND = 2
_PREC_NOT = 3
_PREC_ATOM = 4


def to_text(e: SetExpr) -> str:
    """Canonical rendering; parse(to_text(e)) is structurally e."""
    return _render(e, 0)


def _render(e: SetExpr, ctx: int) -> str:
    if isinstance(e, Union):
        s = f"{_render(e.left, _PREC_OR)} | {_render(e.right, _PREC_OR + 1)}"
        return _wrap(s, _PREC_OR, ctx)
    if isinstance(e, Diff):
        s = f"{_render(e.left, _PREC_OR)} \\ {_render(e.right, _PREC_OR + 1)}"
        return _wrap(s, _PREC_OR, ctx)
    if isinstance(e, Inter):
        s = f"{_render(e.left, _PREC_AND)} & {_render(e.right, _PREC_AND + 1)}"
        return _wrap(s, _PREC_AND, ctx)
    if isinstance(e, Complement):
        return _wrap(f"~{_render(e.inner, _PREC_NOT)}", _PREC_NOT, ctx)
    if isinstance(e, Finite):
        return f"fin {{{_render_pts(e.points)}}}"
    if isinstance(e, CoFinite):
        return f"cofin {{{_render_pts(e.holes)}}}"
    if isinstance(e, Column):
        return f"col {e.n}"
    if isinstance(e, Row):
        return f"row {e.m}"
    if isinstance(e, BandFrom):
        return f"band {e.n}"
    if isinstance(e, Block):
        return f"block {e.n}"
    if isinstance(e, BlockUnion):
        return f"blocks({_render(e.index, 0)})"
    if isinstance(e, Stride):
        return f"ap {e.start} {e.step}"
    if isinstance(e, SelectorSchema):
        return f"sel({e.partition_id},{e.k})"
    if isinstance(e, PartitionUnion):
        return f"punion({e.partition_id},{_render(e.index, 0)})"
    if isinstance(e, Preimage):
        return f"pre({e.map_id},{_render(e.inner, 0)})"
    if isinstance(e, Image):
        return f"img({e.map_id},{_render(e.inner, 0)})"
    raise TypeError(f"not a SetExpr: {e!r}")


def _wrap(s: str, prec: int, ctx: int) -> str:
    return f"({s})" if prec < ctx else s


def _render_pts(points) -> str:
    out = []
    for p in sorted(points, key=sort_key):
        if isinstance(p, tuple):
            out.append(f"({p[0]},{p[1]})")
        else:
            out.append(str(p))
    return ",".join(out)
