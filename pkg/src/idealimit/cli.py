"""Command line front end.

Grammar::

    idealimit (catalog | decide IDEAL SET | closure IDEAL SET
               | katetov MAP I J
               | invlimit (basis|threads|density|embed) EX [args]
               | property (qplus|pplus|fan|dg|ss|product) EX
               | reproduce EX) [--bound N] [--depth D] [--budget B]
                                [--format text|json-lines] [--seed S]

Exit status: 0 when every emitted certificate passes, 1 when any fails,
2 on a usage error.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import registry
from .corpus import expressions, infinite_pairs_sets
from .dsl import parse as parse_set
from .dsl import to_text
from .errors import DslSyntaxError, IdealimitError
from .grounds import Ground
from .ideals import (
    FIN,
    IdealHandle,
    catalog as ideal_catalog,
    decide,
    dual_view,
    faniter,
    jnt_partition,
    restrict,
    unioniter,
    verify_jnt,
)
from .invlimit import (
    LevelSet,
    crowded_sample,
    density_check,
    embed_Z,
    example_space,
    prop63_basis,
    prop64_filter,
    threads,
)
from .maps import check_katetov, check_morphism, power
from .properties import (
    Challenge,
    DecreasingChain,
    discrete_witness,
    fan_search,
    frechet_failure_family,
    not_qplus_witness,
    pplus_failure_exact,
    pplus_verify,
    product_qplus,
    qplus_search,
    ss_selector,
)
from .reports import Report
from .setexpr import BandFrom, BlockUnion, CoFinite, Complement, Column, full
from .verdicts import EXACT, Certificate, V
from .zspace import FilterSpace, ProductSpace, Rectangle, Tail, in_closure


def parse_ideal(name: str) -> IdealHandle:
    name = name.strip()
    if name.startswith("dual(") and name.endswith(")"):
        return dual_view(parse_ideal(name[5:-1]))
    if name.startswith("restrict(") and name.endswith(")"):
        body = name[9:-1]
        head, _, rest = body.partition(",")
        return restrict(parse_ideal(head), parse_set(rest.strip()))
    if ":" in name:
        base, _, arg = name.partition(":")
        if base == "faniter":
            return faniter(int(arg))
        if base == "unioniter":
            return unioniter(arg)
        raise DslSyntaxError(f"unknown ideal {name!r}", 0)
    table = ideal_catalog()
    if name in table:
        return table[name]
    raise DslSyntaxError(f"unknown ideal {name!r}", 0)


def main(argv=None) -> int:
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument("--bound", type=int, default=32)
    flags.add_argument("--depth", type=int, default=4)
    flags.add_argument("--budget", type=int, default=10_000)
    flags.add_argument("--format", choices=("text", "json-lines"), default="text")
    flags.add_argument("--seed", type=int, default=0)

    ap = argparse.ArgumentParser(prog="idealimit", parents=[flags])
    sub = ap.add_subparsers(dest="command")

    sub.add_parser("catalog", parents=[flags])

    p = sub.add_parser("decide", parents=[flags])
    p.add_argument("ideal")
    p.add_argument("set")

    p = sub.add_parser("closure", parents=[flags])
    p.add_argument("ideal")
    p.add_argument("set")

    p = sub.add_parser("katetov", parents=[flags])
    p.add_argument("map")
    p.add_argument("lower")
    p.add_argument("upper")

    p = sub.add_parser("invlimit", parents=[flags])
    p.add_argument("operation", choices=("basis", "threads", "density", "embed"))
    p.add_argument("example")
    p.add_argument("args", nargs="*")

    p = sub.add_parser("property", parents=[flags])
    p.add_argument("kind", choices=("qplus", "pplus", "fan", "dg", "ss", "product"))
    p.add_argument("example")

    p = sub.add_parser("reproduce", parents=[flags])
    p.add_argument("example")

    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    if ns.command is None:
        ap.print_usage(sys.stderr)
        return 2
    try:
        reports = _dispatch(ns)
    except (IdealimitError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    _emit(reports, ns.format)
    return 0 if all(r.passing() for r in reports) else 1


def _emit(reports, fmt: str) -> None:
    for r in reports:
        if fmt == "json-lines":
            print(r.to_json())
        else:
            print(r.render_text())


def _timed(fn):
    t0 = time.perf_counter()
    cert = fn()
    dt = (time.perf_counter() - t0) * 1000.0
    return Report.from_certificate(cert, elapsed_ms=dt)


def _dispatch(ns):
    if ns.command == "catalog":
        lines = []
        for name in sorted(ideal_catalog()):
            lines.append(Certificate(f"ideal {name}", True, EXACT))
        for mid in registry.map_ids():
            lines.append(Certificate(f"map {mid}", True, EXACT))
        for pid in registry.partition_ids():
            lines.append(Certificate(f"partition {pid}", True, EXACT))
        return [Report.from_certificate(c) for c in lines]

    if ns.command == "decide":
        I = parse_ideal(ns.ideal)
        e = parse_set(ns.set)
        v = decide(I, e)
        ok = None if v.value is V.UNKNOWN else True
        cert = Certificate(
            f"decide({I.name()}, {to_text(e)})", ok, v.tier,
            witness={"verdict": v.render()},
            details=(f"verdict: {v.value.value}",),
        )
        return [Report.from_certificate(cert)]

    if ns.command == "closure":
        I = parse_ideal(ns.ideal)
        e = parse_set(ns.set)
        v = in_closure(FilterSpace(I), e)
        label = {V.IN: "in closure", V.POSITIVE: "not in closure", V.UNKNOWN: "unknown"}
        cert = Certificate(
            f"closure(Z(dual {I.name()}), {to_text(e)})",
            None if v.value is V.UNKNOWN else True,
            v.tier,
            witness={"verdict": label[v.value]},
            details=(label[v.value],),
        )
        return [Report.from_certificate(cert)]

    if ns.command == "katetov":
        f = registry.get_map(ns.map)
        lower = parse_ideal(ns.lower)
        upper = parse_ideal(ns.upper)
        from .ideals import in_generators

        cert = check_katetov(f, lower, upper, in_generators(lower))
        return [Report.from_certificate(cert)]

    if ns.command == "invlimit":
        return _invlimit_command(ns)

    if ns.command == "property":
        return _property_command(ns)

    if ns.command == "reproduce":
        return reproduce(ns.example, bound=ns.bound, depth=ns.depth,
                         budget=ns.budget, seed=ns.seed)

    raise ValueError(f"unknown command {ns.command!r}")


def _invlimit_command(ns):
    ex = example_space(ns.example)
    seq = ex.seq
    if ns.operation == "basis":
        W = parse_set(ns.args[0]) if ns.args else _default_neighborhood(seq)
        k = int(ns.args[1]) if len(ns.args) > 1 else min(3, ns.depth)
        _, cert = prop63_basis(seq, W, k, bound=ns.bound)
        return [Report.from_certificate(cert)]
    if ns.operation == "threads":
        base = parse_set(ns.args[0]) if ns.args else _small_base(seq)
        ts = threads(seq, min(ns.depth, 4), base, bound=ns.bound, cap=100000)
        cert = Certificate(
            f"threads({ex.name()}, d={min(ns.depth, 4)})", True, EXACT,
            params={"count": len(ts)},
            details=tuple(repr(t.coords) for t in ts[:5]),
        )
        return [Report.from_certificate(cert)]
    if ns.operation == "density":
        E = LevelSet(1, full(seq.ground))
        cert = density_check(seq, E, depth=min(ns.depth, 4), bound=min(ns.bound, 8))
        return [Report.from_certificate(cert)]
    if ns.operation == "embed":
        _, cert = embed_Z(seq, depth=min(ns.depth, 4), bound=min(ns.bound, 16))
        return [Report.from_certificate(cert)]
    raise ValueError(f"unknown invlimit operation {ns.operation!r}")


def _property_command(ns):
    ex = example_space(ns.example)
    runner = {
        "qplus": _claim_qplus,
        "pplus": _claim_pplus,
        "fan": _claim_fan,
        "dg": _claim_dg,
        "ss": _claim_ss,
        "product": _claim_product,
    }[ns.kind]
    certs = runner(ex, ns.bound, ns.depth, ns.budget, ns.seed)
    return [_timed(lambda c=c: c) if callable(c) else Report.from_certificate(c)
            for c in certs]


def _default_neighborhood(seq):
    if seq.ground is Ground.PAIRS:
        return Complement(Column(0))
    return CoFinite(frozenset({0}), Ground.NAT)


def _small_base(seq):
    from .setexpr import Finite

    if seq.ground is Ground.PAIRS:
        return Finite(frozenset({(0, 0)}))
    return Finite(frozenset({0}), Ground.NAT)


# -- reproduce: the per-example claim manifests --------------------------------


def reproduce(example_id: str, bound: int = 32, depth: int = 4,
              budget: int = 10_000, seed: int = 0):
    """Run the example's full claim manifest, in manifest order."""
    ex = example_space(example_id)
    runners = {
        "bonding-continuous": _claim_continuous,
        "bonding-closed": _claim_closed,
        "bonding-open": _claim_open,
        "bonding-bijective": _claim_bijective,
        "crowded-sample": _claim_crowded,
        "qplus-search": _claim_qplus,
        "fan-nonefound-exact-pplus-failure": _claim_fan_failure,
        "not-qplus-exact": _claim_not_qplus,
        "pplus-search-succeeds": _claim_pplus,
        "pplus-failure-exact": _claim_pplus_failure,
        "fan-search": _claim_fan,
        "discrete-witness": _claim_dg,
        "ss-selector": _claim_ss,
        "prop64-identity": _claim_prop64,
        "frechet-failure-family": _claim_frechet,
    }
    reports = []
    for claim in ex.claims:
        t0 = time.perf_counter()
        certs = runners[claim](ex, bound, depth, budget, seed)
        dt = (time.perf_counter() - t0) * 1000.0
        for cert in certs:
            reports.append(Report.from_certificate(cert, elapsed_ms=dt / len(certs)))
    return reports


def _claim_continuous(ex, bound, depth, budget, seed):
    Z = ex.seq.space
    return [check_morphism(ex.seq.bonding, Z, Z, "continuous")]


def _claim_closed(ex, bound, depth, budget, seed):
    Z = ex.seq.space
    return [check_morphism(ex.seq.bonding, Z, Z, "closed", bound=bound)]


def _claim_open(ex, bound, depth, budget, seed):
    Z = ex.seq.space
    return [check_morphism(ex.seq.bonding, Z, Z, "open", bound=bound)]


def _claim_bijective(ex, bound, depth, budget, seed):
    f = ex.seq.bonding
    from .grounds import universe

    bad = []
    seen = {}
    for p in universe(ex.seq.ground, bound):
        q = f.apply(p)
        if q in seen:
            bad.append((seen[q], p))
        seen[q] = p
        if p not in f.fiber(q):
            bad.append((p, q))
    cert = Certificate(
        f"{f.map_id} injective on the window with matching fibers",
        not bad and f.is_bijection(), EXACT,
        params={"window": bound}, witness={"violations": bad[:3]},
    )
    return [cert]


def _claim_crowded(ex, bound, depth, budget, seed):
    base = (0, 0) if ex.seq.ground is Ground.PAIRS else 0
    _, cert = crowded_sample(ex.seq, base, min(depth, 4))
    return [cert]


def _claim_qplus(ex, bound, depth, budget, seed):
    part_id = "shells" if ex.seq.ground is Ground.PAIRS else "L"
    part = registry.get_partition(part_id)
    Z = ex.seq.space
    out = []
    sel, cert = qplus_search(Challenge("qplus", Z, full(ex.seq.ground), part,
                                       budget, bound, depth))
    out.append(_expect(cert, sel is not None, "level space selector found"))
    singles = registry.get_partition(
        "singletonpairs" if ex.seq.ground is Ground.PAIRS else "singletons")
    sel2, cert2 = qplus_search(Challenge("qplus", Z, full(ex.seq.ground), singles,
                                         budget, bound, depth))
    out.append(_expect(cert2, sel2 is not None, "singleton partition selector"))
    sel3, cert3 = qplus_search(Challenge(
        "qplus", ex.seq, LevelSet(1, full(ex.seq.ground)), part,
        budget, min(bound, 16), min(depth, 3)))
    out.append(_expect(cert3, sel3 is not None, "limit subspace selector found"))
    return out


def _claim_fan_failure(ex, bound, depth, budget, seed):
    chain = DecreasingChain(tuple(BandFrom(n) for n in range(6)), "bands")
    sel, cert = fan_search(Challenge("fan", ex.seq.space, chain, None,
                                     budget, bound, depth))
    ok = sel is None and cert.ok is False and cert.tier.kind == "EXACT"
    return [Certificate(
        "fan selections impossible: NoneFound plus exact positive-chain witness",
        ok, EXACT, witness={"search": cert.summary()},
    )]


def _claim_not_qplus(ex, bound, depth, budget, seed):
    part = jnt_partition(ex.seq.ideal)
    return [not_qplus_witness(ex.seq.ideal, part)]


def _claim_pplus(ex, bound, depth, budget, seed):
    chain = _positive_chain(ex)
    cand, cert = pplus_verify(ex.seq.ideal, chain, None, bound, budget=64)
    return [_expect(cert, cand is not None, "pseudo-intersection found")]


def _claim_pplus_failure(ex, bound, depth, budget, seed):
    chain = DecreasingChain(tuple(BandFrom(n) for n in range(6)), "bands")
    return [pplus_failure_exact(ex.seq.ideal, chain, bound)]


def _claim_fan(ex, bound, depth, budget, seed):
    chain = _positive_chain(ex)
    members = tuple(LevelSet(1, e) for e in chain.members[:4])
    sel, cert = fan_search(Challenge("fan", ex.seq,
                                     DecreasingChain(members, chain.tail),
                                     None, budget, min(bound, 16), min(depth, 3)))
    return [_expect(cert, sel is not None, "fan selections found")]


def _positive_chain(ex) -> DecreasingChain:
    if ex.seq.ground is Ground.NAT:
        members = tuple(
            BlockUnion(CoFinite(frozenset(range(n)), Ground.NAT)) for n in range(5)
        )
        return DecreasingChain(members, "blocktails")
    members = tuple(
        CoFinite(frozenset((i, i) for i in range(n)), Ground.PAIRS) for n in range(5)
    )
    return DecreasingChain(members, None)


def _claim_dg(ex, bound, depth, budget, seed):
    payload = LevelSet(1, full(ex.seq.ground))
    D, cert = discrete_witness(Challenge("dg", ex.seq, payload, None,
                                         budget, min(bound, 16), min(depth, 3)))
    return [_expect(cert, D is not None, "discrete witness found")]


def _claim_ss(ex, bound, depth, budget, seed):
    fam = [LevelSet(1, full(ex.seq.ground))] * 3
    sels, cert = ss_selector(ex.seq, fam, depth=min(depth, 3), bound=4)
    return [_expect(cert, sels is not None, "dense selections found")]


def _claim_product(ex, bound, depth, budget, seed):
    P = ProductSpace(ex.seq.space)
    if ex.seq.ground is Ground.PAIRS:
        rects = [Rectangle(BandFrom(k), Tail(k)) for k in range(4)]
        part = registry.get_partition("shells")
    else:
        rects = [Rectangle(BlockUnion(CoFinite(frozenset(range(k)), Ground.NAT)),
                           Tail(k)) for k in range(4)]
        part = registry.get_partition("L")
    sel, cert = product_qplus(Challenge("product-qplus", P, rects, part,
                                        budget, min(bound, 16), depth))
    return [cert]


def _claim_prop64(ex, bound, depth, budget, seed):
    from .ideals import FINXFIN

    handle = prop64_filter(ex.seq)
    corpus = expressions(seed + 64, Ground.PAIRS, 100, depth=3)
    disagreements = []
    unknowns = 0
    for e in corpus:
        a = decide(handle, e)
        b = decide(FINXFIN, e)
        if a.value is V.UNKNOWN or b.value is V.UNKNOWN:
            unknowns += 1
            continue
        if a.value is not b.value:
            disagreements.append(to_text(e))
    cert = Certificate(
        "neighborhood filter of p matches the dual filter translation",
        not disagreements, EXACT,
        params={"corpus": len(corpus), "unknown_skipped": unknowns},
        witness={"disagreements": disagreements[:3]},
    )
    return [cert]


def _claim_frechet(ex, bound, depth, budget, seed):
    corpus = infinite_pairs_sets(seed + 68, 100)
    return [frechet_failure_family(ex.seq, corpus, bound)]


def _expect(cert: Certificate, found: bool, label: str) -> Certificate:
    if not found:
        return Certificate(cert.claim, False, cert.tier, cert.params,
                           dict(cert.witness), (f"{label}: NOT satisfied",) + cert.details)
    return cert


if __name__ == "__main__":
    sys.exit(main())
