"""Acceptance criteria, one test per criterion, each printing a verdict line.

Window-statistic consistency rules (criterion 1) are fixed here, chosen to be
sound for the generated corpus (constants <= 6, points < 8, strides <= 3):

* pairs ideals: a set In the ideal has at most 32 heavy columns in the 64
  window (heavy = at least N/2 window points); a positive set has at least 33
  (its cofinite column tail dominates the window).
* block ideal: an In set's max full-block trace within each window stays at
  or below 32 = |L_5|; a positive set shows a block of trace >= 64 among the
  blocks reachable by the corpus index laws (n <= 14).
"""

import json

from idealimit import registry
from idealimit.cli import reproduce
from idealimit.corpus import exact_pairs_sets, expressions, infinite_pairs_sets
from idealimit.grounds import BLOCKS, Ground
from idealimit.ideals import (
    BLOCKBOUNDED,
    COLBLOCK,
    FANCOLSFIN,
    FINXFIN,
    decide,
    jnt_partition,
    unioniter,
)
from idealimit.invlimit import LevelSet, example_space, prop63_basis, prop64_filter
from idealimit.maps import COL2TO1
from idealimit.properties import (
    Challenge,
    DecreasingChain,
    discrete_witness,
    fan_search,
    frechet_failure_family,
    lift_pseudointersection,
    not_qplus_witness,
    pplus_failure_exact,
    qplus_search,
    ss_selector,
)
from idealimit.setexpr import (
    BandFrom,
    BlockUnion,
    CoFinite,
    Column,
    Complement,
    member,
    full,
    truncate,
)
from idealimit.verdicts import V
from idealimit.windows import heavy_column_count, max_block_trace
from idealimit.zspace import FilterSpace


def _report(name, ok, detail=""):
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def test_criterion_1_decide_truncation_coherence():
    contradictions = []
    checked = 0
    pairs_corpus = expressions(1001, Ground.PAIRS, 520, depth=4)
    nat_corpus = expressions(1002, Ground.NAT, 520, depth=4)
    for e in pairs_corpus:
        for I in (FINXFIN, unioniter()):
            v = decide(I, e)
            if v.value is V.UNKNOWN:
                continue
            checked += 1
            pts64 = truncate(e, 64, Ground.PAIRS)
            h64 = heavy_column_count(pts64, 64)
            if v.value is V.IN and h64 > 32:
                contradictions.append(("pairs-in", e, h64))
            if v.value is V.POSITIVE and h64 < 33:
                contradictions.append(("pairs-pos", e, h64))
    for e in nat_corpus:
        v = decide(BLOCKBOUNDED, e)
        if v.value is V.UNKNOWN:
            continue
        checked += 1
        if v.value is V.IN:
            for N in (16, 32, 64):
                mt = max_block_trace(truncate(e, N, Ground.NAT), N)
                if mt > 32:
                    contradictions.append(("nat-in", e, N, mt))
        else:
            deep = 0
            for n in range(15):
                blk = BLOCKS.members(n)
                deep = max(deep, sum(1 for x in blk if member(e, x)))
                if deep >= 64:
                    break
            if deep < 64:
                contradictions.append(("nat-pos", e, deep))
    total = len(pairs_corpus) + len(nat_corpus)
    _report(
        "1 decide/truncation coherence",
        total >= 1000 and not contradictions,
        f"{total} expressions, {checked} exact verdicts, {len(contradictions)} contradictions",
    )


def test_criterion_2_prop64_identity():
    ex8 = example_space("6.8")
    handle = prop64_filter(ex8.seq)
    corpus = exact_pairs_sets(2002, 100, depth=3)
    mismatches = 0
    exact = 0
    for e in corpus:
        a = decide(handle, e)
        b = decide(FINXFIN, e)
        if V.UNKNOWN in (a.value, b.value):
            continue
        exact += 1
        if a.value is not b.value:
            mismatches += 1
    _report(
        "2 neighborhood filter identity",
        mismatches == 0 and exact == len(corpus) == 100,
        f"{exact}/{len(corpus)} exact, {mismatches} disagreements",
    )


def test_criterion_3_exact_negative_witnesses():
    w1 = not_qplus_witness(BLOCKBOUNDED, registry.get_partition("L"))
    bands = DecreasingChain(tuple(BandFrom(n) for n in range(8)), "bands")
    w2 = pplus_failure_exact(FINXFIN, bands)
    ok = (
        w1.passing() and w1.tier.kind == "EXACT"
        and w2.passing() and w2.tier.kind == "EXACT"
    )
    _report("3 exact negative witnesses", ok,
            f"not-qplus {w1.ok} [{w1.tier.render()}], pplus-failure {w2.ok} [{w2.tier.render()}]")


def test_criterion_4_theorem_backed_search_completeness():
    failures = []
    # q+ on the Example 6.5 suite
    ex5 = example_space("6.5")
    shells = registry.get_partition("shells")
    singles = registry.get_partition("singletonpairs")
    suites = [
        Challenge("qplus", ex5.seq.space, full(Ground.PAIRS), shells),
        Challenge("qplus", ex5.seq.space, full(Ground.PAIRS), singles),
        Challenge("qplus", ex5.seq, LevelSet(1, full(Ground.PAIRS)), shells,
                  bound=16, depth=3),
    ]
    for c in suites:
        sel, cert = qplus_search(c)
        if sel is None or not cert.passing():
            failures.append(("qplus-6.5", cert.summary()))
    # fan on the Example 6.6 limit suite
    ex6 = example_space("6.6")
    chain = DecreasingChain(
        tuple(LevelSet(1, BlockUnion(CoFinite(frozenset(range(n)), Ground.NAT)))
              for n in range(4)),
        "blocktails",
    )
    sel, cert = fan_search(Challenge("fan", ex6.seq, chain, bound=16, depth=3))
    if sel is None or not cert.passing():
        failures.append(("fan-6.6", cert.summary()))
    # discrete witnesses and dense selections on all four examples
    for exid in ("6.5", "6.6", "6.7", "6.8"):
        ex = example_space(exid)
        payload = LevelSet(1, full(ex.seq.ground))
        D, dcert = discrete_witness(Challenge("dg", ex.seq, payload,
                                              bound=16, depth=3))
        if D is None or not dcert.passing():
            failures.append((f"dg-{exid}", dcert.summary()))
        fam = [LevelSet(1, full(ex.seq.ground))] * 3
        sels, scert = ss_selector(ex.seq, fam, depth=3, bound=4)
        if not scert.passing():
            failures.append((f"ss-{exid}", scert.summary()))
    _report("4 theorem-backed search completeness", not failures, repr(failures[:2]))


def test_criterion_5_prop63_basis_samples():
    total = 0
    passed = 0
    for exid in ("6.5", "6.6", "6.7"):
        ex = example_space(exid)
        gens = _neighborhoods(ex)
        samples = [(W, k) for W in gens for k in (1, 2, 3, 4)][:10]
        for W, k in samples:
            _, cert = prop63_basis(ex.seq, W, k, bound=32)
            total += 1
            passed += bool(cert.passing())
    _report("5 basis computation", total == 30 and passed == total,
            f"{passed}/{total} samples")


def _neighborhoods(ex):
    from idealimit.ideals import filter_generators

    gens = []
    for W in filter_generators(ex.seq.ideal):
        from idealimit.ideals import dual_member

        if dual_member(ex.seq.ideal, W).value is V.IN:
            gens.append(W)
        if len(gens) == 3:
            break
    return gens


def test_criterion_6_lift_oracle_equivalence():
    import random

    from idealimit.errors import NotAlmostContained

    rng = random.Random(606)
    agreements = 0
    for _ in range(50):
        cols = rng.randrange(2, 7)
        height = rng.randrange(4, 16)
        chain = []
        cur = [(i, j) for i in range(cols) for j in range(height)]
        for _n in range(rng.randrange(2, 7)):
            chain.append(list(cur))
            cur = [p for p in cur if rng.random() < 0.85]
        B = sorted({COL2TO1.apply(p) for p in chain[0] if rng.random() < 0.35})
        feasible = set(B) <= {COL2TO1.apply(x) for x in chain[0]}
        try:
            D, cert = lift_pseudointersection(COL2TO1, chain, B)
            ok = feasible and cert.passing() and {COL2TO1.apply(x) for x in D} == set(B)
        except NotAlmostContained:
            ok = not feasible
        agreements += bool(ok)
    _report("6 lifting lemma oracle equivalence", agreements == 50,
            f"{agreements}/50 instances")


def test_criterion_7_frechet_failure_family():
    ex8 = example_space("6.8")
    corpus = infinite_pairs_sets(707, 100)
    cert = frechet_failure_family(ex8.seq, corpus)
    from idealimit.properties import convergent_sequence

    zs, _ = convergent_sequence(ex8.seq, LevelSet(1, full(Ground.PAIRS)))
    _report("7 Frechet failure witnesses", cert.passing() and zs is None,
            f"{len(corpus)} witnesses, sequences detected: {zs is not None}")


def test_criterion_8_reproduce_determinism():
    def run_all():
        out = []
        for exid in ("6.5", "6.6", "6.7", "6.8"):
            for r in reproduce(exid, bound=32, depth=4, seed=0):
                d = json.loads(r.to_json())
                d.pop("elapsed_ms")
                out.append(json.dumps(d, sort_keys=True))
        return out

    first = run_all()
    second = run_all()
    all_pass = all(json.loads(line)["verdict"] == "pass" for line in first)
    _report("8 reproduce determinism", first == second and all_pass,
            f"{len(first)} reports, byte-identical: {first == second}, all pass: {all_pass}")
