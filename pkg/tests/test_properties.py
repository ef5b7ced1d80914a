"""Selector searches, witnesses, and the lifting lemma machinery."""

import pytest

from idealimit import registry
from idealimit.corpus import infinite_pairs_sets
from idealimit.errors import (
    ChainNotDecreasing,
    NotAlmostContained,
    NotDense,
    PreconditionFailed,
)
from idealimit.grounds import Ground, universe
from idealimit.ideals import (
    BLOCKBOUNDED,
    COLBLOCK,
    FIN,
    FINXFIN,
    decide,
    jnt_partition,
)
from idealimit.invlimit import InverseSequence, LevelSet, example_space
from idealimit.maps import COL2TO1, IDENTITY
from idealimit.properties import (
    Challenge,
    DecreasingChain,
    SelectorConcrete,
    convergent_sequence,
    discrete_witness,
    fan_search,
    frechet_failure_family,
    lift_pseudointersection,
    not_qplus_witness,
    pplus_failure_exact,
    pplus_verify,
    product_qplus,
    qplus_search,
    separating_witness,
    ss_selector,
)
from idealimit.setexpr import (
    BandFrom,
    BlockUnion,
    CoFinite,
    Column,
    Complement,
    Finite,
    full,
    member,
)
from idealimit.verdicts import V
from idealimit.zspace import FilterSpace, ProductSpace, Rectangle, Tail

FULL_P = full(Ground.PAIRS)
FULL_N = full(Ground.NAT)


# -- q+ ------------------------------------------------------------------


def test_not_qplus_witness_examples():
    assert not_qplus_witness(BLOCKBOUNDED, registry.get_partition("L")).passing()
    assert not_qplus_witness(COLBLOCK, registry.get_partition("colblock")).passing()
    assert not_qplus_witness(FINXFIN, jnt_partition(FINXFIN)).ok is False
    assert not_qplus_witness(FIN, registry.get_partition("singletons")).ok is False


def test_qplus_search_finds_positive_selector():
    Z = FilterSpace(FINXFIN)
    sel, cert = qplus_search(
        Challenge("qplus", Z, FULL_P, registry.get_partition("shells"))
    )
    assert sel is not None and cert.passing()
    v = sel.exact_verdict(FINXFIN)
    assert v is not None and v.value is V.POSITIVE


def test_qplus_search_exact_negative():
    Z = FilterSpace(BLOCKBOUNDED)
    sel, cert = qplus_search(Challenge("qplus", Z, FULL_N, registry.get_partition("L")))
    assert sel is None and cert.ok is False and cert.tier.kind == "EXACT"


def test_qplus_singleton_partition_returns_payload():
    Z = FilterSpace(FINXFIN)
    sel, cert = qplus_search(
        Challenge("qplus", Z, FULL_P, registry.get_partition("singletonpairs"))
    )
    assert sel is not None and cert.passing()
    assert sel.tail_rule == "expr" and sel.expr == FULL_P


def test_qplus_precondition():
    Z = FilterSpace(FINXFIN)
    with pytest.raises(PreconditionFailed):
        qplus_search(Challenge("qplus", Z, Column(1), registry.get_partition("shells")))


def test_qplus_on_limit():
    ex5 = example_space("6.5")
    sel, cert = qplus_search(Challenge(
        "qplus", ex5.seq, LevelSet(1, FULL_P), registry.get_partition("shells"),
        bound=16, depth=3,
    ))
    assert sel is not None and cert.passing()
    assert sel.shape_ok()


def test_selector_shape_enforced():
    with pytest.raises(PreconditionFailed):
        SelectorConcrete("L", ((0, 0), (0, 1)), "none")


def test_ruler_selector_window_members_meet_columns():
    sel = SelectorConcrete("shells", (), "ruler")
    pts = sel.window_members(32, Ground.PAIRS)
    cols = {p[0] for p in pts}
    assert {0, 1, 2, 3} <= cols  # the valuation revisits every column


# -- p+ ------------------------------------------------------------------


def test_pplus_candidate_examples():
    chain = DecreasingChain(
        tuple(CoFinite(frozenset(range(n + 1)), Ground.NAT) for n in range(8)),
        "cofinite",
    )
    cand, cert = pplus_verify(FIN, chain, CoFinite(frozenset(range(8)), Ground.NAT))
    assert cert.passing()
    chain_b = DecreasingChain(
        tuple(BlockUnion(CoFinite(frozenset(range(n)), Ground.NAT)) for n in range(8)),
        "blocktails",
    )
    _, cert_b = pplus_verify(
        BLOCKBOUNDED, chain_b, BlockUnion(CoFinite(frozenset(range(8)), Ground.NAT))
    )
    assert cert_b.passing()


def test_pplus_bands_reject_all_candidates():
    bands = DecreasingChain(tuple(BandFrom(n) for n in range(8)), "bands")
    cand, cert = pplus_verify(FINXFIN, bands, None)
    assert cand is None
    fail = pplus_failure_exact(FINXFIN, bands)
    assert fail.passing() and fail.tier.kind == "EXACT"
    fail7 = pplus_failure_exact(COLBLOCK, bands)
    assert fail7.passing() and fail7.tier.kind == "EXACT"


def test_pplus_chain_validation():
    increasing = DecreasingChain((BandFrom(3), BandFrom(1)), None)
    with pytest.raises(ChainNotDecreasing):
        pplus_verify(FINXFIN, increasing, None)
    small = DecreasingChain((Column(0),), None)
    with pytest.raises(PreconditionFailed):
        pplus_verify(FINXFIN, small, None)


# -- Lemma 4.1 -------------------------------------------------------------


def test_lift_identity_gives_back_b():
    A = [list(range(10 - n)) for n in range(4)]
    B = [0, 2, 4]
    D, cert = lift_pseudointersection(IDENTITY, A, B)
    assert cert.passing()
    assert D == B


def test_lift_col2to1_window():
    A = [[(i, j) for i in range(6) for j in range(10 - 2 * n)] for n in range(4)]
    B = [(i, 1) for i in range(5)]
    D, cert = lift_pseudointersection(COL2TO1, A, B)
    assert cert.passing()
    assert sorted({COL2TO1.apply(x) for x in D}) == sorted(B)
    for n, a in enumerate(A):
        assert set(D) - set(a) == set() or n > 0


def test_lift_rejects_outside_image():
    A = [[(0, 0), (0, 1)]]
    with pytest.raises(NotAlmostContained):
        lift_pseudointersection(COL2TO1, A, [(5, 5)])


def oracle_lift_feasible(f, A0, B):
    """Independent feasibility oracle: every target must have a fiber point
    inside the top chain member."""
    img = {f.apply(x) for x in A0}
    return set(B) <= img


def test_lift_agrees_with_oracle_random():
    import random

    rng = random.Random(5)
    agree = 0
    for _ in range(50):
        cols = rng.randrange(2, 6)
        height = rng.randrange(4, 12)
        A = []
        cur = [(i, j) for i in range(cols) for j in range(height)]
        for n in range(rng.randrange(2, 6)):
            A.append(list(cur))
            cur = [p for p in cur if rng.random() < 0.8]
        B = sorted({COL2TO1.apply(p) for p in A[0] if rng.random() < 0.4})
        feasible = oracle_lift_feasible(COL2TO1, A[0], B)
        try:
            D, cert = lift_pseudointersection(COL2TO1, A, B)
            assert feasible
            assert cert.passing()
            assert {COL2TO1.apply(x) for x in D} == set(B)
        except NotAlmostContained:
            assert not feasible
        agree += 1
    assert agree == 50


# -- fan -------------------------------------------------------------------


def test_fan_exact_failure_on_bands():
    bands = DecreasingChain(tuple(BandFrom(n) for n in range(6)), "bands")
    sel, cert = fan_search(Challenge("fan", FilterSpace(FINXFIN), bands))
    assert sel is None and cert.ok is False and cert.tier.kind == "EXACT"


def test_fan_succeeds_on_pplus_catalog():
    chain = DecreasingChain(
        tuple(BlockUnion(CoFinite(frozenset(range(n)), Ground.NAT)) for n in range(5)),
        "blocktails",
    )
    sel, cert = fan_search(Challenge("fan", FilterSpace(BLOCKBOUNDED), chain))
    assert sel is not None and cert.passing()
    ex6 = example_space("6.6")
    members = tuple(LevelSet(1, e) for e in chain.members[:4])
    sel2, cert2 = fan_search(Challenge(
        "fan", ex6.seq, DecreasingChain(members, "blocktails"),
        bound=16, depth=3,
    ))
    assert sel2 is not None and cert2.passing()


def test_fan_trivial_cofinite():
    chain = DecreasingChain(
        tuple(CoFinite(frozenset(range(n + 1)), Ground.NAT) for n in range(5)),
        "cofinite",
    )
    sel, cert = fan_search(Challenge("fan", FilterSpace(FIN), chain))
    assert sel is not None and cert.passing()


# -- convergent sequences and the Frechet failure ---------------------------


def test_convergence_in_fin_star():
    seq = InverseSequence(FilterSpace(FIN), IDENTITY)
    zs, cert = convergent_sequence(seq, LevelSet(1, FULL_N))
    assert zs and cert.passing()


def test_no_convergence_in_the_fan_limit():
    ex8 = example_space("6.8")
    zs, cert = convergent_sequence(ex8.seq, LevelSet(1, FULL_P))
    assert zs is None
    assert cert.witness["payload_witness"] is not None


def test_finite_payload_has_freeness_witness():
    ex8 = example_space("6.8")
    w = separating_witness(FINXFIN, Finite(frozenset({(0, 0)})))
    assert w is not None


def test_frechet_failure_family_corpus():
    ex8 = example_space("6.8")
    corpus = infinite_pairs_sets(99, 25)
    cert = frechet_failure_family(ex8.seq, corpus)
    assert cert.passing()


# -- discrete generation -----------------------------------------------------


def test_dg_on_filter_space():
    Z = FilterSpace(FINXFIN)
    D, cert = discrete_witness(Challenge("dg", Z, BandFrom(1)))
    assert D == BandFrom(1) and cert.passing()
    with pytest.raises(PreconditionFailed):
        discrete_witness(Challenge("dg", Z, Finite(frozenset({(1, 1)}))))


def test_dg_on_all_examples():
    for exid in ("6.5", "6.6", "6.7", "6.8"):
        ex = example_space(exid)
        payload = LevelSet(1, full(ex.seq.ground))
        D, cert = discrete_witness(Challenge("dg", ex.seq, payload,
                                             bound=16, depth=3))
        assert D is not None and cert.passing(), (exid, cert.summary())


def test_dg_exact_on_65_and_68():
    for exid in ("6.5", "6.8"):
        ex = example_space(exid)
        payload = LevelSet(1, full(ex.seq.ground))
        _, cert = discrete_witness(Challenge("dg", ex.seq, payload,
                                             bound=16, depth=3))
        assert cert.tier.kind == "EXACT", exid


# -- selective separability ---------------------------------------------------


def test_ss_on_all_examples():
    for exid in ("6.5", "6.6", "6.7", "6.8"):
        ex = example_space(exid)
        fam = [LevelSet(1, full(ex.seq.ground))] * 3
        sels, cert = ss_selector(ex.seq, fam, depth=3, bound=4)
        assert cert.passing(), (exid, cert.summary())
        assert all(len(v) < 60 for v in sels.values())


def test_ss_rejects_non_dense_family():
    ex5 = example_space("6.5")
    fam = [LevelSet(1, FULL_P), LevelSet(1, Column(2))]
    with pytest.raises(NotDense):
        ss_selector(ex5.seq, fam, depth=2, bound=4)


# -- products ------------------------------------------------------------------


def test_product_qplus_left_qplus():
    P = ProductSpace(FilterSpace(FINXFIN))
    rects = [Rectangle(BandFrom(k), Tail(k)) for k in range(5)]
    sel, cert = product_qplus(Challenge(
        "product-qplus", P, rects, registry.get_partition("shells"), bound=16,
    ))
    assert sel is not None and cert.passing()


def test_product_qplus_left_not_qplus():
    P = ProductSpace(FilterSpace(BLOCKBOUNDED))
    rects = [Rectangle(BlockUnion(CoFinite(frozenset(range(k)), Ground.NAT)), Tail(k))
             for k in range(4)]
    sel, cert = product_qplus(Challenge(
        "product-qplus", P, rects, registry.get_partition("L"), bound=16,
    ))
    assert sel is None and cert.ok is False and cert.tier.kind == "EXACT"


def test_product_qplus_precondition():
    P = ProductSpace(FilterSpace(FINXFIN))
    rects = [Rectangle(Column(1), Tail(0))]
    with pytest.raises(PreconditionFailed):
        product_qplus(Challenge("product-qplus", P, rects,
                                registry.get_partition("shells")))


# -- determinism ----------------------------------------------------------------


def test_searches_deterministic():
    Z = FilterSpace(FINXFIN)
    c = Challenge("qplus", Z, FULL_P, registry.get_partition("shells"))
    s1, c1 = qplus_search(c)
    s2, c2 = qplus_search(c)
    assert s1 == s2 and c1.summary() == c2.summary()
    ex5 = example_space("6.5")
    ch = Challenge("qplus", ex5.seq, LevelSet(1, FULL_P),
                   registry.get_partition("shells"), bound=16, depth=3)
    t1, _ = qplus_search(ch)
    t2, _ = qplus_search(ch)
    assert t1 == t2
