"""Eventually periodic sets against brute-force reference semantics."""

from hypothesis import given, settings, strategies as st

from idealimit.epsets import EPSet

PROBE = 220


def brute(ep: EPSet, n: int = PROBE):
    return [x for x in range(n) if ep.member(x)]


@st.composite
def ep_sets(draw):
    t = draw(st.integers(0, 12))
    prefix = frozenset(draw(st.sets(st.integers(0, t - 1), max_size=t))) if t else frozenset()
    p = draw(st.integers(1, 6))
    residues = frozenset(draw(st.sets(st.integers(0, p - 1), max_size=p)))
    return EPSet(t, prefix, p, residues)


@given(ep_sets(), ep_sets())
@settings(max_examples=120, deadline=None)
def test_boolean_ops_pointwise(a, b):
    u, i, d = a.union(b), a.inter(b), a.diff(b)
    for x in range(PROBE):
        assert u.member(x) == (a.member(x) or b.member(x))
        assert i.member(x) == (a.member(x) and b.member(x))
        assert d.member(x) == (a.member(x) and not b.member(x))
    c = a.complement()
    for x in range(PROBE):
        assert c.member(x) != a.member(x)


@given(ep_sets(), st.integers(0, 5))
@settings(max_examples=80, deadline=None)
def test_shifts(a, k):
    up = a.shift_up(k)
    down = a.shift_down(k)
    for x in range(PROBE):
        assert up.member(x) == (x >= k and a.member(x - k))
        assert down.member(x) == a.member(x + k)


@given(ep_sets())
@settings(max_examples=80, deadline=None)
def test_scalings(a):
    dp = a.double_preimage()
    hi = a.halve_image()
    di = a.double_image()
    hp = a.half_preimage_even()
    for x in range(PROBE):
        assert dp.member(x) == a.member(x // 2)
        assert hi.member(x) == (a.member(2 * x) or a.member(2 * x + 1))
        assert di.member(x) == (x % 2 == 0 and a.member(x // 2))
        assert hp.member(x) == a.member(2 * x)


@given(ep_sets())
@settings(max_examples=100, deadline=None)
def test_classification(a):
    # finite iff the tail residues vanish; checked against a long probe
    if a.is_finite():
        assert all(not a.member(x) for x in range(a.threshold, a.threshold + 4 * a.period))
    else:
        assert any(a.member(x) for x in range(a.threshold, a.threshold + a.period))
    if a.is_cofinite():
        assert all(a.member(x) for x in range(a.threshold, a.threshold + 4 * a.period))
    assert a.is_empty() == (not brute(a))


@given(ep_sets())
@settings(max_examples=60, deadline=None)
def test_normalize_preserves_membership(a):
    b = a.normalize()
    for x in range(PROBE):
        assert a.member(x) == b.member(x)


def test_count_in_matches_brute():
    a = EPSet.from_stride(3, 4).union(EPSet.from_finite({0, 9}))
    for lo, hi in ((0, 10), (5, 200), (17, 18), (100, 1000)):
        assert a.count_in(lo, hi) == sum(1 for x in range(lo, hi) if a.member(x))


def test_constructors():
    assert brute(EPSet.empty()) == []
    assert brute(EPSet.full(), 5) == [0, 1, 2, 3, 4]
    assert brute(EPSet.from_finite({2, 5}), 10) == [2, 5]
    assert brute(EPSet.from_cofinite({1}), 5) == [0, 2, 3, 4]
    assert brute(EPSet.from_stride(2, 3), 12) == [2, 5, 8, 11]
