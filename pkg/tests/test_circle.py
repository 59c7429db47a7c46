import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arccover.circle import (
    Arc,
    ArcSet,
    CirclePoint,
    arc_contains_arc,
    arcset_complement,
    arcset_contains,
    arcset_intersection,
    arcset_measure,
    arcset_union,
    make_arc,
    torus_distance,
    union_of_arcs,
)


def approx_intervals(s, expected, tol=1e-12):
    got = s.intervals
    assert len(got) == len(expected)
    for (a, b), (c, d) in zip(got, expected):
        assert a == pytest.approx(c, abs=tol) and b == pytest.approx(d, abs=tol)


# -- points and distance ----------------------------------------------------


@pytest.mark.parametrize("raw, pos", [(0.0, 0.0), (1.0, 0.0), (-0.25, 0.75), (3.5, 0.5), (-1e-20, 0.0)])
def test_circle_point_normalizes(raw, pos):
    p = CirclePoint(raw)
    assert 0.0 <= p.position < 1.0
    assert p.position == pytest.approx(pos)


@pytest.mark.parametrize("x, y, d", [(0.1, 0.9, 0.2), (0.3, 0.3, 0.0), (0.25, 0.75, 0.5)])
def test_torus_distance_examples(x, y, d):
    assert torus_distance(x, y) == pytest.approx(d)
    assert torus_distance(CirclePoint(x), CirclePoint(y)) == pytest.approx(d)


@settings(max_examples=300)
@given(st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True))
def test_torus_distance_is_a_metric(x, y, z):
    dxy = torus_distance(x, y)
    assert 0.0 <= dxy <= 0.5
    assert dxy == torus_distance(y, x)
    assert dxy <= torus_distance(x, z) + torus_distance(z, y) + 1e-15


# -- arcs -------------------------------------------------------------------


def test_make_arc_interior():
    approx_intervals(make_arc(0.5, 0.2), [(0.4, 0.6)])


def test_make_arc_wraps_into_two_pieces():
    approx_intervals(make_arc(0.95, 0.2), [(0.0, 0.05), (0.85, 1.0)])


def test_make_arc_clamps_long_arcs_to_full_circle():
    s = make_arc(0.3, 1.0)
    assert s.is_full and s.measure() == 1.0
    assert make_arc(0.3, 7.0).is_full


@pytest.mark.parametrize("bad", [0.0, -0.1, math.nan])
def test_make_arc_rejects_nonpositive_length(bad):
    with pytest.raises(ValueError):
        make_arc(0.5, bad)


def test_arc_type_validates():
    with pytest.raises(ValueError):
        Arc(0.5, 0.0)
    a = Arc(1.25, 3.0)
    assert a.center.position == 0.25 and a.length == 1.0 and a.is_full


# -- union, complement, measure ---------------------------------------------


def test_union_examples():
    s = ArcSet.from_intervals([(0.1, 0.3)])
    t = ArcSet.from_intervals([(0.2, 0.4)])
    approx_intervals(arcset_union(s, t), [(0.1, 0.4)])
    assert arcset_union(s, ArcSet.empty()) == s
    assert arcset_union(ArcSet.from_intervals([(0, 0.5)]), ArcSet.from_intervals([(0.5, 1)])).is_full


def test_touching_intervals_merge():
    s = ArcSet.from_intervals([(0.2, 0.3), (0.3, 0.5), (0.1, 0.2)])
    assert s.intervals == [(0.1, 0.5)]


def test_complement_examples():
    assert arcset_complement(ArcSet.empty()).is_full
    assert arcset_complement(ArcSet.full()).is_empty
    c = arcset_complement(ArcSet.from_intervals([(0.2, 0.7)]))
    assert c.intervals == [(0.0, 0.2), (0.7, 1.0)]
    assert c.measure() == pytest.approx(0.5)


def test_measure_examples():
    for x in (0.0, 0.1, 0.5, 0.99):
        assert arcset_measure(make_arc(x, 0.3)) == pytest.approx(0.3)
    assert arcset_measure(ArcSet.empty()) == 0.0
    assert arcset_measure(ArcSet.from_intervals([(0, 0.25), (0.5, 0.75)])) == 0.5


def test_contains_half_open():
    s = ArcSet.from_intervals([(0.1, 0.3)])
    assert arcset_contains(s, 0.1)
    assert not arcset_contains(s, 0.3)
    assert not arcset_contains(s, 0.05)
    assert all(arcset_contains(ArcSet.full(), p) for p in (0.0, 0.5, 0.999))
    assert not arcset_contains(ArcSet.empty(), 0.5)


def test_arc_contains_arc_examples():
    assert arc_contains_arc(Arc(0.5, 0.4), Arc(0.5, 0.1))
    assert not arc_contains_arc(Arc(0.5, 0.2), Arc(0.7, 0.1))
    assert arc_contains_arc(Arc(0.9, 1.0), Arc(0.1, 0.6))


def test_arc_contains_arc_across_zero():
    assert arc_contains_arc(Arc(0.98, 0.1), Arc(0.01, 0.02))
    assert not arc_contains_arc(Arc(0.98, 0.1), Arc(0.03, 0.02))


def test_arcset_is_immutable_value():
    s = ArcSet.from_intervals([(0.1, 0.3)])
    with pytest.raises(ValueError):
        s.starts[0] = 0.0
    assert hash(s) == hash(ArcSet.from_intervals([(0.1, 0.2), (0.2, 0.3)]))


def test_operators_match_functions():
    s = make_arc(0.2, 0.3)
    t = make_arc(0.4, 0.3)
    assert (s | t) == arcset_union(s, t)
    assert (s & t) == arcset_intersection(s, t)
    assert ~s == arcset_complement(s)
    assert 0.2 in s and 0.9 not in s


# -- properties -------------------------------------------------------------

arcs = st.lists(
    st.tuples(st.floats(0, 1, exclude_max=True), st.floats(1e-6, 1.2)),
    min_size=0,
    max_size=20,
)


def build(pairs):
    if not pairs:
        return ArcSet.empty()
    c, l = zip(*pairs)
    return union_of_arcs(c, l)


def is_normalized(s):
    a, b = s.starts, s.ends
    if a.size == 0:
        return True
    return (
        bool(np.all(a < b))
        and bool(np.all(b[:-1] < a[1:]))
        and a[0] >= 0.0
        and b[-1] <= 1.0
    )


@settings(max_examples=300)
@given(arcs)
def test_complement_is_an_involution(pairs):
    s = build(pairs)
    assert is_normalized(s) and is_normalized(~s)
    assert ~~s == s


@settings(max_examples=300)
@given(arcs)
def test_subadditivity(pairs):
    s = build(pairs)
    total = sum(min(l, 1.0) for _, l in pairs)
    assert s.measure() <= total + 1e-12


@settings(max_examples=300)
@given(arcs, arcs, arcs)
def test_union_is_commutative_associative_idempotent(p, q, r):
    s, t, u = build(p), build(q), build(r)
    assert s | t == t | s
    assert (s | t) | u == s | (t | u)
    assert s | s == s
    assert s | t == build(p + q)


@settings(max_examples=300)
@given(arcs, st.floats(0, 1, exclude_max=True))
def test_contains_exactly_one_of_set_and_complement(pairs, p):
    s = build(pairs)
    if p in set(s.starts.tolist()) | set(s.ends.tolist()):
        return
    assert arcset_contains(s, p) != arcset_contains(~s, p)


def test_disjoint_arcs_measure_adds_up():
    s = build([(0.1, 0.1), (0.5, 0.2), (0.9, 0.05)])
    assert s.measure() == pytest.approx(0.35, abs=1e-12)


def test_fuzz_measure_partition():
    rng = np.random.default_rng(7)
    failures = 0
    for _ in range(10_000):
        k = int(rng.integers(0, 30))
        s = union_of_arcs(rng.random(k), rng.random(k) ** 3 + 1e-9)
        total = s.measure() + (~s).measure()
        failures += not (1 - 1e-9 <= total <= 1 + 1e-9)
    assert failures == 0
