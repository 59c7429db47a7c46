import json
import math

import numpy as np
import pytest
from scipy.special import zeta

from arccover.circle import Arc, ArcSet, make_arc, union_of_arcs
from arccover.sequences import Explicit, Geometric, Identity, Monomial, PowerLaw
from arccover.series import Verdict, classify_series_gauge
from arccover.simulation import TrialConfig, run_trial
from arccover.dimension import (
    box_count,
    box_dimension,
    default_levels,
    estimate_dimension,
    gauge_measure_bound,
    intersection_experiment,
    shell_dimension,
    shell_levels,
)


def brute_force_count(s, j):
    cells = 0
    for k in range(2**j):
        a, b = k / 2**j, (k + 1) / 2**j
        cells += any(lo < b and a < hi for lo, hi in s.intervals)
    return cells


# -- box counts -------------------------------------------------------------


def test_box_count_examples():
    assert box_count(ArcSet.from_intervals([(0, 0.25)]), 2) == 1
    assert box_count(ArcSet.from_intervals([(0.1, 0.35)]), 2) == 2
    for j in (0, 5, 20, 40):
        assert box_count(ArcSet.full(), j) == 2**j
    assert box_count(ArcSet.empty(), 7) == 0


def test_box_count_level_range():
    with pytest.raises(ValueError):
        box_count(ArcSet.full(), 41)
    with pytest.raises(ValueError):
        box_count(ArcSet.full(), -1)


def test_box_count_matches_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(300):
        k = int(rng.integers(1, 9))
        s = union_of_arcs(rng.random(k), rng.random(k) ** 2 / 2 + 1e-9)
        for j in range(0, 11):
            assert box_count(s, j) == brute_force_count(s, j)


def test_box_count_nesting_bounds():
    rng = np.random.default_rng(3)
    for _ in range(500):
        k = int(rng.integers(1, 40))
        s = union_of_arcs(rng.random(k), rng.random(k) ** 4)
        counts = [box_count(s, j) for j in range(0, 25)]
        for j, (a, b) in enumerate(zip(counts, counts[1:])):
            assert a <= b <= 2 * a
            assert a <= 2**j
        for j, c in enumerate(counts):
            assert c >= math.ceil(s.measure() * 2**j - 1e-9)


# -- slopes -----------------------------------------------------------------


def test_full_circle_has_slope_one():
    est = box_dimension(ArcSet.full(), range(3, 15))
    assert est.slope == pytest.approx(1.0, abs=1e-3)
    assert not est.degenerate


def test_point_like_arc_has_slope_zero():
    est = box_dimension(make_arc(0.37, 2.0**-30), range(4, 15))
    assert est.slope == pytest.approx(0.0, abs=0.05)
    assert all(c <= 2 for _, c in est.counts)


def test_empty_set_is_degenerate():
    est = box_dimension(ArcSet.empty(), [3, 4, 5])
    assert est.degenerate and est.slope == 0.0


def test_needs_three_levels():
    with pytest.raises(ValueError):
        box_dimension(ArcSet.full(), [3, 4])


def test_slope_is_clamped_raw_slope_kept():
    rng = np.random.default_rng(5)
    for _ in range(100):
        s = union_of_arcs(rng.random(20), rng.random(20) ** 6)
        est = box_dimension(s, range(2, 30))
        assert all(-1e-12 <= x <= 1 + 1e-12 for x in est.local_slopes)
        # only least-squares round-off can leave [0, 1]; the clamp absorbs it
        assert -1e-12 <= est.raw_slope <= 1 + 1e-12
        assert est.slope == min(1.0, max(0.0, est.raw_slope))


def test_default_band_for_the_reference_sequence():
    levels = default_levels(PowerLaw(1, 2), 1000, 100_000)
    assert (levels.start, levels[-1]) == (21, 32)


def test_powerlaw_tail_estimate_in_default_band():
    cfg = TrialConfig(PowerLaw(1, 2), 100_000, checkpoints=(), tail_starts=(1000,))
    slopes = [estimate_dimension(run_trial(cfg.with_trial(t)), 1000).slope for t in range(5)]
    assert 0.4 <= float(np.mean(slopes)) <= 0.6


def test_coarse_levels_see_a_one_dimensional_union():
    # levels far above the arc scale of the tail only see a union that fills the circle
    cfg = TrialConfig(PowerLaw(1, 2), 100_000, checkpoints=(), tail_starts=(1000,))
    est = estimate_dimension(run_trial(cfg), 1000, levels=range(6, 15))
    assert est.slope > 0.95


def test_window_consistency():
    cfg = TrialConfig(PowerLaw(1, 2), 50_000, checkpoints=(), tail_starts=(500,))
    r = run_trial(cfg)
    plain = estimate_dimension(r, 500)
    assert estimate_dimension(r, 500, window=Arc(0.3, 1.0)) == plain
    windowed = estimate_dimension(r, 500, window=(0.3, 0.2))
    assert abs(windowed.slope - plain.slope) <= 0.15
    cells_in_window = [box_count(Arc(0.3, 0.2).to_arcset(), j) for j, _ in windowed.counts]
    assert all(c <= w for (_, c), w in zip(windowed.counts, cells_in_window))


def test_estimate_serialization():
    est = box_dimension(make_arc(0.3, 0.01), range(3, 8))
    lines = est.to_csv().splitlines()
    assert lines[1] == "j,N_j,local_slope"
    assert lines[2].endswith(",")
    doc = json.loads(est.to_json())
    assert doc["counts"][0] == [3, 1] and doc["slope"] == est.slope


# -- shell estimator --------------------------------------------------------


@pytest.mark.parametrize("alpha", [1.5, 2.0, 3.0])
def test_shell_estimator_tracks_inverse_alpha(alpha):
    cfg = TrialConfig(PowerLaw(1, alpha), 100_000, checkpoints=())
    slopes = [shell_dimension(cfg.with_trial(t)).slope for t in range(3)]
    assert float(np.mean(slopes)) == pytest.approx(1 / alpha, abs=0.12)


def test_shell_levels_cover_complete_shells_only():
    levels = shell_levels(PowerLaw(1, 2), 100_000)
    # shell j holds n with 2^-j <= n^-2 < 2^(1-j); it must end before the horizon
    assert 2 ** (levels[-1] / 2) <= 100_000


# -- gauge measure bounds ---------------------------------------------------


def test_gauge_measure_bound_examples():
    b = gauge_measure_bound(PowerLaw(1, 2), Monomial(0.6), 1)
    assert not b.infinite and b.bound == pytest.approx(zeta(1.2), rel=1e-9)
    assert gauge_measure_bound(PowerLaw(1, 2), Monomial(0.4), 1).infinite
    assert gauge_measure_bound(Geometric(0.5), Identity(), 2).bound == pytest.approx(0.5)


def test_gauge_measure_bound_nonincreasing_in_n0():
    bounds = [gauge_measure_bound(PowerLaw(1, 2), Monomial(0.7), n0).bound for n0 in (1, 10, 100, 10_000)]
    assert all(a > b for a, b in zip(bounds, bounds[1:]))


@pytest.mark.parametrize("s", [0.3, 0.45, 0.5, 0.55, 0.7, 1.0])
def test_bound_and_series_dichotomy_agree(s):
    seq = PowerLaw(1, 2)
    finite = not gauge_measure_bound(seq, Monomial(s), 1).infinite
    convergent = classify_series_gauge(seq, Monomial(s)).verdict is Verdict.CONVERGENT
    assert finite == convergent == (s > 0.5)


# -- intersections ----------------------------------------------------------


def test_intersection_of_full_circles():
    cfg = TrialConfig(Explicit((1.0,) * 64), 64, checkpoints=())
    est = intersection_experiment(cfg, 2, 10, levels=range(2, 9))
    assert est.slope == pytest.approx(1.0)


def test_intersection_with_one_copy_is_the_plain_estimate():
    cfg = TrialConfig(PowerLaw(1, 2), 20_000, checkpoints=(), tail_starts=(100,))
    assert intersection_experiment(cfg, 1, 100) == estimate_dimension(run_trial(cfg), 100)


def test_intersection_stays_near_critical_exponent():
    cfg = TrialConfig(PowerLaw(1, 2), 100_000, checkpoints=())
    ests = [intersection_experiment(cfg.with_trial(t), 2, 100) for t in range(3)]
    assert 0.35 <= float(np.mean([e.slope for e in ests])) <= 0.65
    assert all(e.extra["copies"] == 2 for e in ests)


def test_intersection_empty_is_degenerate():
    seq = Explicit((1e-9,) * 50)
    est = intersection_experiment(TrialConfig(seq, 50, checkpoints=()), 2, 1, levels=range(3, 8))
    assert est.degenerate and est.slope == 0.0
