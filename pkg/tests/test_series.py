import math

import numpy as np
import pytest
from scipy.special import zeta

from arccover.sequences import Explicit, Geometric, Harmonic, Identity, Monomial, MonomialLog, PowerLaw, PowerLog, Table
from arccover.series import (
    GaugeOrder,
    Method,
    SeriesVerdict,
    Verdict,
    classify_series_gauge,
    compare_gauges,
    critical_exponent,
    shepp_test,
    sum_verdict,
    tail_gauge_bounds,
    tail_gauge_sum,
    validate_gauge,
)

CLOSED_FORMS = [PowerLaw(1, 2), PowerLaw(0.5, 1.25), PowerLaw(2, 3), Harmonic(1), Harmonic(0.3), PowerLog(1, 1.5, 1), PowerLog(1, 1, 2), Geometric(0.5)]


# -- critical exponent ------------------------------------------------------


@pytest.mark.parametrize("seq, s", [(PowerLaw(1, 2), 0.5), (Harmonic(1), 1.0), (Geometric(0.5), 0.0), (PowerLog(1, 4, -1), 0.25)])
def test_critical_exponent_examples(seq, s):
    ce = critical_exponent(seq)
    assert ce.value == s and ce.method is Method.ANALYTIC


@pytest.mark.parametrize("a", [0.01, 0.5, 1, 7])
@pytest.mark.parametrize("alpha", [1.01, 1.5, 2, 10])
def test_critical_exponent_ignores_constant_factor(a, alpha):
    assert critical_exponent(PowerLaw(a, alpha)).value == 1 / alpha


def test_explicit_critical_exponent_is_an_estimate():
    n = np.arange(1, 10_001)
    ce = critical_exponent(Explicit(tuple(n**-2.0)))
    assert ce.method is Method.NUMERIC
    assert ce.value == pytest.approx(0.5, abs=1e-12)


def test_explicit_critical_exponent_needs_enough_terms():
    with pytest.raises(ValueError, match="64"):
        critical_exponent(Explicit(tuple(0.5**k for k in range(1, 20))))


# -- Shepp's series ---------------------------------------------------------


@pytest.mark.parametrize("c, verdict", [(0.5, "convergent"), (0.9, "convergent"), (0.99, "convergent"), (1, "divergent"), (1.2, "divergent"), (2, "divergent")])
def test_shepp_threshold_for_harmonic(c, verdict):
    v = shepp_test(Harmonic(c))
    assert v.verdict.value == verdict and v.method is Method.ANALYTIC
    assert len(v.partial_sums) == 3


@pytest.mark.parametrize("seq", [PowerLaw(1, 2), Geometric(0.5), PowerLog(5, 1, 1.5)])
def test_shepp_summable_lengths_converge(seq):
    assert shepp_test(seq).verdict is Verdict.CONVERGENT


def test_shepp_partial_sums_match_direct_oracle():
    seq = Harmonic(0.5)
    n = np.arange(1, 10_001)
    direct = float(np.sum(np.exp(np.cumsum(0.5 / n)) / n**2))
    (_, s), = shepp_test(seq, horizons=[10_000]).partial_sums
    assert s == pytest.approx(direct, rel=1e-12)


def test_shepp_numeric_protocol_on_explicit_sequences():
    n = np.arange(1, 100_001)
    assert shepp_test(Explicit(tuple(2.0 / n))).verdict is Verdict.DIVERGENT
    # n^-2 exp(sum l) still has an n^-2 tail, far above the 1e-6 flatness bar
    v = shepp_test(Explicit(tuple(1.0 / n**2)))
    assert v.method is Method.NUMERIC and v.verdict is Verdict.INCONCLUSIVE


def test_numeric_gauge_protocol_detects_fast_convergence():
    n = np.arange(1, 100_001)
    v = classify_series_gauge(Explicit(tuple(n.astype(float) ** -4)), Identity())
    assert v.method is Method.NUMERIC and v.verdict is Verdict.CONVERGENT


def test_analytic_verdict_is_never_inconclusive():
    with pytest.raises(ValueError):
        SeriesVerdict(Verdict.INCONCLUSIVE, Method.ANALYTIC, ())


# -- gauge series -----------------------------------------------------------


@pytest.mark.parametrize(
    "seq, g, verdict",
    [
        (PowerLaw(1, 2), Monomial(0.5), Verdict.DIVERGENT),
        (PowerLaw(1, 2), Monomial(0.6), Verdict.CONVERGENT),
        (Harmonic(1), Identity(), Verdict.DIVERGENT),
        (PowerLaw(1, 2), MonomialLog(0.5, 1.0), Verdict.DIVERGENT),
        (PowerLaw(1, 2), MonomialLog(0.5, 1.5), Verdict.CONVERGENT),
        (PowerLog(1, 1, 2), Identity(), Verdict.CONVERGENT),
        (PowerLog(1, 1, 1), Identity(), Verdict.DIVERGENT),
        (Geometric(0.5), Monomial(0.01), Verdict.CONVERGENT),
    ],
)
def test_classify_series_gauge_examples(seq, g, verdict):
    v = classify_series_gauge(seq, g)
    assert v.verdict is verdict and v.method is Method.ANALYTIC


@pytest.mark.parametrize("seq", CLOSED_FORMS)
def test_gauge_dichotomy_matches_critical_exponent(seq):
    s_l = critical_exponent(seq).value
    for s in np.linspace(0.01, 1.0, 100):
        if abs(s - s_l) < 1e-9:
            continue
        v = classify_series_gauge(seq, Monomial(float(s)), horizons=[10, 100, 1000]).verdict
        assert v is (Verdict.DIVERGENT if s < s_l else Verdict.CONVERGENT)


def test_numeric_gauge_verdict_for_table_gauge():
    g = Table(((1e-12, 1e-6), (1.0, 1.0)))
    v = classify_series_gauge(PowerLaw(1, 2), g)
    assert v.method is Method.NUMERIC and v.verdict is Verdict.DIVERGENT


def test_table_domain_error():
    g = Table(((1e-3, 1e-3), (1.0, 1.0)))
    with pytest.raises(ValueError, match="only defined"):
        classify_series_gauge(PowerLaw(1, 2), g)


# -- tail sums --------------------------------------------------------------


def test_basel_sum():
    assert tail_gauge_sum(PowerLaw(1, 2), Identity(), 1) == pytest.approx(math.pi**2 / 6, abs=1e-9)


def test_basel_sum_through_a_table_gauge_on_harmonic_lengths():
    g = Table(((1e-6, 1e-12), (1.0, 1.0)))
    got = tail_gauge_sum(Harmonic(1), g, 1, 100_000)
    assert got == pytest.approx(math.pi**2 / 6 - zeta(2, 100_001), abs=1e-9)


@pytest.mark.parametrize("s, n0", [(0.6, 1), (0.6, 50), (0.8, 1), (0.75, 1000)])
def test_tail_sum_against_hurwitz_zeta(s, n0):
    est, lo, hi = tail_gauge_bounds(PowerLaw(1, 2), Monomial(s), n0)
    exact = zeta(2 * s, n0)
    assert lo <= exact <= hi
    assert est == pytest.approx(exact, rel=1e-9)


def test_geometric_tail_sums():
    assert tail_gauge_sum(Geometric(0.5), Identity(), 1) == pytest.approx(1.0, abs=1e-15)
    assert tail_gauge_sum(Geometric(0.5), Identity(), 2) == pytest.approx(0.5, abs=1e-15)


def test_empty_tail_sum():
    assert tail_gauge_sum(PowerLaw(1, 2), Identity(), 5, 4) == 0.0


def test_infinite_tail_requires_convergence():
    with pytest.raises(ValueError):
        tail_gauge_sum(Harmonic(1), Identity(), 1)


def test_tail_sum_monotone_in_n0_and_N():
    seq, g = PowerLaw(1, 1.5), Monomial(0.9)
    by_n0 = [tail_gauge_sum(seq, g, n0) for n0 in (1, 2, 10, 100, 10_000)]
    assert all(a >= b for a, b in zip(by_n0, by_n0[1:]))
    by_N = [tail_gauge_sum(seq, g, 3, N) for N in (2, 3, 10, 1000, 100_000)]
    assert all(a <= b for a, b in zip(by_N, by_N[1:]))


def test_sum_verdict():
    assert sum_verdict(PowerLaw(1, 2)).verdict is Verdict.CONVERGENT
    assert sum_verdict(Harmonic(0.1)).verdict is Verdict.DIVERGENT


# -- gauge axioms and ordering ---------------------------------------------


def test_validate_gauge():
    assert validate_gauge(Monomial(0.5)).valid
    assert validate_gauge(Identity()).valid
    assert validate_gauge(MonomialLog(0.5, 0.3)).valid


def test_validate_gauge_log_correction_breaks_axiom_inside_window():
    # g(r)/r = r^-0.5 log(1/r)^-2 increases once log(1/r) < 4
    report = validate_gauge(MonomialLog(0.5, 2.0))
    assert not report.valid and "g(r)/r" in report.violation
    # first violating grid pair sits within one grid step above e^-4
    assert math.exp(-4) <= report.pair[0] <= 1.12 * math.exp(-4)
    report = validate_gauge(Table(((0.1, 0.2), (0.2, 0.1))))
    assert not report.valid and "nondecreasing" in report.violation


def test_validate_gauge_flags_superlinear_tables():
    report = validate_gauge(Table(((0.1, 0.01), (0.2, 0.1))))
    assert not report.valid and "g(r)/r" in report.violation


def test_compare_gauges():
    assert compare_gauges(Monomial(0.4), Monomial(0.5)) is GaugeOrder.FIRST_FINER
    assert compare_gauges(Monomial(0.5), Monomial(0.5)) is GaugeOrder.NEITHER
    assert compare_gauges(Monomial(0.5), Identity()) is GaugeOrder.FIRST_FINER
    assert compare_gauges(Identity(), Monomial(0.5)) is GaugeOrder.SECOND_FINER
