"""Series criteria on length sequences: Shepp's covering series, gauge series
``sum g(l_n)``, the critical exponent ``s_l`` and gauge comparisons.

Closed-form families are decided analytically (reduction to p-series and
Bertrand series).  Everything else goes through a finite partial-sum probe
that is allowed to answer ``INCONCLUSIVE``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy import integrate

from .sequences import (
    Explicit,
    GaugeFunction,
    Geometric,
    Harmonic,
    Identity,
    LengthSequence,
    PowerLaw,
    PowerLog,
    Table,
)

__all__ = [
    "Verdict",
    "Method",
    "SeriesVerdict",
    "CriticalExponent",
    "GaugeReport",
    "GaugeOrder",
    "DEFAULT_HORIZONS",
    "critical_exponent",
    "shepp_test",
    "classify_series_gauge",
    "tail_gauge_sum",
    "tail_gauge_bounds",
    "validate_gauge",
    "compare_gauges",
    "gauge_grid",
]

DEFAULT_HORIZONS = (10_000, 100_000, 1_000_000)
MIN_EXPLICIT_TERMS = 64
_CHUNK = 1 << 20
_BOUNDARY_TOL = 1e-12


class Verdict(str, enum.Enum):
    DIVERGENT = "divergent"
    CONVERGENT = "convergent"
    INCONCLUSIVE = "inconclusive"


class Method(str, enum.Enum):
    ANALYTIC = "analytic"
    NUMERIC = "numeric-heuristic"


@dataclass(frozen=True)
class SeriesVerdict:
    verdict: Verdict
    method: Method
    partial_sums: tuple = field(default=())

    def __post_init__(self):
        if self.method is Method.ANALYTIC and self.verdict is Verdict.INCONCLUSIVE:
            raise ValueError("analytic verdicts cannot be inconclusive")

    @property
    def divergent(self) -> bool:
        return self.verdict is Verdict.DIVERGENT

    @property
    def convergent(self) -> bool:
        return self.verdict is Verdict.CONVERGENT

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "method": self.method.value,
            "partial_sums": [[int(n), float(s)] for n, s in self.partial_sums],
        }


class CriticalExponent(NamedTuple):
    value: float
    method: Method


def _power_params(seq: LengthSequence):
    """``(a, alpha, beta)`` with ``l_n ~ a n^-alpha (log n)^-beta``, or None."""
    if isinstance(seq, PowerLaw):
        return seq.a, seq.alpha, 0.0
    if isinstance(seq, Harmonic):
        return seq.c, 1.0, 0.0
    if isinstance(seq, PowerLog):
        return seq.a, seq.alpha, seq.beta
    return None


# -- critical exponent ------------------------------------------------------


def critical_exponent(seq: LengthSequence) -> CriticalExponent:
    """Convergence exponent ``sup{s in (0,1) : sum l_n^s = inf}`` (sup of empty set = 0)."""
    params = _power_params(seq)
    if params is not None:
        return CriticalExponent(min(1.0, 1.0 / params[1]), Method.ANALYTIC)
    if isinstance(seq, Geometric):
        return CriticalExponent(0.0, Method.ANALYTIC)
    if isinstance(seq, Explicit):
        size = seq.size
        if size < MIN_EXPLICIT_TERMS:
            raise ValueError(
                f"explicit sequence has {size} terms; at least {MIN_EXPLICIT_TERMS} are needed to estimate s_l"
            )
        n = np.arange(size // 2 + 1, size + 1)
        vals = seq.lengths(n)
        with np.errstate(divide="ignore"):
            neg_log = -np.log(vals)
        # a term >= 1 behaves like an infinite ratio; clip to the [0, 1] range
        ratio = np.where(neg_log > 0, np.log(n) / np.where(neg_log > 0, neg_log, 1.0), 1.0)
        return CriticalExponent(float(np.clip(ratio.max(), 0.0, 1.0)), Method.NUMERIC)
    raise TypeError(f"unsupported sequence type {type(seq).__name__}")


# -- partial sums -----------------------------------------------------------


def _resolve_horizons(seq: LengthSequence, horizons) -> list[int]:
    hs = sorted({int(h) for h in (horizons or DEFAULT_HORIZONS)})
    if any(h < 1 for h in hs):
        raise ValueError("horizons must be positive")
    if seq.size is not None:
        if horizons is None:
            top = seq.size
            hs = [h for h in (top // 100, top // 10, top) if h >= 1]
        else:
            hs = [h for h in hs if h <= seq.size]
    return hs


def _partial_sums_of(term_fn, horizons: Sequence[int]) -> list[tuple[int, float]]:
    """Partial sums of ``term_fn(n)`` at each horizon, summed in chunks."""
    out = []
    total = 0.0
    done = 0
    for h in horizons:
        while done < h:
            hi = min(h, done + _CHUNK)
            total += float(np.sum(term_fn(np.arange(done + 1, hi + 1, dtype=np.float64))))
            done = hi
        out.append((h, total))
    return out


def _shepp_partial_sums(seq: LengthSequence, horizons: Sequence[int]) -> list[tuple[int, float]]:
    """Partial sums of ``n^-2 exp(l_1 + ... + l_n)`` evaluated in log space."""
    out = []
    if not horizons:
        return out
    log_total = -math.inf
    cum = 0.0
    done = 0
    for h in horizons:
        while done < h:
            hi = min(h, done + _CHUNK)
            n = np.arange(done + 1, hi + 1, dtype=np.float64)
            lengths = seq.lengths(n.astype(np.int64) if isinstance(seq, Explicit) else n)
            csum = cum + np.cumsum(lengths)
            cum = float(csum[-1])
            log_terms = csum - 2.0 * np.log(n)
            log_total = float(np.logaddexp(log_total, np.logaddexp.reduce(log_terms)))
            done = hi
        out.append((h, math.exp(log_total) if log_total < 709.0 else math.inf))
    return out


def _numeric_verdict(partial_sums: list[tuple[int, float]]) -> Verdict:
    """Three-horizon probe: flat tail means convergent, slowly decaying increments divergent."""
    if len(partial_sums) < 3:
        return Verdict.INCONCLUSIVE
    (_, s1), (_, s2), (_, s3) = partial_sums[-3:]
    if not all(math.isfinite(s) for s in (s1, s2, s3)):
        return Verdict.DIVERGENT
    if s3 - s1 < 1e-6 * s1:
        return Verdict.CONVERGENT
    inc1, inc2 = s2 - s1, s3 - s2
    if inc2 > 0 and inc1 / inc2 < 2.0:
        return Verdict.DIVERGENT
    return Verdict.INCONCLUSIVE


def shepp_test(seq: LengthSequence, horizons: Sequence[int] | None = None) -> SeriesVerdict:
    """Divergence of ``sum n^-2 exp(l_1 + ... + l_n)``, i.e. almost sure coverage of the circle."""
    hs = _resolve_horizons(seq, horizons)
    sums = tuple(_shepp_partial_sums(seq, hs))
    if isinstance(seq, Harmonic):
        # exp(c H_n) ~ e^{c gamma} n^c, so the terms behave like n^(c-2)
        verdict = Verdict.DIVERGENT if seq.c >= 1 else Verdict.CONVERGENT
        return SeriesVerdict(verdict, Method.ANALYTIC, sums)
    if isinstance(seq, PowerLaw) or isinstance(seq, Geometric):
        return SeriesVerdict(Verdict.CONVERGENT, Method.ANALYTIC, sums)
    if isinstance(seq, PowerLog):
        if seq.alpha > 1 or seq.beta > 0:
            # l_1 + ... + l_n = o(log n): terms are n^(-2 + o(1))
            verdict = Verdict.CONVERGENT
        elif seq.beta < 0:
            # partial sums of l grow like (log n)^(1 - beta), faster than 2 log n
            verdict = Verdict.DIVERGENT
        else:
            verdict = Verdict.DIVERGENT if seq.a >= 1 else Verdict.CONVERGENT
        return SeriesVerdict(verdict, Method.ANALYTIC, sums)
    return SeriesVerdict(_numeric_verdict(list(sums)), Method.NUMERIC, sums)


def _gauge_terms(seq: LengthSequence, g: GaugeFunction):
    def terms(n):
        if isinstance(seq, Explicit):
            n = n.astype(np.int64)
        return g(seq.lengths(n))

    return terms


def _analytic_gauge_verdict(seq: LengthSequence, g: GaugeFunction) -> Verdict | None:
    if not (seq.closed_form and g.closed_form):
        return None
    s, beta_g = g.exponent, g.log_power
    if isinstance(seq, Geometric):
        return Verdict.CONVERGENT
    params = _power_params(seq)
    if params is None:
        return None
    _, alpha, beta_l = params
    p = alpha * s
    gamma = beta_l * s + beta_g
    if abs(p - 1.0) <= _BOUNDARY_TOL:
        # Bertrand series sum 1/(n (log n)^gamma)
        return Verdict.DIVERGENT if gamma <= 1 else Verdict.CONVERGENT
    return Verdict.DIVERGENT if p < 1 else Verdict.CONVERGENT


def classify_series_gauge(
    seq: LengthSequence, g: GaugeFunction, horizons: Sequence[int] | None = None
) -> SeriesVerdict:
    """Convergence of ``sum g(l_n)``."""
    hs = _resolve_horizons(seq, horizons)
    analytic = _analytic_gauge_verdict(seq, g)
    with np.errstate(divide="ignore", invalid="ignore"):
        sums = tuple(_partial_sums_of(_gauge_terms(seq, g), hs))
    if analytic is not None:
        return SeriesVerdict(analytic, Method.ANALYTIC, sums)
    return SeriesVerdict(_numeric_verdict(list(sums)), Method.NUMERIC, sums)


# -- tail sums --------------------------------------------------------------

_DIRECT_TERMS = 1_000_000


def tail_gauge_bounds(seq: LengthSequence, g: GaugeFunction, n0: int) -> tuple[float, float, float]:
    """``(estimate, lower, upper)`` for ``sum_{n >= n0} g(l_n)``.

    The first ``10**6`` terms (or all terms above machine precision for
    geometric lengths) are summed directly; the remainder after index ``M`` is
    bracketed by ``int_{M+1}^inf`` and ``int_M^inf`` of ``x -> g(l(x))`` and
    estimated by the midpoint integral from ``M + 1/2``.
    """
    if n0 < 1:
        raise ValueError(f"n0 must be >= 1, got {n0}")
    verdict = _analytic_gauge_verdict(seq, g)
    if verdict is not Verdict.CONVERGENT:
        raise ValueError("infinite tail sums need an analytically convergent series")
    terms = _gauge_terms(seq, g)
    if isinstance(seq, Geometric):
        total, start = 0.0, n0
        while True:
            chunk = terms(np.arange(start, start + 4096, dtype=np.float64))
            total += float(np.sum(chunk))
            if chunk[-1] <= 1e-18 * total or chunk[-1] == 0.0:
                return total, total, total
            start += 4096
    last = n0 + _DIRECT_TERMS - 1
    head = _partial_sums_of(lambda n: terms(n + (n0 - 1)), [_DIRECT_TERMS])[0][1]

    a, alpha, beta_l = _power_params(seq)
    s, beta_g = g.exponent, g.log_power

    def log_integrand(u):
        # x = e^u; log of g(l(x)) * x, kept in log space so huge x cannot overflow
        log_l = math.log(a) - alpha * u - beta_l * math.log(u + math.log1p(math.exp(1.0 - u)))
        log_g = s * log_l - (beta_g * math.log(-log_l) if beta_g else 0.0)
        return u + log_g

    def integral(lo):
        val, _ = integrate.quad(
            lambda u: math.exp(log_integrand(u)), math.log(lo), math.inf, limit=500, epsabs=1e-15, epsrel=1e-11
        )
        return val

    est = head + integral(last + 0.5)
    return est, head + integral(last + 1), head + integral(last)


def tail_gauge_sum(seq: LengthSequence, g: GaugeFunction, n0: int, N: float = math.inf) -> float:
    """``sum_{n=n0}^{N} g(l_n)``; ``N = inf`` only for analytically convergent series."""
    if n0 < 1:
        raise ValueError(f"n0 must be >= 1, got {n0}")
    if math.isinf(N):
        return tail_gauge_bounds(seq, g, n0)[0]
    N = int(N)
    if N < n0:
        return 0.0
    terms = _gauge_terms(seq, g)
    return _partial_sums_of(lambda n: terms(n + (n0 - 1)), [N - n0 + 1])[0][1]


# -- gauge axioms -----------------------------------------------------------


def gauge_grid(num: int = 256, lo: float = 1e-12, hi: float = 0.5) -> np.ndarray:
    return np.logspace(math.log10(lo), math.log10(hi), num)


@dataclass(frozen=True)
class GaugeReport:
    valid: bool
    violation: str | None = None
    pair: tuple | None = None

    def __bool__(self):
        return self.valid


def _grid_for(g: GaugeFunction) -> np.ndarray:
    grid = gauge_grid()
    if isinstance(g, Table):
        lo, hi = g.domain
        pts = [r for r, _ in g.points]
        grid = np.unique(np.concatenate([grid[(grid >= lo) & (grid <= hi)], pts]))
    return grid


def validate_gauge(g: GaugeFunction, rtol: float = 1e-12) -> GaugeReport:
    """Check positivity, monotonicity of ``g`` and of ``g(r)/r`` on a log grid."""
    r = _grid_for(g)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.asarray(g(r), dtype=np.float64)
    bad = np.flatnonzero(~(vals > 0))
    if bad.size:
        i = int(bad[0])
        return GaugeReport(False, "g(r) is not positive", (float(r[i]), float(vals[i])))
    drop = np.flatnonzero(vals[1:] < vals[:-1] * (1 - rtol))
    if drop.size:
        i = int(drop[0])
        return GaugeReport(False, "g is not nondecreasing", (float(r[i]), float(r[i + 1])))
    ratio = vals / r
    rise = np.flatnonzero(ratio[1:] > ratio[:-1] * (1 + rtol))
    if rise.size:
        i = int(rise[0])
        return GaugeReport(False, "g(r)/r is not nonincreasing", (float(r[i]), float(r[i + 1])))
    return GaugeReport(True)


class GaugeOrder(str, enum.Enum):
    FIRST_FINER = "g1 < g2"
    SECOND_FINER = "g2 < g1"
    NEITHER = "neither"


COMPARE_FACTOR = 10.0


def compare_gauges(g1: GaugeFunction, g2: GaugeFunction, factor: float = COMPARE_FACTOR) -> GaugeOrder:
    """Heuristic test of ``g1 < g2`` (``g1/g2`` increases monotonically to infinity at 0).

    On the validation grid, the ratio must be monotone toward ``r = 1e-12``
    and grow by at least ``factor``.
    """
    r = gauge_grid()[::-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.asarray(g1(r), dtype=np.float64) / np.asarray(g2(r), dtype=np.float64)
    if not np.all(np.isfinite(ratio) & (ratio > 0)):
        return GaugeOrder.NEITHER
    steps = np.diff(np.log(ratio))
    if np.all(steps >= -1e-12) and ratio[-1] >= factor * ratio[0]:
        return GaugeOrder.FIRST_FINER
    if np.all(steps <= 1e-12) and ratio[0] >= factor * ratio[-1]:
        return GaugeOrder.SECOND_FINER
    return GaugeOrder.NEITHER


def sum_verdict(seq: LengthSequence, horizons: Sequence[int] | None = None) -> SeriesVerdict:
    """Convergence of ``sum l_n`` (the Lebesgue-measure dichotomy)."""
    return classify_series_gauge(seq, Identity(), horizons)
