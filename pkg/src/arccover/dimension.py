"""Size estimates for the covered set: dyadic box counts, log-log slopes,
cover-based Hausdorff g-measure bounds and the intersection experiment.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circle import Arc, ArcSet, arcset_intersection
from .io import csv_text, json_text, metadata
from .sequences import GaugeFunction, LengthSequence
from .series import SeriesVerdict, classify_series_gauge, tail_gauge_bounds
from .simulation import ArcTable, TrialConfig, TrialResult, run_trial

__all__ = [
    "MAX_LEVEL",
    "DimensionEstimate",
    "GaugeMeasureBound",
    "box_count",
    "box_counts",
    "default_levels",
    "box_dimension",
    "estimate_dimension",
    "shell_levels",
    "shell_dimension",
    "gauge_measure_bound",
    "intersection_experiment",
]

MAX_LEVEL = 40


def box_count(s: ArcSet, level: int) -> int:
    """Number of dyadic cells ``[k 2^-j, (k+1) 2^-j)`` meeting ``s``."""
    if not 0 <= level <= MAX_LEVEL:
        raise ValueError(f"level must be in [0, {MAX_LEVEL}], got {level}")
    if s.is_empty:
        return 0
    scale = float(1 << level)
    # scaling by a power of two is exact, so cell membership is decided exactly
    lo = np.floor(s.starts * scale).astype(np.int64)
    hi = np.ceil(s.ends * scale).astype(np.int64) - 1
    # pieces are sorted and disjoint: consecutive cell ranges share at most one cell
    shared = int(np.count_nonzero(lo[1:] == hi[:-1]))
    return int(np.sum(hi - lo + 1)) - shared


def box_counts(s: ArcSet, levels) -> list[tuple[int, int]]:
    return [(int(j), box_count(s, int(j))) for j in levels]


@dataclass(frozen=True)
class DimensionEstimate:
    slope: float
    raw_slope: float
    j_min: int
    j_max: int
    counts: tuple
    residual_sum: float
    local_slopes: tuple
    degenerate: bool = False
    method: str = "tail"
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def dimension(self) -> float:
        return self.slope

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "slope": self.slope,
            "raw_slope": self.raw_slope,
            "levels": [self.j_min, self.j_max],
            "degenerate": self.degenerate,
            "residual_sum": self.residual_sum,
            "counts": [[j, c] for j, c in self.counts],
            "local_slopes": list(self.local_slopes),
            **self.extra,
        }

    def rows(self) -> list[list]:
        out = []
        for k, (j, c) in enumerate(self.counts):
            out.append([j, c, self.local_slopes[k - 1] if k else None])
        return out

    def to_csv(self, meta: dict | None = None) -> str:
        return csv_text(["j", "N_j", "local_slope"], self.rows(), metadata(meta))

    def to_json(self, meta: dict | None = None) -> str:
        return json_text(self.to_dict(), metadata(meta))


def _fit(counts: list[tuple[int, int]], method: str, extra=None) -> DimensionEstimate:
    js = np.array([j for j, _ in counts], dtype=np.float64)
    ns = np.array([c for _, c in counts], dtype=np.float64)
    j_min, j_max = int(js[0]), int(js[-1])
    if np.any(ns == 0):
        return DimensionEstimate(0.0, 0.0, j_min, j_max, tuple(counts), 0.0, (), True, method, extra or {})
    y = np.log2(ns)
    A = np.vstack([js, np.ones_like(js)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    raw = float(coef[0])
    resid = float(np.sum((A @ coef - y) ** 2))
    local = tuple((np.diff(y) / np.diff(js)).tolist())
    return DimensionEstimate(
        float(np.clip(raw, 0.0, 1.0)), raw, j_min, j_max, tuple(counts), resid, local, False, method, extra or {}
    )


def _check_levels(levels) -> list[int]:
    levels = sorted({int(j) for j in levels})
    if len(levels) < 3:
        raise ValueError(f"need at least 3 dyadic levels, got {levels}")
    if levels[0] < 0 or levels[-1] > MAX_LEVEL:
        raise ValueError(f"levels must lie in [0, {MAX_LEVEL}]")
    return levels


def _window_set(window) -> ArcSet | None:
    if window is None:
        return None
    if isinstance(window, ArcSet):
        return window
    if isinstance(window, Arc):
        return window.to_arcset()
    center, length = window
    return Arc(center, length).to_arcset()


def box_dimension(s: ArcSet, levels, window=None, method: str = "tail") -> DimensionEstimate:
    """Least-squares slope of ``log2 N_j`` against ``j`` for the set ``s`` (restricted to ``window``)."""
    levels = _check_levels(levels)
    v = _window_set(window)
    if v is not None:
        s = arcset_intersection(s, v)
    return _fit(box_counts(s, levels), method)


def default_levels(seq: LengthSequence, m: int, horizon: int) -> range:
    """Levels with ``l_N < 2^-j < l_m``, one level of margin on each side."""
    lm, ln = float(seq.lengths(np.array([m]))[0]), float(seq.lengths(np.array([horizon]))[0])
    j_min = math.ceil(math.log2(1.0 / lm)) + 1 if lm < 1 else 1
    j_max = math.floor(math.log2(1.0 / ln)) - 1 if ln > 0 else MAX_LEVEL
    return range(max(j_min, 0), min(j_max, MAX_LEVEL) + 1)


def estimate_dimension(result: TrialResult, m: int, window=None, levels=None) -> DimensionEstimate:
    """Box-counting slope of the tail union ``A(X_n, l_n), m <= n <= N``."""
    cfg = result.config
    if levels is None:
        levels = default_levels(cfg.seq, m, cfg.horizon)
    return box_dimension(result.tail_union(m), levels, window, method="tail")


# -- scale-matched (shell) estimator ---------------------------------------


def _shell_bounds(lengths: np.ndarray, j: int) -> tuple[int, int]:
    """1-based index range of arcs with ``2^-j <= l_n < 2^(1-j)`` (lengths nonincreasing)."""
    rev = lengths[::-1]
    size = lengths.size
    lo_len, hi_len = 2.0 ** -j, 2.0 ** (1 - j)
    # count of terms >= x in a nonincreasing array
    at_least = lambda x: size - int(np.searchsorted(rev, x, side="left"))
    return at_least(hi_len) + 1, at_least(lo_len)


def shell_levels(seq: LengthSequence, horizon: int, min_arcs: int = 4) -> range:
    """Levels whose whole length shell lies inside ``1..horizon`` and holds enough arcs.

    For sequences with sparse shells (geometric lengths) the arc-count floor is
    dropped and every complete shell is used.
    """
    n = np.arange(1, horizon + 1)
    lengths = np.asarray(seq.lengths(n), dtype=np.float64)
    last = lengths[-1]
    j_top = MAX_LEVEL if last <= 0 else min(MAX_LEVEL, math.floor(math.log2(1.0 / last)))
    first = 0 if lengths[0] >= 1 else math.ceil(math.log2(1.0 / lengths[0]))
    full = [j for j in range(max(first + 1, 0), j_top + 1)]
    dense = []
    for j in full:
        lo, hi = _shell_bounds(lengths, j)
        if hi - lo + 1 >= min_arcs:
            dense.append(j)
    chosen = dense if len(dense) >= 3 else full
    if not chosen:
        return range(0)
    return range(chosen[0], chosen[-1] + 1)


def shell_dimension(config: TrialConfig, levels=None, window=None, table: ArcTable | None = None) -> DimensionEstimate:
    """Box-counting slope where level ``j`` only sees arcs of length in ``[2^-j, 2^(1-j))``.

    Arcs much longer than the cells are already resolved and arcs much shorter
    are unresolved points, so matching the arc scale to the cell scale counts
    the natural cover of the limsup set at each scale.
    """
    if levels is None:
        levels = shell_levels(config.seq, config.horizon)
    levels = _check_levels(levels)
    if table is None:
        table = ArcTable.for_config(config)
    lengths = np.asarray(config.seq.lengths(np.arange(1, config.horizon + 1)), dtype=np.float64)
    v = _window_set(window)
    counts = []
    for j in levels:
        lo, hi = _shell_bounds(lengths, j)
        piece = table.union(lo, hi) if hi >= lo else ArcSet()
        if v is not None:
            piece = arcset_intersection(piece, v)
        counts.append((j, box_count(piece, j)))
    return _fit(counts, "shell")


# -- Hausdorff g-measure bound ---------------------------------------------


@dataclass(frozen=True)
class GaugeMeasureBound:
    """Upper bound ``sum_{n >= n0} g(l_n)`` on ``H^g_delta`` of the covered set, ``delta = l_{n0}``."""

    gauge: GaugeFunction
    n0: int
    bound: float
    upper: float
    infinite: bool
    context: SeriesVerdict

    def to_dict(self) -> dict:
        return {
            "gauge": getattr(self.gauge, "spec", repr(self.gauge)),
            "n0": self.n0,
            "bound": None if self.infinite else self.bound,
            "upper": None if self.infinite else self.upper,
            "infinite": self.infinite,
            "series": self.context.to_dict(),
        }


def gauge_measure_bound(seq: LengthSequence, g: GaugeFunction, n0: int) -> GaugeMeasureBound:
    """Cover bound from the arcs with index ``>= n0``; it tends to 0 as ``n0`` grows
    exactly when the gauge series converges."""
    context = classify_series_gauge(seq, g, horizons=[1000, 10_000, 100_000])
    if not context.convergent or context.method.value != "analytic":
        return GaugeMeasureBound(g, n0, math.inf, math.inf, True, context)
    est, _, upper = tail_gauge_bounds(seq, g, n0)
    return GaugeMeasureBound(g, n0, est, upper, False, context)


# -- intersection of independent copies ------------------------------------


def intersection_experiment(config: TrialConfig, copies: int, m: int, levels=None, window=None) -> DimensionEstimate:
    """Dimension of the intersection of ``copies`` independent tail unions.

    Copies use trial indices ``config.trial_index * copies + i`` so repeated
    experiments with consecutive trial indices never share a copy.
    """
    if copies < 1:
        raise ValueError(f"copies must be >= 1, got {copies}")
    cfg = TrialConfig(config.seq, config.horizon, config.seed, config.trial_index, (), (m,))
    if levels is None:
        levels = default_levels(cfg.seq, m, cfg.horizon)
    if copies == 1:
        return estimate_dimension(run_trial(cfg), m, window, levels)
    base = config.trial_index * copies
    sets = [run_trial(cfg.with_trial(base + i)).tail_union(m) for i in range(copies)]
    inter = sets[0]
    for s in sets[1:]:
        inter = arcset_intersection(inter, s)
    est = box_dimension(inter, levels, window, method="intersection")
    return DimensionEstimate(
        est.slope,
        est.raw_slope,
        est.j_min,
        est.j_max,
        est.counts,
        est.residual_sum,
        est.local_slopes,
        est.degenerate,
        est.method,
        {"copies": copies, "tail_start": m, "measure": inter.measure()},
    )
