"""Seeded Monte Carlo for the random arcs ``A(X_n, l_n)``.

A trial draws the centers ``X_1..X_N`` from the counter-based stream, splits
every arc into at most two pieces of ``[0, 1]`` and sorts the pieces once.
Any prefix union (``n <= k``) or tail union (``n >= m``) is then a masked,
already-sorted merge, so checkpoints, tail starts and the first-coverage
search never re-sort.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circle import ArcSet, _merge, arc_pieces, arcset_complement
from .io import csv_text, json_text, metadata
from .rng import DEFAULT_SEED, sample_centers
from .sequences import LengthSequence

__all__ = [
    "TrialConfig",
    "TrialResult",
    "TrialSummary",
    "EnsembleStats",
    "ArcTable",
    "default_checkpoints",
    "run_trial",
    "run_ensemble",
    "tail_union",
]


def default_checkpoints(horizon: int) -> tuple[int, ...]:
    """Powers of two up to the horizon, plus the horizon itself."""
    pts = [1 << k for k in range(max(horizon, 1).bit_length()) if (1 << k) <= horizon]
    if horizon not in pts:
        pts.append(horizon)
    return tuple(pts)


@dataclass(frozen=True)
class TrialConfig:
    seq: LengthSequence
    horizon: int
    seed: int = DEFAULT_SEED
    trial_index: int = 0
    checkpoints: tuple | None = None
    tail_starts: tuple = ()

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.trial_index < 0:
            raise ValueError("trial_index must be nonnegative")
        if self.seq.size is not None and self.horizon > self.seq.size:
            raise ValueError(f"horizon {self.horizon} exceeds the {self.seq.size} explicit terms")
        cps = default_checkpoints(self.horizon) if self.checkpoints is None else self.checkpoints
        cps = tuple(sorted({int(c) for c in cps}))
        if cps and (cps[0] < 0 or cps[-1] > self.horizon):
            raise ValueError("checkpoints must lie in [0, horizon]")
        tails = tuple(sorted({int(m) for m in self.tail_starts}))
        if tails and (tails[0] < 1 or tails[-1] > self.horizon):
            raise ValueError("tail starts must lie in [1, horizon]")
        object.__setattr__(self, "checkpoints", cps)
        object.__setattr__(self, "tail_starts", tails)

    def with_trial(self, trial_index: int) -> "TrialConfig":
        return TrialConfig(self.seq, self.horizon, self.seed, trial_index, self.checkpoints, self.tail_starts)

    def to_dict(self) -> dict:
        return {
            "seq": self.seq.spec,
            "horizon": self.horizon,
            "seed": self.seed,
            "trial_index": self.trial_index,
            "checkpoints": list(self.checkpoints),
            "tail_starts": list(self.tail_starts),
        }


class ArcTable:
    """All arc pieces of one trial, sorted by left endpoint."""

    def __init__(self, seq: LengthSequence, seed: int, trial_index: int, first: int, last: int):
        n = np.arange(first, last + 1, dtype=np.int64)
        self.centers = sample_centers(seed, trial_index, n)
        self.lengths = np.asarray(seq.lengths(n), dtype=np.float64)
        s, e, owner = arc_pieces(self.centers, self.lengths)
        order = np.argsort(s, kind="stable")
        self.starts = s[order]
        self.ends = e[order]
        self.index = n[owner[order]]

    @classmethod
    def for_config(cls, config: TrialConfig) -> "ArcTable":
        return cls(config.seq, config.seed, config.trial_index, 1, config.horizon)

    def union(self, lo: int = 1, hi: int | None = None) -> ArcSet:
        """Union of the arcs with ``lo <= n <= hi``."""
        mask = self.index >= lo
        if hi is not None:
            mask &= self.index <= hi
        return _merge(self.starts[mask], self.ends[mask], presorted=True)


@dataclass(frozen=True)
class TrialResult:
    config: TrialConfig
    first_cover_n: int | None
    uncovered_curve: tuple
    tail_unions: dict = field(repr=False)

    @property
    def covered(self) -> bool:
        return self.first_cover_n is not None

    def tail_union(self, m: int) -> ArcSet:
        return tail_union(self, m)

    def __eq__(self, other):
        if not isinstance(other, TrialResult):
            return NotImplemented
        return (
            self.config == other.config
            and self.first_cover_n == other.first_cover_n
            and self.uncovered_curve == other.uncovered_curve
            and self.tail_unions.keys() == other.tail_unions.keys()
            and all(self.tail_unions[m] == other.tail_unions[m] for m in self.tail_unions)
        )

    def summary(self) -> "TrialSummary":
        return TrialSummary(
            trial_index=self.config.trial_index,
            first_cover_n=self.first_cover_n,
            uncovered_curve=self.uncovered_curve,
            tail_measures={m: s.measure() for m, s in self.tail_unions.items()},
            tail_covered={m: s.is_full for m, s in self.tail_unions.items()},
        )

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "replay": {"seed": self.config.seed, "trial_index": self.config.trial_index},
            "first_cover_n": self.first_cover_n,
            "uncovered_curve": [[n, u] for n, u in self.uncovered_curve],
            "tail_unions": {
                str(m): {"measure": s.measure(), "intervals": [list(p) for p in s.intervals]}
                for m, s in self.tail_unions.items()
            },
        }

    def to_json(self, meta: dict | None = None) -> str:
        return json_text(self.to_dict(), metadata(meta))

    def to_csv(self, meta: dict | None = None) -> str:
        return csv_text(["N", "measure"], self.uncovered_curve, metadata(meta))


def tail_union(result: TrialResult, m: int) -> ArcSet:
    """The recorded union of ``A(X_n, l_n)`` for ``m <= n <= horizon``."""
    try:
        return result.tail_unions[m]
    except KeyError:
        raise KeyError(f"tail start {m} was not recorded; recorded: {sorted(result.tail_unions)}") from None


def _first_cover(table: ArcTable, horizon: int) -> int | None:
    if not table.union(1, horizon).is_full:
        return None
    big = np.flatnonzero(table.lengths >= 1.0)
    lo, hi = 1, (int(big[0]) + 1 if big.size else horizon)
    # coverage is monotone in the prefix length
    while lo < hi:
        mid = (lo + hi) // 2
        if table.union(1, mid).is_full:
            hi = mid
        else:
            lo = mid + 1
    return lo


def run_trial(config: TrialConfig) -> TrialResult:
    table = ArcTable.for_config(config)
    first = _first_cover(table, config.horizon)
    curve = []
    for c in config.checkpoints:
        if c == 0:
            curve.append((0, 1.0))
        elif first is not None and c >= first:
            curve.append((c, 0.0))
        else:
            curve.append((c, arcset_complement(table.union(1, c)).measure()))
    tails = {m: table.union(m) for m in config.tail_starts}
    return TrialResult(config, first, tuple(curve), tails)


@dataclass(frozen=True)
class TrialSummary:
    trial_index: int
    first_cover_n: int | None
    uncovered_curve: tuple
    tail_measures: dict
    tail_covered: dict = field(default_factory=dict)

    @property
    def uncovered_final(self) -> float:
        return self.uncovered_curve[-1][1] if self.uncovered_curve else math.nan


@dataclass(frozen=True)
class EnsembleStats:
    config: TrialConfig
    trials: tuple
    coverage_fraction: float
    first_cover_mean: float | None
    first_cover_quantiles: dict
    mean_uncovered: tuple
    mean_tail_measure: dict
    tail_cover_fraction: dict = field(default_factory=dict)

    @classmethod
    def from_summaries(cls, config: TrialConfig, summaries: Sequence[TrialSummary]) -> "EnsembleStats":
        trials = tuple(sorted(summaries, key=lambda s: s.trial_index))
        if not trials:
            raise ValueError("an ensemble needs at least one trial")
        times = np.array([s.first_cover_n for s in trials if s.first_cover_n is not None], dtype=np.float64)
        quantiles = {}
        mean_time = None
        if times.size:
            mean_time = float(times.mean())
            quantiles = {q: float(np.quantile(times, q)) for q in (0.1, 0.5, 0.9)}
        curves = np.array([[u for _, u in s.uncovered_curve] for s in trials], dtype=np.float64)
        mean_unc = tuple(zip(config.checkpoints, curves.mean(axis=0).tolist())) if curves.size else ()
        mean_tail = {m: float(np.mean([s.tail_measures[m] for s in trials])) for m in config.tail_starts}
        tail_cover = {m: sum(bool(s.tail_covered[m]) for s in trials) / len(trials) for m in config.tail_starts}
        return cls(
            config=config,
            trials=trials,
            coverage_fraction=times.size / len(trials),
            first_cover_mean=mean_time,
            first_cover_quantiles=quantiles,
            mean_uncovered=mean_unc,
            mean_tail_measure=mean_tail,
            tail_cover_fraction=tail_cover,
        )

    @property
    def n_trials(self) -> int:
        return len(self.trials)

    def to_dict(self) -> dict:
        return {
            "config": {k: v for k, v in self.config.to_dict().items() if k != "trial_index"},
            "n_trials": self.n_trials,
            "coverage_fraction": self.coverage_fraction,
            "first_cover_mean": self.first_cover_mean,
            "first_cover_quantiles": {str(q): v for q, v in self.first_cover_quantiles.items()},
            "mean_uncovered": [[n, u] for n, u in self.mean_uncovered],
            "mean_tail_measure": {str(m): v for m, v in self.mean_tail_measure.items()},
            "tail_cover_fraction": {str(m): v for m, v in self.tail_cover_fraction.items()},
            "trials": [
                {
                    "trial_index": s.trial_index,
                    "first_cover_n": s.first_cover_n,
                    "uncovered_final": s.uncovered_final,
                    "tail_measures": {str(m): v for m, v in s.tail_measures.items()},
                    "tail_covered": {str(m): v for m, v in s.tail_covered.items()},
                }
                for s in self.trials
            ],
        }

    def to_json(self, meta: dict | None = None) -> str:
        return json_text(self.to_dict(), metadata(meta))

    def to_csv(self, meta: dict | None = None) -> str:
        tails = list(self.config.tail_starts)
        header = ["trial_index", "first_cover_n", "uncovered_final"] + [f"tail_measure_{m}" for m in tails]
        rows = [
            [s.trial_index, s.first_cover_n, s.uncovered_final] + [s.tail_measures[m] for m in tails]
            for s in self.trials
        ]
        return csv_text(header, rows, metadata(meta))


def run_ensemble(config: TrialConfig, trials: int, executor=None) -> EnsembleStats:
    """Run trials ``0 .. trials-1`` of ``config``.

    ``executor`` may be any object with a ``map`` method (for example a
    ``concurrent.futures`` pool); aggregation does not depend on the order in
    which results arrive.
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    configs = [config.with_trial(t) for t in range(trials)]
    mapper = executor.map if executor is not None else map
    summaries = list(mapper(_summarize, configs))
    return EnsembleStats.from_summaries(config, summaries)


def _summarize(config: TrialConfig) -> TrialSummary:
    return run_trial(config).summary()
