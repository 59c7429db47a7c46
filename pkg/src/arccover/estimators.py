"""scikit-learn style front ends.

``fit`` takes a length sequence (object or spec string) or, for the plain
box counter, an :class:`~arccover.circle.ArcSet`.  Fitted attributes end in
an underscore and hyperparameters round-trip through ``get_params``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_levels, check_positive_int, check_sequence, check_window
from .circle import ArcSet
from .dimension import box_counts, box_dimension, estimate_dimension, intersection_experiment, shell_dimension
from .rng import DEFAULT_SEED
from .series import critical_exponent
from .simulation import TrialConfig, run_ensemble, run_trial

__all__ = ["CoverageSimulator", "BoxCountingDimension", "LimsupDimensionEstimator"]


class CoverageSimulator(BaseEstimator):
    """Ensemble of random coverings for one length sequence."""

    def __init__(self, horizon=100_000, n_trials=100, seed=DEFAULT_SEED, checkpoints=None, tail_starts=()):
        self.horizon = horizon
        self.n_trials = n_trials
        self.seed = seed
        self.checkpoints = checkpoints
        self.tail_starts = tail_starts

    def fit(self, seq, y=None):
        seq = check_sequence(seq)
        horizon = check_positive_int(self.horizon, "horizon")
        trials = check_positive_int(self.n_trials, "n_trials")
        self.config_ = TrialConfig(seq, horizon, int(self.seed), 0, self.checkpoints, tuple(self.tail_starts))
        self.stats_ = run_ensemble(self.config_, trials)
        self.coverage_fraction_ = self.stats_.coverage_fraction
        self.tail_cover_fraction_ = dict(self.stats_.tail_cover_fraction)
        return self

    def score(self, seq=None, y=None):
        """Fraction of trials whose prefix union covers the circle by the horizon."""
        check_is_fitted(self, "stats_")
        return self.coverage_fraction_


class BoxCountingDimension(BaseEstimator):
    """Dyadic box-counting slope of a finite union of arcs."""

    def __init__(self, levels=(4, 5, 6, 7, 8, 9, 10), window=None):
        self.levels = levels
        self.window = window

    def fit(self, X: ArcSet, y=None):
        if not isinstance(X, ArcSet):
            raise TypeError(f"expected an ArcSet, got {type(X).__name__}")
        levels = check_levels(self.levels)
        self.estimate_ = box_dimension(X, levels, check_window(self.window))
        self.dimension_ = self.estimate_.slope
        self.counts_ = np.array([c for _, c in self.estimate_.counts])
        return self

    def transform(self, X: ArcSet):
        """Box counts of ``X`` at the configured levels."""
        check_is_fitted(self, "estimate_")
        return np.array([c for _, c in box_counts(X, check_levels(self.levels))])


class LimsupDimensionEstimator(BaseEstimator):
    """Monte Carlo dimension estimate of the limsup set of the random arcs.

    ``method="tail"`` box-counts the tail union ``n >= tail_start`` over the
    scale band of that tail.  ``method="shell"`` matches the arc scale to the
    cell scale level by level and is the one that tracks the critical exponent
    across a parameter sweep.  ``method="intersection"`` box-counts the
    intersection of ``copies`` independent tail unions.
    """

    def __init__(
        self,
        horizon=100_000,
        n_trials=20,
        seed=DEFAULT_SEED,
        method="tail",
        tail_start=None,
        levels=None,
        window=None,
        copies=2,
    ):
        self.horizon = horizon
        self.n_trials = n_trials
        self.seed = seed
        self.method = method
        self.tail_start = tail_start
        self.levels = levels
        self.window = window
        self.copies = copies

    def _tail_start(self, horizon):
        if self.tail_start is not None:
            return check_positive_int(self.tail_start, "tail_start")
        return max(1, horizon // 100)

    def fit(self, seq, y=None):
        seq = check_sequence(seq)
        horizon = check_positive_int(self.horizon, "horizon")
        trials = check_positive_int(self.n_trials, "n_trials")
        levels = check_levels(self.levels)
        window = check_window(self.window)
        m = self._tail_start(horizon)
        base = TrialConfig(seq, horizon, int(self.seed), 0, (), (m,))
        estimates = []
        for t in range(trials):
            cfg = base.with_trial(t)
            if self.method == "tail":
                est = estimate_dimension(run_trial(cfg), m, window, levels)
            elif self.method == "shell":
                est = shell_dimension(cfg, levels, window)
            elif self.method == "intersection":
                est = intersection_experiment(cfg, check_positive_int(self.copies, "copies"), m, levels, window)
            else:
                raise ValueError(f"method must be 'tail', 'shell' or 'intersection', got {self.method!r}")
            estimates.append(est)
        self.estimates_ = estimates
        slopes = np.array([e.slope for e in estimates])
        self.dimension_ = float(slopes.mean())
        self.dimension_std_ = float(slopes.std(ddof=1)) if slopes.size > 1 else 0.0
        try:
            self.theory_ = critical_exponent(seq).value
        except ValueError:
            self.theory_ = float("nan")
        return self

    def predict(self, seq=None):
        """Fitted mean dimension (the estimator is fitted per sequence)."""
        check_is_fitted(self, "dimension_")
        return self.dimension_
