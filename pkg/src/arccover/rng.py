"""Counter-based uniform stream for the arc centers.

The center of arc ``n`` in trial ``t`` is a pure function of ``(seed, t, n)``:
the tuple is folded through the SplitMix64 finalizer and the top 53 bits are
scaled into ``[0, 1)``.  Any index can be generated on its own, so replays,
chunked scans and parallel trials all see the same numbers.
"""
from __future__ import annotations

import numpy as np

__all__ = ["DEFAULT_SEED", "mix64", "stream_key", "sample_center", "sample_centers"]

DEFAULT_SEED = 20240611

_MASK = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_TRIAL_STEP = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV53 = 1.0 / (1 << 53)


def mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer on a uint64 array (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _u64(x: int) -> np.ndarray:
    return np.array([int(x) & _MASK], dtype=np.uint64)


def stream_key(seed: int, trial_index: int) -> np.uint64:
    k = mix64(_u64(seed) + _GOLDEN)
    k = mix64(k ^ (_u64(trial_index) * _TRIAL_STEP))
    return k[0]


def sample_centers(seed: int, trial_index: int, n) -> np.ndarray:
    """Centers ``X_n`` for an array of indices ``n >= 1`` (float64 in [0, 1))."""
    n = np.asarray(n, dtype=np.uint64)
    key = stream_key(seed, trial_index)
    with np.errstate(over="ignore"):
        u = mix64(key + n * _GOLDEN)
    return (u >> np.uint64(11)).astype(np.float64) * _INV53


def sample_center(seed: int, trial_index: int, n: int) -> float:
    if n < 1:
        raise ValueError(f"arc index must be >= 1, got {n}")
    return float(sample_centers(seed, trial_index, [n])[0])
