"""Explicit point of the limsup set via nested arcs.

Starting from the first index with ``l_n <= 1/n``, each level scans forward
from ``max(n_k, 8 / l_{n_k})`` for the first arc ``A(X_n, 1/n)`` that sits
inside the current arc ``I_k = A(X_{n_k}, l_{n_k} / 2)``.  The centre of the
deepest arc lies in every ``I_k`` and therefore in ``K`` of the random arcs.

Lengths are carried as floats and may underflow to 0 for fast-decaying
sequences (``0.5**n`` past n = 1074).  Containment and hit tests treat a
distance of exactly 0 as inside, which is exact because every true length is
positive and distinct centers differ by at least ``2**-53``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circle import torus_distance
from .io import json_text, metadata
from .rng import sample_centers
from .sequences import LengthSequence

__all__ = [
    "DEFAULT_SEARCH_CAP",
    "GAP_FACTOR",
    "NestedCertificate",
    "SearchExhausted",
    "find_point",
    "verify_membership",
    "check_certificate",
]

DEFAULT_SEARCH_CAP = 10_000_000
GAP_FACTOR = 8.0
_CHUNK = 1 << 20


@dataclass(frozen=True)
class NestedCertificate:
    seed: int
    trial_index: int
    seq: LengthSequence
    indices: tuple
    centers: tuple
    lengths: tuple
    candidates: tuple = field(default=())

    @property
    def depth(self) -> int:
        return len(self.indices)

    @property
    def arcs(self) -> list[tuple[float, float]]:
        """``(center, length)`` of ``I_k = A(X_{n_k}, l_{n_k} / 2)``."""
        return [(c, l / 2) for c, l in zip(self.centers, self.lengths)]

    @property
    def point(self) -> float:
        return self.centers[-1]

    def to_dict(self) -> dict:
        arcs = []
        for k, (n, (c, half_len)) in enumerate(zip(self.indices, self.arcs)):
            arcs.append(
                {
                    "level": k + 1,
                    "n": n,
                    "center": c,
                    "length": half_len,
                    "left": (c - half_len / 2) % 1.0,
                    "right": (c + half_len / 2) % 1.0,
                    "candidates": self.candidates[k] if k < len(self.candidates) else None,
                }
            )
        return {
            "seq": self.seq.spec,
            "seed": self.seed,
            "trial_index": self.trial_index,
            "depth": self.depth,
            "indices": list(self.indices),
            "point": self.point,
            "arcs": arcs,
        }

    def to_json(self, meta: dict | None = None) -> str:
        return json_text(self.to_dict(), metadata(meta))


class SearchExhausted(RuntimeError):
    """The scan hit ``search_cap`` before finding the next level."""

    def __init__(self, message: str, partial: NestedCertificate | None):
        super().__init__(message)
        self.partial = partial


def _inside(c_in: float, len_in: float, c_out: float, len_out: float) -> bool:
    return torus_distance(c_in, c_out) + len_in / 2 <= len_out / 2


def _first_small_index(seq: LengthSequence, cap: int) -> tuple[int, int]:
    scanned = 0
    lo = 1
    limit = cap if seq.size is None else min(cap, seq.size)
    while lo <= limit:
        hi = min(limit, lo + _CHUNK - 1)
        n = np.arange(lo, hi + 1)
        ok = np.flatnonzero(seq.lengths(n) <= 1.0 / n)
        if ok.size:
            return int(n[ok[0]]), scanned + int(ok[0]) + 1
        scanned += hi - lo + 1
        lo = hi + 1
    return 0, scanned


def _next_level(seed, trial_index, seq, n_k, c_k, len_k, cap) -> tuple[int, int]:
    """First ``n > max(n_k, 8/len_k)`` with ``A(X_n, 1/n)`` inside ``A(c_k, len_k/2)``."""
    if len_k <= 0:
        return 0, 0
    start = max(n_k, math.floor(GAP_FACTOR / len_k)) + 1
    limit = start + cap - 1
    if seq.size is not None:
        limit = min(limit, seq.size)
    half_outer = len_k / 4
    lo = start
    while lo <= limit:
        hi = min(limit, lo + _CHUNK - 1)
        n = np.arange(lo, hi + 1, dtype=np.int64)
        x = sample_centers(seed, trial_index, n)
        d = np.abs(x - c_k)
        d = np.minimum(d, 1.0 - d)
        ok = np.flatnonzero(d + 0.5 / n <= half_outer)
        if ok.size:
            return int(n[ok[0]]), int(n[ok[0]]) - start + 1
        lo = hi + 1
    return 0, max(0, limit - start + 1)


def find_point(
    seed: int,
    trial_index: int,
    seq: LengthSequence,
    depth: int,
    search_cap: int = DEFAULT_SEARCH_CAP,
) -> NestedCertificate:
    """Build a depth-``depth`` nested certificate; raises :class:`SearchExhausted` on failure."""
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    n1, examined = _first_small_index(seq, search_cap)

    def cert(idx, cand):
        idx = tuple(idx)
        centers = tuple(float(v) for v in sample_centers(seed, trial_index, list(idx))) if idx else ()
        lengths = tuple(float(v) for v in seq.lengths(np.array(idx, dtype=np.int64))) if idx else ()
        return NestedCertificate(seed, trial_index, seq, idx, centers, lengths, tuple(cand))

    if n1 == 0:
        raise SearchExhausted(f"no index n <= {search_cap} with l_n <= 1/n", None)
    indices, candidates = [n1], [examined]
    center = float(sample_centers(seed, trial_index, [n1])[0])
    length = float(seq.lengths(np.array([n1]))[0])
    while len(indices) < depth:
        n_next, examined = _next_level(seed, trial_index, seq, indices[-1], center, length, search_cap)
        if n_next == 0:
            raise SearchExhausted(
                f"level {len(indices) + 1}: no qualifying arc within {examined} candidates",
                cert(indices, candidates),
            )
        indices.append(n_next)
        candidates.append(examined)
        center = float(sample_centers(seed, trial_index, [n_next])[0])
        length = float(seq.lengths(np.array([n_next]))[0])
    return cert(indices, candidates)


def verify_membership(point, seed: int, trial_index: int, seq: LengthSequence, horizon: int) -> int:
    """Number of ``n <= horizon`` with ``d(point, X_n) < l_n / 2``."""
    x0 = float(point)
    hits = 0
    lo = 1
    while lo <= horizon:
        hi = min(horizon, lo + _CHUNK - 1)
        n = np.arange(lo, hi + 1, dtype=np.int64)
        x = sample_centers(seed, trial_index, n)
        d = np.abs(x - x0)
        d = np.minimum(d, 1.0 - d)
        hits += int(np.count_nonzero((d < seq.lengths(n) / 2) | (d == 0.0)))
        lo = hi + 1
    return hits


def check_certificate(cert: NestedCertificate) -> list[str]:
    """Re-derive every certificate invariant from scratch; returns the list of failures."""
    problems = []
    n = list(cert.indices)
    if any(b <= a for a, b in zip(n, n[1:])):
        problems.append("indices are not strictly increasing")
    centers = [float(v) for v in sample_centers(cert.seed, cert.trial_index, n)]
    lengths = [float(v) for v in cert.seq.lengths(np.array(n, dtype=np.int64))]
    if centers != list(cert.centers) or lengths != list(cert.lengths):
        problems.append("stored centers or lengths do not replay")
    if lengths and not lengths[0] <= 1.0 / n[0]:
        problems.append("first index violates l_n <= 1/n")
    for k in range(len(n) - 1):
        if lengths[k] <= 0 or not n[k + 1] > max(n[k], GAP_FACTOR / lengths[k]):
            problems.append(f"gap condition fails at level {k + 1}")
        if not _inside(centers[k + 1], 1.0 / n[k + 1], centers[k], lengths[k] / 2):
            problems.append(f"A(X_n, 1/n) not inside I_{k + 1} at level {k + 2}")
        if not _inside(centers[k + 1], lengths[k + 1] / 2, centers[k], lengths[k] / 2):
            problems.append(f"I_{k + 2} not nested in I_{k + 1}")
    p = cert.point
    for k in range(len(n)):
        d = torus_distance(p, centers[k])
        if not (d <= lengths[k] / 4 or d == 0.0):
            problems.append(f"point outside closure of I_{k + 1}")
        if not (d < lengths[k] / 2 or d == 0.0):
            problems.append(f"point outside A(X_n, l_n) at level {k + 1}")
    return problems
