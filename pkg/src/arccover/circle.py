"""Points, arcs and finite unions of arcs on the circle R/Z.

Finite unions are stored as sorted, disjoint, non-touching half-open
intervals ``[a, b)`` inside ``[0, 1]``.  An arc crossing the origin is kept as
two pieces, one ending at 1 and one starting at 0.  All set operations work on
numpy arrays so that unions of 10^6 arcs stay cheap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "CirclePoint",
    "Arc",
    "ArcSet",
    "wrap",
    "torus_distance",
    "make_arc",
    "arcset_union",
    "arcset_complement",
    "arcset_intersection",
    "arcset_measure",
    "arcset_contains",
    "arc_contains_arc",
    "union_of_arcs",
]


def wrap(x: float) -> float:
    """Reduce a real number to ``[0, 1)``."""
    y = x - math.floor(x)
    # x - floor(x) rounds up to 1.0 for tiny negative x
    return 0.0 if y >= 1.0 else y


@dataclass(frozen=True)
class CirclePoint:
    position: float

    def __post_init__(self):
        object.__setattr__(self, "position", wrap(float(self.position)))

    def __float__(self):
        return self.position


@dataclass(frozen=True)
class Arc:
    """Open arc ``{y : d(y, center) < length / 2}``; ``length >= 1`` is the whole circle."""

    center: CirclePoint
    length: float

    def __post_init__(self):
        if not isinstance(self.center, CirclePoint):
            object.__setattr__(self, "center", CirclePoint(self.center))
        length = float(self.length)
        if not length > 0:
            raise ValueError(f"arc length must be positive, got {length!r}")
        object.__setattr__(self, "length", min(length, 1.0))

    @property
    def is_full(self) -> bool:
        return self.length >= 1.0

    def to_arcset(self) -> "ArcSet":
        return make_arc(self.center, self.length)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True).reshape(-1)
    a.flags.writeable = False
    return a


class ArcSet:
    """Normalized finite union of half-open intervals of ``[0, 1)``.

    Instances are immutable.  Use :meth:`from_intervals` to build one from
    arbitrary (possibly overlapping) intervals; the plain constructor trusts
    its input to be normalized already.
    """

    __slots__ = ("starts", "ends")

    def __init__(self, starts=(), ends=()):
        self.starts = _frozen(starts)
        self.ends = _frozen(ends)
        if self.starts.shape != self.ends.shape:
            raise ValueError("starts and ends must have the same length")

    @classmethod
    def empty(cls) -> "ArcSet":
        return cls()

    @classmethod
    def full(cls) -> "ArcSet":
        return cls([0.0], [1.0])

    @classmethod
    def from_intervals(cls, intervals: Iterable[Sequence[float]]) -> "ArcSet":
        pairs = [(float(a), float(b)) for a, b in intervals]
        for a, b in pairs:
            if not (0.0 <= a <= b <= 1.0):
                raise ValueError(f"interval [{a}, {b}) is not inside [0, 1]")
        if not pairs:
            return cls()
        s, e = zip(*pairs)
        return _merge(np.asarray(s), np.asarray(e))

    @property
    def intervals(self) -> list[tuple[float, float]]:
        return list(zip(self.starts.tolist(), self.ends.tolist()))

    @property
    def is_empty(self) -> bool:
        return self.starts.size == 0

    @property
    def is_full(self) -> bool:
        return bool(self.starts.size == 1 and self.starts[0] == 0.0 and self.ends[0] == 1.0)

    def measure(self) -> float:
        return arcset_measure(self)

    def complement(self) -> "ArcSet":
        return arcset_complement(self)

    def __or__(self, other: "ArcSet") -> "ArcSet":
        return arcset_union(self, other)

    def __and__(self, other: "ArcSet") -> "ArcSet":
        return arcset_intersection(self, other)

    def __invert__(self) -> "ArcSet":
        return arcset_complement(self)

    def __contains__(self, p) -> bool:
        return arcset_contains(self, p)

    def __len__(self):
        return int(self.starts.size)

    def __eq__(self, other):
        if not isinstance(other, ArcSet):
            return NotImplemented
        return np.array_equal(self.starts, other.starts) and np.array_equal(self.ends, other.ends)

    def __hash__(self):
        return hash((self.starts.tobytes(), self.ends.tobytes()))

    def __repr__(self):
        if len(self) > 6:
            return f"ArcSet(<{len(self)} intervals>, measure={self.measure():.6g})"
        return f"ArcSet({self.intervals!r})"


def _merge(starts: np.ndarray, ends: np.ndarray, presorted: bool = False) -> ArcSet:
    """Union of intervals ``[starts[i], ends[i])``; touching pieces are merged."""
    keep = ends > starts
    starts, ends = starts[keep], ends[keep]
    if starts.size == 0:
        return ArcSet()
    if not presorted:
        order = np.argsort(starts, kind="stable")
        starts, ends = starts[order], ends[order]
    reach = np.maximum.accumulate(ends)
    head = np.empty(starts.size, dtype=bool)
    head[0] = True
    head[1:] = starts[1:] > reach[:-1]
    first = np.flatnonzero(head)
    last = np.append(first[1:] - 1, starts.size - 1)
    return ArcSet(starts[first], reach[last])


def _as_position(p) -> float:
    if isinstance(p, CirclePoint):
        return p.position
    return wrap(float(p))


def torus_distance(x, y) -> float:
    """Quotient distance on R/Z, in ``[0, 1/2]``."""
    d = abs(_as_position(x) - _as_position(y))
    return min(d, 1.0 - d)


def arc_pieces(centers, lengths) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split arcs into half-open pieces of ``[0, 1]``.

    Returns ``(starts, ends, owner)`` where ``owner[k]`` is the index of the arc
    that produced piece ``k``.  Arcs with length ``>= 1`` become ``[0, 1)``;
    zero lengths (underflowed sequences) produce no piece.
    """
    c = np.asarray(centers, dtype=np.float64).reshape(-1)
    l = np.asarray(lengths, dtype=np.float64).reshape(-1)
    if c.shape != l.shape:
        raise ValueError("centers and lengths must have the same shape")
    idx = np.arange(c.size)
    half = 0.5 * l
    a = c - half
    b = c + half
    full = l >= 1.0
    a[full] = 0.0
    b[full] = 1.0
    low = (a < 0.0) & ~full
    high = (b > 1.0) & ~full
    main_s = np.where(low, 0.0, a)
    main_e = np.where(high, 1.0, b)
    starts = np.concatenate([main_s, a[low] + 1.0, np.zeros(int(high.sum()))])
    ends = np.concatenate([main_e, np.ones(int(low.sum())), b[high] - 1.0])
    owner = np.concatenate([idx, idx[low], idx[high]])
    keep = ends > starts
    return starts[keep], ends[keep], owner[keep]


def make_arc(center, length: float) -> ArcSet:
    """The open arc of the given center and length, as an :class:`ArcSet`."""
    length = float(length)
    if not length > 0:
        raise ValueError(f"arc length must be positive, got {length!r}")
    s, e, _ = arc_pieces([_as_position(center)], [length])
    return _merge(s, e)


def union_of_arcs(centers, lengths) -> ArcSet:
    """Union of many arcs at once (one sort)."""
    s, e, _ = arc_pieces(centers, lengths)
    return _merge(s, e)


def arcset_union(s: ArcSet, t: ArcSet) -> ArcSet:
    if s.is_empty:
        return t
    if t.is_empty:
        return s
    return _merge(np.concatenate([s.starts, t.starts]), np.concatenate([s.ends, t.ends]))


def arcset_complement(s: ArcSet) -> ArcSet:
    if s.is_empty:
        return ArcSet.full()
    starts = np.concatenate([[0.0], s.ends])
    ends = np.concatenate([s.starts, [1.0]])
    keep = ends > starts
    return ArcSet(starts[keep], ends[keep])


def arcset_intersection(s: ArcSet, t: ArcSet) -> ArcSet:
    # De Morgan keeps everything in terms of exact merges
    return arcset_complement(arcset_union(arcset_complement(s), arcset_complement(t)))


def arcset_measure(s: ArcSet) -> float:
    return float(np.sum(s.ends - s.starts))


def arcset_contains(s: ArcSet, p) -> bool:
    x = _as_position(p)
    i = int(np.searchsorted(s.starts, x, side="right")) - 1
    return i >= 0 and x < s.ends[i]


def arc_contains_arc(outer: Arc, inner: Arc) -> bool:
    """Whether ``inner`` lies inside ``outer`` (both treated as open arcs)."""
    if outer.is_full:
        return True
    if inner.is_full:
        return False
    d = torus_distance(inner.center, outer.center)
    return d + inner.length / 2 <= outer.length / 2
