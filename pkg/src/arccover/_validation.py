"""Input coercion shared by the estimators and the CLI."""
from __future__ import annotations

import numbers

from .circle import Arc
from .sequences import GaugeFunction, LengthSequence, parse_gauge, parse_sequence


def check_sequence(seq) -> LengthSequence:
    if isinstance(seq, LengthSequence):
        return seq
    if isinstance(seq, str):
        return parse_sequence(seq)
    raise TypeError(f"expected a LengthSequence or a sequence spec string, got {type(seq).__name__}")


def check_gauge(g) -> GaugeFunction | None:
    if g is None or isinstance(g, GaugeFunction):
        return g
    if isinstance(g, str):
        return parse_gauge(g)
    raise TypeError(f"expected a GaugeFunction or a gauge spec string, got {type(g).__name__}")


def check_positive_int(x, name: str, minimum: int = 1) -> int:
    if isinstance(x, bool) or not isinstance(x, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {x!r}")
    if x < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {x}")
    return int(x)


def check_window(window) -> Arc | None:
    """Accepts ``None``, an :class:`Arc`, a ``(center, length)`` pair or ``"center,length"``."""
    if window is None or isinstance(window, Arc):
        return window
    if isinstance(window, str):
        parts = window.split(",")
        if len(parts) != 2:
            raise ValueError(f"window must look like 'center,length', got {window!r}")
        window = tuple(float(p) for p in parts)
    center, length = window
    return Arc(float(center), float(length))


def check_levels(levels) -> tuple[int, ...] | None:
    """Accepts ``None``, an iterable of ints, ``"lo:hi"`` (inclusive) or ``"a,b,c"``."""
    if levels is None:
        return None
    if isinstance(levels, str):
        if ":" in levels:
            lo, hi = (int(p) for p in levels.split(":"))
            levels = range(lo, hi + 1)
        else:
            levels = [int(p) for p in levels.split(",") if p]
    out = tuple(sorted({int(j) for j in levels}))
    if len(out) < 3:
        raise ValueError(f"need at least 3 levels, got {out}")
    return out
