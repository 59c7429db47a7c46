"""Arc-length sequences and gauge functions, with their text syntax.

Sequences are written ``"<family> key=value ..."``, for instance
``"powerlaw a=1 alpha=2"`` or ``"explicit 0.5,0.25,0.125"``; gauges likewise,
e.g. ``"monomial s=0.5"`` (an optional leading word ``gauge`` is accepted).
Every object has a ``spec`` property that parses back to an equal object.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "LengthSequence",
    "PowerLaw",
    "Harmonic",
    "PowerLog",
    "Geometric",
    "Explicit",
    "GaugeFunction",
    "Monomial",
    "MonomialLog",
    "Identity",
    "Table",
    "eval_length",
    "parse_sequence",
    "parse_gauge",
]


def _fmt(x: float) -> str:
    return repr(float(x))


class LengthSequence:
    """Base class: a nonincreasing positive sequence tending to 0, indexed from 1."""

    closed_form = True
    size: int | None = None

    def lengths(self, n) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, n: int) -> float:
        return eval_length(self, n)

    def with_param(self, name: str, value: float) -> "LengthSequence":
        params = dict(self._params())
        if name not in params:
            raise ValueError(f"{type(self).__name__} has no parameter {name!r}")
        params[name] = value
        return type(self)(**params)

    def _params(self) -> dict:
        raise NotImplementedError

    @property
    def spec(self) -> str:
        body = " ".join(f"{k}={_fmt(v)}" for k, v in self._params().items())
        return f"{self.family} {body}".strip()


@dataclass(frozen=True)
class PowerLaw(LengthSequence):
    """``a * n**-alpha`` with ``alpha > 1``."""

    a: float = 1.0
    alpha: float = 2.0
    family = "powerlaw"

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"powerlaw requires a > 0, got a={self.a}")
        if not self.alpha > 1:
            raise ValueError(f"powerlaw requires alpha > 1, got alpha={self.alpha}")

    def lengths(self, n):
        n = np.asarray(n, dtype=np.float64)
        return self.a * n ** -self.alpha

    def _params(self):
        return {"a": self.a, "alpha": self.alpha}


@dataclass(frozen=True)
class Harmonic(LengthSequence):
    """``c / n``."""

    c: float = 1.0
    family = "harmonic"

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"harmonic requires c > 0, got c={self.c}")

    def lengths(self, n):
        return self.c / np.asarray(n, dtype=np.float64)

    def _params(self):
        return {"c": self.c}


@dataclass(frozen=True)
class PowerLog(LengthSequence):
    """``a * n**-alpha * log(n + e)**-beta`` with ``alpha >= 1``."""

    a: float = 1.0
    alpha: float = 1.0
    beta: float = 0.0
    family = "powerlog"

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"powerlog requires a > 0, got a={self.a}")
        if not self.alpha >= 1:
            raise ValueError(f"powerlog requires alpha >= 1, got alpha={self.alpha}")
        # d/dn log l_n = -alpha/n - beta/((n+e) log(n+e)) must stay <= 0
        if self.beta < 0:
            n = np.arange(1.0, 1e4)
            worst = float(np.max(n / ((n + math.e) * np.log(n + math.e))))
            if -self.beta * worst > self.alpha:
                raise ValueError(
                    f"powerlog with beta={self.beta} is not nonincreasing; need -beta <= {self.alpha / worst:.4g}"
                )

    def lengths(self, n):
        n = np.asarray(n, dtype=np.float64)
        return self.a * n ** -self.alpha * np.log(n + math.e) ** -self.beta

    def _params(self):
        return {"a": self.a, "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class Geometric(LengthSequence):
    """``q**n`` with ``0 < q < 1``; underflows to 0 past n ~ 1074/log2(1/q)."""

    q: float = 0.5
    family = "geometric"

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise ValueError(f"geometric requires 0 < q < 1, got q={self.q}")

    def lengths(self, n):
        n = np.asarray(n, dtype=np.float64)
        return np.exp(n * math.log(self.q))

    def _params(self):
        return {"q": self.q}


@dataclass(frozen=True)
class Explicit(LengthSequence):
    values: tuple = field(default=())
    family = "explicit"
    closed_form = False

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("explicit sequence needs at least one value")
        if any(not v > 0 for v in vals):
            raise ValueError("explicit sequence values must be positive")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "_array", np.array(vals))

    @property
    def size(self):
        return len(self.values)

    def lengths(self, n):
        n = np.asarray(n, dtype=np.int64)
        if n.size and (n.min() < 1 or n.max() > len(self.values)):
            raise IndexError(f"explicit sequence has {len(self.values)} terms, index out of range")
        return self._array[n - 1]

    def is_nonincreasing(self) -> bool:
        return bool(np.all(np.diff(self._array) <= 0))

    def with_param(self, name, value):
        raise ValueError("explicit sequences have no scalar parameters")

    @property
    def spec(self):
        return "explicit " + ",".join(_fmt(v) for v in self.values)


def eval_length(seq: LengthSequence, n: int) -> float:
    if n < 1:
        raise ValueError(f"sequence index must be >= 1, got {n}")
    return float(seq.lengths(np.array([n]))[0])


# -- gauges -----------------------------------------------------------------


class GaugeFunction:
    """Base class for gauges ``g`` with ``g(0) = 0``."""

    closed_form = True

    def __call__(self, r):
        r = np.asarray(r, dtype=np.float64)
        out = np.zeros_like(r)
        pos = r > 0
        out[pos] = self._eval(r[pos])
        return out if out.ndim else float(out)

    def _eval(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def exponent(self) -> float:
        """Power ``s`` of the leading ``r**s`` factor (closed forms only)."""
        raise NotImplementedError

    @property
    def log_power(self) -> float:
        """``beta`` in the ``log(1/r)**-beta`` correction (closed forms only)."""
        return 0.0


@dataclass(frozen=True)
class Monomial(GaugeFunction):
    s: float = 1.0

    def __post_init__(self):
        if not 0 < self.s <= 1:
            raise ValueError(f"monomial gauge requires 0 < s <= 1, got s={self.s}")

    def _eval(self, r):
        return r ** self.s

    @property
    def exponent(self):
        return self.s

    @property
    def spec(self):
        return f"monomial s={_fmt(self.s)}"


class Identity(Monomial):
    def __init__(self):
        super().__init__(1.0)

    def __repr__(self):
        return "Identity()"

    @property
    def spec(self):
        return "identity"


@dataclass(frozen=True)
class MonomialLog(GaugeFunction):
    """``r**s * log(1/r)**-beta``.  ``s = 1`` is only a gauge when ``beta <= 0``."""

    s: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if not 0 < self.s <= 1:
            raise ValueError(f"monomiallog gauge requires 0 < s <= 1, got s={self.s}")

    def _eval(self, r):
        with np.errstate(divide="ignore", invalid="ignore"):
            return r ** self.s * np.log(1.0 / r) ** -self.beta

    @property
    def exponent(self):
        return self.s

    @property
    def log_power(self):
        return self.beta

    @property
    def spec(self):
        return f"monomiallog s={_fmt(self.s)} beta={_fmt(self.beta)}"


@dataclass(frozen=True)
class Table(GaugeFunction):
    """Sampled gauge, interpolated linearly in log-log coordinates.

    Defined on ``[min r, max r]`` of the samples (and at 0); evaluating
    elsewhere raises ``ValueError``.
    """

    points: tuple = ()
    closed_form = False

    def __post_init__(self):
        pts = tuple((float(r), float(g)) for r, g in self.points)
        if len(pts) < 2:
            raise ValueError("table gauge needs at least two samples")
        if any(r <= 0 or g <= 0 for r, g in pts):
            raise ValueError("table gauge samples must be positive")
        rs = [r for r, _ in pts]
        if any(b <= a for a, b in zip(rs, rs[1:])):
            raise ValueError("table gauge radii must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @property
    def domain(self) -> tuple[float, float]:
        return self.points[0][0], self.points[-1][0]

    def _eval(self, r):
        lo, hi = self.domain
        if r.size and (r.min() < lo or r.max() > hi):
            raise ValueError(f"table gauge is only defined on [{lo}, {hi}]")
        lr = np.log([p[0] for p in self.points])
        lg = np.log([p[1] for p in self.points])
        return np.exp(np.interp(np.log(r), lr, lg))

    @property
    def spec(self):
        return "table " + ",".join(f"{_fmt(r)}:{_fmt(g)}" for r, g in self.points)


# -- parsing ----------------------------------------------------------------

_SEQUENCES = {"powerlaw": PowerLaw, "harmonic": Harmonic, "powerlog": PowerLog, "geometric": Geometric}


def _kv(tokens: list[str], allowed: tuple[str, ...], family: str) -> dict:
    out = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep or key not in allowed:
            raise ValueError(f"{family}: expected one of {', '.join(k + '=' for k in allowed)} got {tok!r}")
        try:
            out[key] = float(val)
        except ValueError:
            raise ValueError(f"{family}: {key} must be a number, got {val!r}") from None
    return out


def _number_list(text: str) -> list[str]:
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    return [t for t in text.replace("\n", ",").replace(" ", ",").split(",") if t]


def parse_sequence(text: str) -> LengthSequence:
    tokens = text.split()
    if not tokens:
        raise ValueError("empty sequence specification")
    family, rest = tokens[0].lower(), tokens[1:]
    if family == "explicit":
        body = " ".join(rest)
        if body.startswith("values="):
            body = body[len("values="):]
        vals = _number_list(body)
        try:
            return Explicit(tuple(float(v) for v in vals))
        except ValueError as exc:
            raise ValueError(f"explicit: {exc}") from None
    if family not in _SEQUENCES:
        raise ValueError(f"unknown sequence family {family!r}; expected powerlaw, harmonic, powerlog, geometric or explicit")
    cls = _SEQUENCES[family]
    allowed = tuple(cls.__dataclass_fields__)
    return cls(**_kv(rest, allowed, family))


def parse_gauge(text: str) -> GaugeFunction:
    tokens = text.split()
    if tokens and tokens[0].lower() == "gauge":
        tokens = tokens[1:]
    if not tokens:
        raise ValueError("empty gauge specification")
    family, rest = tokens[0].lower(), tokens[1:]
    if family in ("identity", "id"):
        if rest:
            raise ValueError("identity gauge takes no parameters")
        return Identity()
    if family == "monomial":
        return Monomial(**_kv(rest, ("s",), family))
    if family == "monomiallog":
        return MonomialLog(**_kv(rest, ("s", "beta"), family))
    if family == "table":
        pairs = []
        for item in _number_list(" ".join(rest)):
            r, sep, g = item.partition(":")
            if not sep:
                raise ValueError(f"table: expected r:g pairs, got {item!r}")
            pairs.append((float(r), float(g)))
        return Table(tuple(pairs))
    raise ValueError(f"unknown gauge family {family!r}; expected monomial, monomiallog, identity or table")
