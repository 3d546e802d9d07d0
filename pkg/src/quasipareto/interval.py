"""Closed bounded intervals and the lower-upper (LU) order relations.

Intervals hold plain numbers, so ``fractions.Fraction`` endpoints stay exact
through every operation here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

# Default strictness margin for strict comparisons; x < y is tested as x < y - margin.
STRICTNESS_MARGIN = 0.0


class IntervalError(ValueError):
    pass


class LU(enum.Enum):
    LEQ = "leq"
    LT = "lt"
    LTS = "lts"


class VecLU(enum.Enum):
    PRECEQ = "preceq"
    PRECS = "precs"


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (_finite(self.lo) and _finite(self.hi)):
            raise IntervalError(f"non-finite interval [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise IntervalError(f"interval order violated: lo={self.lo} > hi={self.hi}")

    @classmethod
    def point(cls, a) -> Interval:
        return cls(a, a)

    @classmethod
    def from_pair(cls, pair: Sequence) -> Interval:
        if len(pair) != 2:
            raise IntervalError(f"expected [lo, hi], got {pair!r}")
        return cls(pair[0], pair[1])

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def to_list(self) -> list:
        return [self.lo, self.hi]

    def __add__(self, other: Interval) -> Interval:
        return iv_add(self, other)

    def __sub__(self, other: Interval) -> Interval:
        return iv_sub(self, other)

    def __rmul__(self, k) -> Interval:
        return iv_scale(k, self)

    def __neg__(self) -> Interval:
        return iv_scale(-1, self)

    def __repr__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


def _finite(v) -> bool:
    try:
        return math.isfinite(v)
    except TypeError:
        return False


def iv_add(a: Interval, b: Interval) -> Interval:
    return Interval(a.lo + b.lo, a.hi + b.hi)


def iv_sub(a: Interval, b: Interval) -> Interval:
    return Interval(a.lo - b.hi, a.hi - b.lo)


def iv_scale(k, a: Interval) -> Interval:
    if not _finite(k):
        raise IntervalError(f"non-finite scale factor {k}")
    if k >= 0:
        return Interval(k * a.lo, k * a.hi)
    return Interval(k * a.hi, k * a.lo)


def _lt(x, y, margin) -> bool:
    return x < y - margin if margin else x < y


def lu_compare(a: Interval, b: Interval, mode: LU, margin: float | None = None) -> bool:
    """Decide ``a <=_LU b``, ``a <_LU b`` or ``a <^s_LU b``.

    ``margin`` guards only the strict comparisons and defaults to
    :data:`STRICTNESS_MARGIN`.
    """
    if margin is None:
        margin = STRICTNESS_MARGIN
    leq = a.lo <= b.lo and a.hi <= b.hi
    if mode is LU.LEQ:
        return leq
    if mode is LU.LT:
        return leq and (_lt(a.lo, b.lo, margin) or _lt(a.hi, b.hi, margin))
    if mode is LU.LTS:
        return _lt(a.lo, b.lo, margin) and _lt(a.hi, b.hi, margin)
    raise ValueError(f"unknown LU mode {mode!r}")


@dataclass(frozen=True)
class IntervalVector:
    components: tuple[Interval, ...]

    def __init__(self, components: Iterable[Interval]):
        comps = tuple(components)
        if not comps:
            raise IntervalError("interval vector must have at least one component")
        for c in comps:
            if not isinstance(c, Interval):
                raise TypeError(f"expected Interval, got {type(c).__name__}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence]) -> IntervalVector:
        return cls(Interval.from_pair(p) for p in pairs)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.components)

    def __getitem__(self, i) -> Interval:
        return self.components[i]

    @property
    def lower(self) -> tuple:
        return tuple(c.lo for c in self.components)

    @property
    def upper(self) -> tuple:
        return tuple(c.hi for c in self.components)

    def to_list(self) -> list:
        return [c.to_list() for c in self.components]

    def __repr__(self) -> str:
        return "(" + ", ".join(repr(c) for c in self.components) + ")"


def vec_relation(x: IntervalVector, y: IntervalVector, mode: VecLU,
                 margin: float | None = None) -> bool:
    """Vector LU relations: ``PRECEQ`` (all <=_LU, one <_LU) or ``PRECS`` (all <^s_LU)."""
    if len(x) != len(y):
        raise IntervalError(f"length mismatch: {len(x)} vs {len(y)}")
    if mode is VecLU.PRECEQ:
        return (all(lu_compare(a, b, LU.LEQ, margin) for a, b in zip(x, y))
                and any(lu_compare(a, b, LU.LT, margin) for a, b in zip(x, y)))
    if mode is VecLU.PRECS:
        return all(lu_compare(a, b, LU.LTS, margin) for a, b in zip(x, y))
    raise ValueError(f"unknown vector mode {mode!r}")
