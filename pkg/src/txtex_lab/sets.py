"""Decidable set shapes used as learning targets.

Every shape answers membership and yields its elements in increasing order.
Infinite shapes (open intervals, joins with the naturals) iterate forever;
callers bound consumption.  Staged shapes defer to a stage function and must
be resolved to a concrete finite set before a session uses them.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Callable, Iterator

from .codec import pair, unpair


class SetSpec:
    """Base class; subclasses are immutable values."""

    def contains(self, x: int) -> bool:
        raise NotImplementedError

    def iter_increasing(self) -> Iterator[int]:
        raise NotImplementedError

    def is_finite(self) -> bool:
        raise NotImplementedError

    def is_empty(self) -> bool:
        for _ in self.iter_increasing():
            return False
        return True

    def min_element(self) -> int:
        for x in self.iter_increasing():
            return x
        raise ValueError("empty set has no minimum")

    def elements_up_to(self, bound: int) -> list[int]:
        out = []
        for x in self.iter_increasing():
            if x > bound:
                break
            out.append(x)
        return out

    def as_finite_set(self) -> frozenset[int]:
        if not self.is_finite():
            raise ValueError("set is not finite")
        return frozenset(self.iter_increasing())


@dataclass(frozen=True)
class FiniteSet(SetSpec):
    elements: frozenset[int]

    def __init__(self, elements):
        object.__setattr__(self, "elements", frozenset(elements))

    def contains(self, x: int) -> bool:
        return x in self.elements

    def iter_increasing(self) -> Iterator[int]:
        return iter(sorted(self.elements))

    def is_finite(self) -> bool:
        return True


@dataclass(frozen=True)
class Interval(SetSpec):
    """[lo, hi], or [lo, infinity) when hi is None."""

    lo: int
    hi: int | None = None

    def contains(self, x: int) -> bool:
        if x < self.lo:
            return False
        return self.hi is None or x <= self.hi

    def iter_increasing(self) -> Iterator[int]:
        if self.hi is None:
            return itertools.count(self.lo)
        return iter(range(self.lo, self.hi + 1))

    def is_finite(self) -> bool:
        return self.hi is not None


@dataclass(frozen=True)
class ColumnBlock(SetSpec):
    """Interval [lo, hi] packed onto one column: {pair(a, column) : lo <= a <= hi}."""

    lo: int
    hi: int
    column: int

    def contains(self, x: int) -> bool:
        a, c = unpair(x)
        return c == self.column and self.lo <= a <= self.hi

    def iter_increasing(self) -> Iterator[int]:
        # pair(a, column) is increasing in a
        return (pair(a, self.column) for a in range(self.lo, self.hi + 1))

    def is_finite(self) -> bool:
        return True


@dataclass(frozen=True)
class Join(SetSpec):
    """Recursion-theoretic join: evens from the left part, odds from the right."""

    left: SetSpec
    right: SetSpec

    def contains(self, x: int) -> bool:
        if x % 2 == 0:
            return self.left.contains(x // 2)
        return self.right.contains((x - 1) // 2)

    def iter_increasing(self) -> Iterator[int]:
        evens = (2 * a for a in self.left.iter_increasing())
        odds = (2 * b + 1 for b in self.right.iter_increasing())
        return heapq.merge(evens, odds)

    def is_finite(self) -> bool:
        return self.left.is_finite() and self.right.is_finite()


@dataclass(frozen=True)
class Union(SetSpec):
    parts: tuple[SetSpec, ...]

    def __init__(self, parts):
        object.__setattr__(self, "parts", tuple(parts))

    def contains(self, x: int) -> bool:
        return any(p.contains(x) for p in self.parts)

    def iter_increasing(self) -> Iterator[int]:
        merged = heapq.merge(*(p.iter_increasing() for p in self.parts))
        return (x for x, _ in itertools.groupby(merged))

    def is_finite(self) -> bool:
        return all(p.is_finite() for p in self.parts)


@dataclass(frozen=True)
class Staged(SetSpec):
    """A set revealed stage by stage; the stage function must be monotone."""

    stage_fn: Callable[[int], frozenset[int]]

    def at_stage(self, stage: int) -> FiniteSet:
        return FiniteSet(self.stage_fn(stage))

    def contains(self, x: int) -> bool:
        raise ValueError("staged set needs a stage; resolve with at_stage first")

    def iter_increasing(self) -> Iterator[int]:
        raise ValueError("staged set needs a stage; resolve with at_stage first")

    def is_finite(self) -> bool:
        return True


def resolve(spec: SetSpec, stage: int) -> SetSpec:
    """Replace a staged shape by its finite snapshot at ``stage``."""
    if isinstance(spec, Staged):
        return spec.at_stage(stage)
    return spec


def set_equal(a: SetSpec, b: SetSpec, bound: int) -> bool:
    """Pointwise equality of two non-staged shapes on [0, bound]."""
    return all(a.contains(x) == b.contains(x) for x in range(bound + 1))


def is_subset(a: SetSpec, b: SetSpec, bound: int) -> bool:
    """Whether a is contained in b on [0, bound]."""
    return all(b.contains(x) for x in range(bound + 1) if a.contains(x))
