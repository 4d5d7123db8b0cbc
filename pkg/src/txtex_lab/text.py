"""Deterministic enumerations (texts) of nonempty target sets.

A text lists every target element at least once, repetitions allowed.  Each
generator kind is fully determined by its parameters, so replaying a session
reproduces the same stream.  Finite targets are padded with their minimum
element once exhausted.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

from .sets import SetSpec, Staged

SHUFFLE_BLOCK = 16


@dataclass(frozen=True)
class Text:
    kind: str
    target: SetSpec
    prefix: tuple[int, ...] = ()
    seed: int = 0
    pad_element: int | None = None
    pad_count: int = 0

    def stream(self) -> Iterator[int]:
        """A fresh iterator over the text; identical on every call."""
        if self.kind == "canonical":
            return _pad_tail(self.target)
        if self.kind == "seeded":
            return _seeded_stream(self.target, self.seed)
        if self.kind == "prefixed":
            return itertools.chain(self.prefix, _pad_tail(self.target))
        if self.kind == "repeat-pad":
            lead = itertools.repeat(self.pad_element, self.pad_count)
            return itertools.chain(lead, _pad_tail(self.target))
        raise ValueError(f"unknown text kind: {self.kind}")

    def take(self, count: int) -> list[int]:
        return list(itertools.islice(self.stream(), count))


def _pad_tail(target: SetSpec) -> Iterator[int]:
    """Increasing enumeration; finite targets then repeat their minimum forever."""
    first = target.min_element()
    yield from target.iter_increasing()
    while True:
        yield first


def _seeded_stream(target: SetSpec, seed: int) -> Iterator[int]:
    """A seeded permutation schedule: block-shuffled increasing enumeration.

    Every element still appears (each block is a shuffle of a slice of the
    increasing enumeration), so the result is a valid text for infinite and
    finite targets alike.
    """
    rng = random.Random(seed)
    source = target.iter_increasing()
    while True:
        block = list(itertools.islice(source, SHUFFLE_BLOCK))
        if not block:
            break
        rng.shuffle(block)
        yield from block
    pad = target.min_element()
    while True:
        yield pad


def make_text(
    kind: str,
    target: SetSpec,
    *,
    prefix: Sequence[int] = (),
    seed: int = 0,
    pad_element: int | None = None,
    pad_count: int = 0,
) -> Text:
    """Build a text of ``target``; rejects empty targets and foreign prefixes."""
    if isinstance(target, Staged):
        raise ValueError("resolve staged targets before building a text")
    if target.is_empty():
        raise ValueError("cannot build a text of the empty set")
    if kind == "prefixed":
        for x in prefix:
            if not target.contains(x):
                raise ValueError(f"prefix element {x} is outside the target")
    if kind == "repeat-pad":
        if pad_element is None or not target.contains(pad_element):
            raise ValueError("repeat-pad element must belong to the target")
    if kind not in ("canonical", "seeded", "prefixed", "repeat-pad"):
        raise ValueError(f"unknown text kind: {kind}")
    return Text(
        kind=kind,
        target=target,
        prefix=tuple(prefix),
        seed=seed,
        pad_element=pad_element,
        pad_count=pad_count,
    )
