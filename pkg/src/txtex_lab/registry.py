"""Closed-world learner registry.

Diagonalizing family constructions take the very learner they defeat as a
parameter; the registry gives each attackable learner a stable numeric id and
a documented cost declaration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .session import Learner


@dataclass(frozen=True)
class RegisteredLearner:
    learner_id: int
    name: str
    factory: Callable[[], Learner]
    cost_note: str = ""


class LearnerRegistry:
    def __init__(self):
        self._table: dict[int, RegisteredLearner] = {}

    def register(
        self, learner_id: int, name: str, factory: Callable[[], Learner], cost_note: str = ""
    ) -> None:
        if learner_id in self._table:
            raise ValueError(f"learner id {learner_id} already registered")
        self._table[learner_id] = RegisteredLearner(learner_id, name, factory, cost_note)

    def get(self, learner_id: int) -> RegisteredLearner:
        if learner_id not in self._table:
            raise LookupError(f"no learner registered under id {learner_id}")
        return self._table[learner_id]

    def make(self, learner_id: int) -> Learner:
        return self.get(learner_id).factory()

    def ids(self) -> list[int]:
        return sorted(self._table)

    def entries(self) -> list[RegisteredLearner]:
        return [self._table[i] for i in self.ids()]
