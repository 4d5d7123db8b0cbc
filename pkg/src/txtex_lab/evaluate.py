"""Verdicts: did a transcript meet its resource criterion, and sample checks.

The three per-session criteria measure, at the convergence point, computation
ticks (PRT), distinct data consumed (PSD) or total mind changes (PMC) against
a polynomial in the target's minimal index; oracle use is bounded by the same
polynomial in every case, counting positive and negative answers alike.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .codec import poly_eval
from .session import Learner, MembershipOracle, SessionTranscript, run_on_sequence
from .sets import set_equal

CRITERIA = ("PRT", "PSD", "PMC")

EXHAUSTIVE_ARRANGEMENT_LIMIT = 100_000
SAMPLED_ARRANGEMENTS = 10_000


@dataclass(frozen=True)
class Verdict:
    passed: bool
    reason: str = "ok"
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed


def hypothesis_correct(family, hypothesis: int, target_index: int) -> bool:
    """Whether the emitted index codes the same set as the target index."""
    try:
        hypothesis_set = family.member(hypothesis)
    except Exception:
        return False
    bound = family.separation_bound([hypothesis, target_index])
    return set_equal(hypothesis_set, family.member(target_index), bound)


def evaluate_run(
    transcript: SessionTranscript,
    family,
    target_index: int,
    poly: int,
    criterion: str,
) -> Verdict:
    """Judge one converged transcript against a criterion and polynomial."""
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion}")
    if not transcript.converged:
        return Verdict(False, "non-converged", {"end_reason": transcript.end_reason})
    hypothesis = transcript.final_hypothesis
    try:
        family.member(hypothesis)
    except Exception:
        return Verdict(False, "bad-hypothesis", {"hypothesis": hypothesis})
    if not hypothesis_correct(family, hypothesis, target_index):
        return Verdict(False, "wrong-hypothesis", {"hypothesis": hypothesis})

    minimal = family.min_index(target_index)
    bound = poly_eval(poly, minimal)
    at = transcript.convergence
    details = {
        "min_index": minimal,
        "bound": bound,
        "ticks_at_convergence": at.ticks,
        "distinct_at_convergence": at.distinct_data,
        "queries_at_convergence": at.oracle_queries,
        "mind_changes": transcript.ledger.mind_changes,
    }
    if at.oracle_queries > bound:
        return Verdict(False, "query-bound-exceeded", details)
    if criterion == "PRT":
        if at.ticks >= bound:
            return Verdict(False, "tick-bound-exceeded", details)
    elif criterion == "PSD":
        if at.distinct_data >= bound:
            return Verdict(False, "dataset-bound-exceeded", details)
    elif criterion == "PMC":
        if transcript.ledger.mind_changes > bound:
            return Verdict(False, "mind-change-bound-exceeded", details)
    return Verdict(True, "ok", details)


def _arrangement_count(alphabet_size: int, max_len: int) -> int:
    total = 0
    for length in range(1, max_len + 1):
        total += alphabet_size**length
        if total > EXHAUSTIVE_ARRANGEMENT_LIMIT:
            return total
    return total


def _sampled_sequences(
    universe: list[int], sample: list[int], max_len: int, seed: int, count: int
):
    """Seeded sequences biased to cover the sample set."""
    rng = random.Random(seed)
    for _ in range(count):
        length = rng.randint(1, max_len)
        seq = [rng.choice(universe) for _ in range(length)]
        if rng.random() < 0.5 and sample:
            # splice the sample in so the covering condition is exercised
            positions = list(range(len(seq)))
            rng.shuffle(positions)
            for x, pos in zip(sample, itertools.cycle(positions)):
                seq[pos % len(seq)] = x
        yield seq


def check_characteristic_sample(
    make_learner: Callable[[], Learner],
    family,
    target_index: int,
    sample: Sequence[int],
    poly: int,
    *,
    max_text_len: int,
    max_universe: int,
    use_oracle: bool = True,
    seed: int = 0,
) -> Verdict:
    """Verify a candidate characteristic sample over bounded texts.

    Enumerates every sequence of length <= max_text_len over target elements
    <= max_universe (exhaustively when that space is small, seeded-sampled
    otherwise); on every sequence whose content covers ``sample`` the learner
    must output one fixed correct index of the target.
    """
    target = family.member(target_index)
    sample = sorted(set(sample))
    for x in sample:
        if not target.contains(x):
            return Verdict(False, "sample-outside-target", {"element": x})
    minimal = family.min_index(target_index)
    size_bound = poly_eval(poly, minimal)
    if len(sample) >= size_bound:
        return Verdict(False, "sample-too-large", {"size": len(sample), "bound": size_bound})

    universe = target.elements_up_to(max_universe)
    if not universe:
        return Verdict(False, "empty-universe", {})
    count = _arrangement_count(len(universe), max_text_len)
    exhaustive = count <= EXHAUSTIVE_ARRANGEMENT_LIMIT
    if exhaustive:
        sequences = itertools.chain.from_iterable(
            itertools.product(universe, repeat=length)
            for length in range(1, max_text_len + 1)
        )
    else:
        sequences = _sampled_sequences(universe, sample, max_text_len, seed, SAMPLED_ARRANGEMENTS)

    sample_set = set(sample)
    locked: int | None = None
    checked = 0
    for seq in sequences:
        if not sample_set <= set(seq):
            continue
        oracle = MembershipOracle(target) if use_oracle else None
        run = run_on_sequence(make_learner(), list(seq), oracle=oracle)
        checked += 1
        output = run.last_hypothesis
        if output is None:
            return Verdict(False, "no-output", {"prefix": list(seq)})
        if locked is None:
            locked = output
        elif output != locked:
            return Verdict(
                False,
                "output-not-fixed",
                {"prefix": list(seq), "output": output, "expected": locked},
            )
    if locked is None:
        return Verdict(False, "no-covering-prefix", {"exhaustive": exhaustive})
    if not hypothesis_correct(family, locked, target_index):
        return Verdict(False, "locked-output-incorrect", {"output": locked})
    return Verdict(
        True,
        "ok",
        {
            "locked_output": locked,
            "covering_prefixes_checked": checked,
            "exhaustive": exhaustive,
            "sample_size": len(sample),
        },
    )
