"""Lower-bound constructions: query-ceiling measurement, trap sets, forcing.

Everything here is explicitly budgeted and reports whether a search was
exhaustive or sampled; verdicts are reproducible from the same seed and
budgets.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

from .codec import encode_tuple, poly_eval
from .registry import LearnerRegistry
from .session import (
    ActionBudgetExceeded,
    Budget,
    FnOracle,
    Learner,
    MembershipOracle,
    compose_pair,
    run_on_sequence,
    run_session,
)
from .sets import Interval, set_equal
from .text import Text, make_text


def marker_element(j: int = 0, column: int = 0) -> int:
    """The j-th marker code: encode_tuple([2j, 1, 1, column])."""
    return encode_tuple([2 * j, 1, 1, column])


def marker_stream(ell: int, variant: str = "single") -> tuple[list[int], frozenset[int]]:
    """Marker-only input of length parameter ``ell`` plus its content set.

    single: the base marker repeated ell times, oracle set = that marker.
    multi:  markers 0..ell once each, oracle set = all of them.
    """
    if variant == "single":
        m = marker_element(0)
        return [m] * ell, frozenset({m})
    if variant == "multi":
        items = [marker_element(j) for j in range(ell + 1)]
        return items, frozenset(items)
    raise ValueError(f"unknown marker variant {variant}")


def compute_q(
    registry: LearnerRegistry,
    m_id: int,
    ell: int,
    variant: str = "single",
    *,
    max_actions: int = 200_000,
) -> int:
    """Greatest value the learner queries on any prefix of the marker stream.

    The learner runs against the marker-set oracle; since it is deterministic,
    one run over the full stream visits the states of every prefix.  Returns 0
    when it never queries.  A learner that blows the action budget is
    ineligible (the error propagates).
    """
    stream, content = marker_stream(ell, variant)
    oracle = FnOracle(lambda x: x in content)
    try:
        run = run_on_sequence(registry.make(m_id), stream, oracle=oracle, max_actions=max_actions)
    except ActionBudgetExceeded as exc:
        exc.partial_ceiling = max((x for x, _ in exc.partial.queries), default=0)
        raise
    return max((x for x, _ in run.queries), default=0)


# ---------------------------------------------------------------------------
# repeated-prefix texts


def repeat_prefix_texts(
    family, index_a: int, index_b: int, x: int, p_code: int
) -> tuple[Text, Text]:
    """Texts of two overlapping members sharing the prefix x^(p(a)+p(b)).

    Any deterministic learner emits the same hypothesis at the end of the
    shared prefix on both texts, so that hypothesis is wrong for at least one
    of the two targets.
    """
    set_a = family.member(index_a)
    set_b = family.member(index_b)
    if not (set_a.contains(x) and set_b.contains(x)):
        raise ValueError(f"{x} is not common to both targets")
    bound = family.separation_bound([index_a, index_b])
    if set_equal(set_a, set_b, bound):
        raise ValueError("targets must be distinct sets")
    a = family.min_index(index_a)
    b = family.min_index(index_b)
    reps = poly_eval(p_code, a) + poly_eval(p_code, b)
    prefix = [x] * reps
    return (
        make_text("prefixed", set_a, prefix=prefix),
        make_text("prefixed", set_b, prefix=prefix),
    )


# ---------------------------------------------------------------------------
# mind-change forcing along a chain


@dataclass
class ChainForceResult:
    status: str  # forced | failure-witness | inconclusive
    prefix: list[int]
    forced_mind_changes: int = 0
    witness_index: int | None = None
    details: dict = field(default_factory=dict)


def _emission_changes(emissions: list[int]) -> int:
    return sum(1 for a, b in zip(emissions, emissions[1:]) if a != b)


def chain_force(
    learner: Learner,
    teacher_factory,
    chain: list[int],
    family,
    *,
    max_ext_len: int = 3,
    max_candidates: int = 20_000,
    max_universe: int = 4096,
    max_actions: int = 100_000,
) -> ChainForceResult:
    """Grow one prefix on which a data-driven pair endorses each chain member.

    ``chain`` lists family indices of strictly increasing sets.  For each
    member in turn, extensions over that member's elements are searched in
    deterministic order until the pair's output codes the member; if the
    search space is exhausted the member is returned as a failure witness,
    and if the candidate budget runs out first the verdict is inconclusive.
    """
    if teacher_factory is not None:
        agent: Learner = compose_pair(lambda: learner, teacher_factory)
    else:
        agent = learner
    sigma: list[int] = []
    checked = 0
    for position, index in enumerate(chain):
        member = family.member(index)
        alphabet = member.elements_up_to(max_universe)
        found = False
        budget_hit = False
        for length in range(1, max_ext_len + 1):
            for ext in itertools.product(alphabet, repeat=length):
                checked += 1
                if checked > max_candidates:
                    budget_hit = True
                    break
                candidate = sigma + list(ext)
                run = run_on_sequence(agent, candidate, max_actions=max_actions)
                output = run.last_hypothesis
                if output is None:
                    continue
                try:
                    hypothesis_set = family.member(output)
                except Exception:
                    continue
                bound = family.separation_bound([index, output])
                if set_equal(hypothesis_set, member, bound):
                    sigma = candidate
                    found = True
                    break
            if found or budget_hit:
                break
        if not found:
            status = "inconclusive" if budget_hit else "failure-witness"
            return ChainForceResult(
                status=status,
                prefix=sigma,
                witness_index=index,
                details={"chain_position": position, "candidates_checked": checked},
            )
    replay = run_on_sequence(agent, sigma, max_actions=max_actions)
    return ChainForceResult(
        status="forced",
        prefix=sigma,
        forced_mind_changes=_emission_changes(replay.emissions),
        details={"candidates_checked": checked, "emissions": replay.emissions},
    )


# ---------------------------------------------------------------------------
# defeat of oracle learners on marker-trapped descriptor families


@dataclass
class DefeatReport:
    learner_name: str
    index_pair: tuple[int, int]
    prefix_length: int
    query_ceiling: int
    transcripts_identical: bool
    shared_hypothesis: int | None
    wrong_for: list[int]
    events_compared: int


def _event_prefix_within(transcript, element_limit: int):
    """Events up to (and excluding) consumption of element number limit+1."""
    consumed = 0
    out = []
    for event in transcript.events:
        if event.kind in ("read", "skip"):
            consumed += 1
            if consumed > element_limit:
                break
        out.append(event)
    return out


def msd_defeat(registry: LearnerRegistry, m_id: int, p_code: int, *, horizon_slack: int = 64):
    """Run a registered oracle learner against its own trap family.

    Both targeted members agree with the marker set everywhere the learner
    can query while reading only markers, so on marker-prefixed texts the two
    transcripts coincide through the whole prefix and the hypothesis held
    there is wrong for at least one target.
    """
    from .families import make_msd  # deferred: families builds on this module

    family = make_msd(registry, m_id, p_code, variant="single")
    n0 = encode_tuple([m_id, p_code, 0])
    n1 = encode_tuple([m_id, p_code, 1])
    ell = poly_eval(p_code, n1)
    prefix = [marker_element(0)] * ell

    transcripts = []
    for index in (n0, n1):
        target = family.member(index)
        text = make_text("prefixed", target, prefix=prefix)
        budget = Budget(
            max_ticks=10 * (ell + horizon_slack) + 10_000,
            horizon=ell + horizon_slack,
            window=1,
        )
        transcripts.append(
            run_session(registry.make(m_id), text, oracle=MembershipOracle(target), budget=budget)
        )

    prefix_events = [_event_prefix_within(t, ell) for t in transcripts]
    identical = prefix_events[0] == prefix_events[1]

    shared_hypothesis = None
    for event in prefix_events[0]:
        if event.kind == "emit":
            shared_hypothesis = event.payload[0]
    wrong_for = []
    for index in (n0, n1):
        if shared_hypothesis is None:
            wrong_for.append(index)
            continue
        try:
            hyp_set = family.member(shared_hypothesis)
        except Exception:
            wrong_for.append(index)
            continue
        bound = family.separation_bound([index, shared_hypothesis])
        if not set_equal(hyp_set, family.member(index), bound):
            wrong_for.append(index)

    report = DefeatReport(
        learner_name=registry.get(m_id).name,
        index_pair=(n0, n1),
        prefix_length=ell,
        query_ceiling=family.query_ceiling,
        transcripts_identical=identical,
        shared_hypothesis=shared_hypothesis,
        wrong_for=wrong_for,
        events_compared=min(len(prefix_events[0]), len(prefix_events[1])),
    )
    return report, transcripts


# ---------------------------------------------------------------------------
# trap sets for the characteristic-sample separation


@dataclass
class TrapSets:
    trap_core: frozenset[int]  # E: covered by an adversarial prefix
    decoys: frozenset[int]  # D: core plus the learner's first queried members
    resolved: bool
    stats: dict = field(default_factory=dict)

    @property
    def core_nonempty(self) -> bool:
        return bool(self.trap_core)


def trap_interval(k: int) -> Interval:
    return Interval(2 ** (2 * k + 1) + 1, 2 ** (2 * k + 2))


def search_trap_sets(
    registry: LearnerRegistry,
    m_id: int,
    p_code: int,
    k: int,
    *,
    max_candidates: int = 2_000,
    arrangement_limit: int = 100_000,
    sample_size: int = 10_000,
    seed: int = 0,
    max_actions: int = 50_000,
) -> TrapSets:
    """Find a core set the learner mistakes for the whole interval.

    A candidate core E (left endpoint forced in, size p(2k+1)+1) passes when
    the learner, with the interval's own oracle, answers the even index after
    consuming any covering arrangement; a covering arrangement of length at
    most p(2k+1)+1 over distinct interval elements is exactly a permutation
    of E.  Decoys D extend E with the first p(2k+1) interval members the
    learner queries while reading E in increasing order, padded with the
    least unused interval elements.
    """
    interval = trap_interval(k)
    elements = list(interval.iter_increasing())
    lo = elements[0]
    pk = poly_eval(p_code, 2 * k + 1)
    core_size = pk + 1
    decoy_size = 2 * pk + 1

    rng = random.Random(seed)
    stats = {
        "k": k,
        "interval": [interval.lo, interval.hi],
        "poly_at_odd_index": pk,
        "candidates_checked": 0,
        "exhaustive_arrangements": True,
    }

    perm_count = math.factorial(core_size)
    exhaustive = perm_count <= arrangement_limit
    stats["exhaustive_arrangements"] = exhaustive
    stats["arrangements_per_candidate"] = perm_count if exhaustive else sample_size

    def candidate_passes(core: tuple[int, ...]) -> bool:
        if exhaustive:
            arrangements = itertools.permutations(core)
        else:
            arrangements = (rng.sample(core, len(core)) for _ in range(sample_size))
        oracle_set = interval
        for arrangement in arrangements:
            run = run_on_sequence(
                registry.make(m_id),
                list(arrangement),
                oracle=MembershipOracle(oracle_set),
                max_actions=max_actions,
            )
            if run.last_hypothesis != 2 * k:
                return False
        return True

    rest = [x for x in elements if x != lo]
    found: tuple[int, ...] | None = None
    budget_hit = False
    for combo in itertools.combinations(rest, core_size - 1):
        stats["candidates_checked"] += 1
        if stats["candidates_checked"] > max_candidates:
            budget_hit = True
            break
        core = (lo,) + combo
        if candidate_passes(core):
            found = core
            break

    if found is None:
        if budget_hit:
            return TrapSets(frozenset(), frozenset(), resolved=False, stats=stats)
        return TrapSets(frozenset(), frozenset(), resolved=True, stats=stats)

    # decoys: core plus first pk interval members queried on the increasing core
    run = run_on_sequence(
        registry.make(m_id),
        sorted(found),
        oracle=MembershipOracle(interval),
        max_actions=max_actions,
    )
    queried_members: list[int] = []
    for x, _answer in run.queries:
        if interval.contains(x) and x not in queried_members:
            queried_members.append(x)
        if len(queried_members) == pk:
            break
    decoys = set(found) | set(queried_members)
    for x in elements:
        if len(decoys) >= decoy_size:
            break
        decoys.add(x)
    if len(decoys) != decoy_size:
        stats["decoy_padding_failed"] = True
        return TrapSets(frozenset(found), frozenset(), resolved=False, stats=stats)
    return TrapSets(frozenset(found), frozenset(decoys), resolved=True, stats=stats)


def alpha_prefix(k: int) -> list[int]:
    """The odd numbers 1, 3, ..., 2k+1; a prefix consistent with every join member."""
    return [2 * i + 1 for i in range(k + 1)]


def make_chain_chaser(family, chain: list[int], initial: int = 0) -> Learner:
    """Scripted data-driven learner that endorses the least consistent chain member.

    Emits ``initial`` before any data, then after each datum the first chain
    index whose member contains everything seen so far.  Against a strict
    chain this is exactly the mind-change ladder the forcing search exploits.
    """
    from .session import Emit, GenLearner, Read

    members = [(index, family.member(index)) for index in chain]

    def program():
        yield Emit(initial)
        seen: set[int] = set()
        while True:
            seen.add((yield Read()))
            for index, member in members:
                if all(member.contains(x) for x in seen):
                    yield Emit(index)
                    break

    return GenLearner("chain-chaser", program)
