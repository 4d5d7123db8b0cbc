"""Reference learners and teachers.

Learner objects are stateless factories of generator programs, so one
instance can serve any number of sessions; teachers carry per-session state
and are handed around as zero-argument factories.  Pair constructors return
``(learner, teacher_factory)``.
"""

from __future__ import annotations

from collections import deque
from typing import Callable

from .adversary import trap_interval
from .codec import canonical_encode, encode_tuple, pair, poly_eval, unpair
from .descriptor import new_recognizer, recognizer_step
from .families import CsdTable, PcsFFamily
from .registry import LearnerRegistry
from .session import Emit, GenLearner, Learner, Query, Read, Skip, Teacher, Work


# ---------------------------------------------------------------------------
# exponential query search


def exp_search_plan(a: int):
    """Locate the unknown right endpoint n of [0, n] by base-a probing.

    Yields probe values, receives membership booleans, returns n.  Keeps a
    confirmed lower bound L, steps it by the largest a**k that stays inside,
    and stops as soon as L+1 falls outside.
    """
    if a < 2:
        raise ValueError("base must be >= 2")
    lower = 0
    while True:
        if not (yield lower + 1):
            return lower
        k = 0
        while (yield lower + a ** (k + 1)):
            k += 1
        lower += a**k


def exp_query_search(member: Callable[[int], bool], a: int = 2) -> int:
    """Run the search against a membership callable; returns the endpoint."""
    plan = exp_search_plan(a)
    try:
        probe = next(plan)
        while True:
            probe = plan.send(member(probe))
    except StopIteration as stop:
        return stop.value


def exp_search_query_bound(n: int, a: int) -> int:
    """(m+1)**(a+1) with m the least exponent satisfying n < a**m."""
    m = 0
    while a**m <= n:
        m += 1
    return (m + 1) ** (a + 1)


def query_plan(plan, encode: Callable[[int], int] = lambda v: v):
    """Adapt a probe-value plan into oracle Query actions (for learner programs)."""
    try:
        probe = next(plan)
        while True:
            answer = yield Query(encode(probe))
            probe = plan.send(answer)
    except StopIteration as stop:
        return stop.value


# ---------------------------------------------------------------------------
# interval learners


def make_up_interval_learner() -> Learner:
    """Scan 0, 1, 2, ... until the first member; that is the index."""

    def program():
        x = 0
        while not (yield Query(x)):
            x += 1
        yield Emit(x)

    return GenLearner("up-interval-scan", program)


def make_pair_interval_learner() -> Learner:
    """Find the left endpoint by scan, the right by doubling plus bisection."""

    def program():
        lo = 0
        while not (yield Query(lo)):
            lo += 1
        if not (yield Query(lo + 1)):
            yield Emit(pair(lo, lo))
            return
        j = 1
        while (yield Query(lo + 2**j)):
            j += 1
        inside, outside = lo + 2 ** (j - 1), lo + 2**j
        while outside - inside > 1:
            mid = (inside + outside) // 2
            if (yield Query(mid)):
                inside = mid
            else:
                outside = mid
        yield Emit(pair(lo, inside))

    return GenLearner("pair-interval-search", program)


def make_interval_oracle_learners(kind: str) -> Learner:
    if kind == "up-intervals":
        return make_up_interval_learner()
    if kind == "pair-intervals":
        return make_pair_interval_learner()
    raise ValueError(f"no interval learner for kind {kind!r}")


# ---------------------------------------------------------------------------
# distinct-forwarding teacher and the tuple pair


class DistinctTeacher(Teacher):
    """Forwards the first occurrence of every element, drops repeats."""

    name = "distinct-filter"

    def __init__(self):
        self.seen: set[int] = set()

    def on_input(self, datum: int) -> list[int]:
        if datum in self.seen:
            return []
        self.seen.add(datum)
        return [datum]


def make_tuple_teacher_pair(k: int) -> tuple[Learner, Callable[[], Teacher]]:
    """Collect k+1 distinct values in arrival order and emit their tuple code."""

    def program():
        values = []
        while len(values) < k + 1:
            values.append((yield Read()))
        yield Emit(encode_tuple(values))

    return GenLearner(f"tuple-collector({k})", program), DistinctTeacher


# ---------------------------------------------------------------------------
# descriptor-based pair: recognizing teacher, occurrence-counting learner


class DescriptorTeacher(Teacher):
    """Waits for a full descriptor, then leads with its minimum element.

    After completion the teacher emits one item per input: first the
    descriptor's minimum repeated described-number times, then the remaining
    elements in decreasing order.  A target describing 0 gets no emissions at
    all, and a corrupt stream halts emission permanently.
    """

    name = "descriptor-recognizer"

    def __init__(self, column: int = 0):
        self.state = new_recognizer(column)
        self.plan: deque[int] | None = None
        self.halted = False

    def on_input(self, datum: int) -> list[int]:
        was_complete = self.state.complete
        self.state, result = recognizer_step(self.state, datum)
        if result.status == "corrupt":
            self.halted = True
            return []
        if self.halted:
            return []
        if not was_complete and result.status == "complete":
            described = result.value
            elements = sorted(self.state.seen)
            lead = elements[0]
            schedule: list[int] = []
            if described >= 1:
                schedule.extend([lead] * described)
                schedule.extend(sorted(set(elements) - {lead}, reverse=True))
            self.plan = deque(schedule)
            return []
        if self.plan:
            return [self.plan.popleft()]
        return []


def _count_core(transform: Callable[[int], int]):
    """Emit transform(occurrences of the first element seen) after each item."""
    yield Emit(transform(0))
    first = None
    count = 0
    while True:
        item = yield Read()
        if first is None:
            first = item
        if item == first:
            count += 1
        yield Emit(transform(count))


def make_msd_pair(column: int = 0) -> tuple[Learner, Callable[[], Teacher]]:
    def program():
        yield from _count_core(lambda c: c)

    return GenLearner("lead-count", program), lambda: DescriptorTeacher(column)


def make_pmc_msd_learner() -> Learner:
    """Run a recognizer over the raw text; one emission, zero mind changes."""

    def program():
        state = new_recognizer(0)
        while True:
            datum = yield Read()
            state, result = recognizer_step(state, datum)
            yield Work(1)
            if result.status == "complete":
                yield Emit(result.value)
                return

    return GenLearner("descriptor-wait", program, "one work unit per recognizer step")


# ---------------------------------------------------------------------------
# chain-column oracle learner


def _csd_core(table: CsdTable):
    """Find (top column, widest base element), invert through the table."""
    top = yield from query_plan(exp_search_plan(2), encode=lambda j: pair(0, j))
    t = 1
    while (yield Query(pair(t, top))):
        t += 1
    greatest = t - 1
    candidates = table.identify(top, greatest)
    if len(candidates) > 1 and top >= 1:
        # a chain top and a chain member can share both statistics; only the
        # chain top keeps column top-1 wide enough to reach `greatest`
        wide = yield Query(pair(greatest, top - 1))
        wanted = "top" if wide else "chain"
        candidates = [c for c in candidates if c[0] == wanted]
    if not candidates:
        return 0  # out of contract: not a chain-family member
    kind, i, j = candidates[0]
    if kind == "top":
        return table.index_of_top(i)
    return table.index_of_chain(i, j)


def make_csd_learner(table: CsdTable | None = None) -> Learner:
    table = table or CsdTable(1)

    def program():
        index = yield from _csd_core(table)
        yield Emit(index)

    return GenLearner("chain-column-oracle", program)


def make_merged_learner() -> Learner:
    """One probe for 0 picks the branch: chain logic doubled, or the
    descriptor count pair (simulated inline) doubled plus one."""

    def program():
        if (yield Query(0)):
            index = yield from _csd_core(CsdTable(3))
            yield Emit(2 * index)
            return
        teacher = DescriptorTeacher(0)
        buffer: deque[int] = deque()
        counting = _count_core(lambda c: 2 * c + 1)
        feed: object = None
        while True:
            try:
                action = counting.send(feed)
            except StopIteration:
                return
            feed = None
            if isinstance(action, Read):
                while not buffer:
                    datum = yield Read()
                    buffer.extend(teacher.on_input(datum))
                feed = buffer.popleft()
            else:
                yield action

    return GenLearner("merged-branch", program)


# ---------------------------------------------------------------------------
# basic catalog


def make_finite_psd_learner() -> Learner:
    def program():
        seen: set[int] = set()
        while True:
            seen.add((yield Read()))
            yield Emit(pair(len(seen), canonical_encode(seen)))

    return GenLearner("finite-size-mask", program)


def make_pow2_plain_learner() -> Learner:
    """Emit the largest k with [0, 2**k] fully observed."""

    def program():
        seen: set[int] = set()
        covered = -1
        while True:
            seen.add((yield Read()))
            while covered + 1 in seen:
                covered += 1
            yield Emit(covered.bit_length() - 1 if covered >= 1 else 0)

    return GenLearner("pow2-collector", program)


def make_pow2_oracle_learner() -> Learner:
    def program():
        endpoint = yield from query_plan(exp_search_plan(2))
        yield Emit(endpoint.bit_length() - 1 if endpoint >= 1 else 0)

    return GenLearner("pow2-endpoint-oracle", program)


class BracketRepeatTeacher(Teacher):
    """Repeats the first element once per power-of-two bracket the max enters."""

    name = "bracket-repeater"

    def __init__(self):
        self.first: int | None = None
        self.peak = 0
        self.emitted = 0

    def on_input(self, datum: int) -> list[int]:
        if self.first is None:
            self.first = datum
        self.peak = max(self.peak, datum)
        bracket = self.peak.bit_length() - 1 if self.peak >= 1 else 0
        out = []
        while self.emitted < bracket:
            out.append(self.first)
            self.emitted += 1
        return out


def make_pow2_teacher_pair() -> tuple[Learner, Callable[[], Teacher]]:
    def program():
        yield from _count_core(lambda c: c)

    return GenLearner("repeat-counter", program), BracketRepeatTeacher


def make_pow2_pmc_learner() -> Learner:
    """Emit ceil(log2(max)) after every datum."""

    def program():
        peak = 0
        while True:
            peak = max(peak, (yield Read()))
            yield Emit((peak - 1).bit_length() if peak >= 1 else 0)

    return GenLearner("pow2-threshold", program)


def make_join_evens_learner() -> Learner:
    """For singleton-join targets: the unique even element names the index."""

    def program():
        while True:
            datum = yield Read()
            if datum % 2 == 0:
                yield Emit(datum // 2)
                return

    return GenLearner("even-spotter", program)


def make_basic_agents() -> dict:
    return {
        "finite_psd_learner": make_finite_psd_learner(),
        "pow2_plain_learner": make_pow2_plain_learner(),
        "pow2_oracle_learner": make_pow2_oracle_learner(),
        "pow2_teacher_pair": make_pow2_teacher_pair(),
        "pow2_pmc_learner": make_pow2_pmc_learner(),
        "pmc_msd_learner": make_pmc_msd_learner(),
        "join_evens_learner": make_join_evens_learner(),
    }


# ---------------------------------------------------------------------------
# conversions between teacher-dataset and mind-change learning


def convert_psdT_to_pmc(learner: Learner, teacher_factory: Callable[[], Teacher]) -> Learner:
    """Simulate the pair internally; re-emit only when the teacher extends."""

    def program():
        teacher = teacher_factory()
        inner = learner.program()
        buffer: deque[int] = deque()
        inner_done = False
        blocked_read = False
        blocked_skip = False
        pending: object = None
        latest: int | None = None
        emitted: int | None = None
        while True:
            while not inner_done and not blocked_read and not blocked_skip:
                try:
                    action = inner.send(pending)
                except StopIteration:
                    inner_done = True
                    break
                pending = None
                if isinstance(action, Read):
                    if buffer:
                        pending = buffer.popleft()
                    else:
                        blocked_read = True
                elif isinstance(action, Skip):
                    if buffer:
                        buffer.popleft()
                    else:
                        blocked_skip = True
                elif isinstance(action, Query):
                    answer = yield action
                    buffer.extend(teacher.on_query_response(action.x, answer))
                    pending = answer
                elif isinstance(action, Emit):
                    latest = action.hypothesis
                elif isinstance(action, Work):
                    yield action
            if latest is not None and latest != emitted:
                yield Emit(latest)
                emitted = latest
            if inner_done:
                return
            datum = yield Read()
            buffer.extend(teacher.on_input(datum))
            if buffer:
                if blocked_read:
                    pending = buffer.popleft()
                    blocked_read = False
                elif blocked_skip:
                    buffer.popleft()
                    blocked_skip = False

    return GenLearner(f"extension-gated({learner.name})", program)


class CountEncodingTeacher(Teacher):
    """Simulates a mind-change learner and encodes its hypotheses as counts.

    On each hypothesis change to h, pads its cumulative output with copies of
    one anchor element (the least seen when emission began) up to the least
    count whose pair decoding has second coordinate h.  The learner on the
    other side just decodes its running item count.
    """

    name = "count-encoder"

    def __init__(self, learner: Learner):
        self.inner = learner.program()
        self.inner_done = False
        self.awaiting: str | None = None
        self.pending: object = None
        self.count = 0
        self.anchor: int | None = None
        self.min_seen: int | None = None
        self.last_hypothesis: int | None = None

    def _pump(self, datum: int) -> list[int]:
        changes: list[int] = []
        fuel = datum
        while not self.inner_done:
            if self.awaiting is not None:
                if fuel is None:
                    break
                self.pending = fuel if self.awaiting == "read" else None
                fuel = None
                self.awaiting = None
            try:
                action = self.inner.send(self.pending)
            except StopIteration:
                self.inner_done = True
                break
            self.pending = None
            if isinstance(action, Read):
                self.awaiting = "read"
            elif isinstance(action, Skip):
                self.awaiting = "skip"
            elif isinstance(action, Emit):
                if action.hypothesis != self.last_hypothesis:
                    self.last_hypothesis = action.hypothesis
                    changes.append(action.hypothesis)
            elif isinstance(action, Work):
                pass
            else:
                raise ValueError("count encoding needs a query-free learner")
        return changes

    def on_input(self, datum: int) -> list[int]:
        self.min_seen = datum if self.min_seen is None else min(self.min_seen, datum)
        out: list[int] = []
        for hypothesis in self._pump(datum):
            if self.anchor is None:
                self.anchor = self.min_seen
            target = self.count
            j = 0
            while True:
                code = pair(j, hypothesis)
                if code > self.count:
                    target = code
                    break
                j += 1
            out.extend([self.anchor] * (target - self.count))
            self.count = target
        return out


def make_count_decoder_learner() -> Learner:
    def program():
        count = 0
        while True:
            yield Read()
            count += 1
            yield Emit(unpair(count)[1])

    return GenLearner("count-decoder", program)


def convert_pmc_to_psdT(learner: Learner) -> tuple[Learner, Callable[[], Teacher]]:
    return make_count_decoder_learner(), lambda: CountEncodingTeacher(learner)


# ---------------------------------------------------------------------------
# characteristic-sample agents


def make_pcsG_oracle_learner() -> Learner:
    """Query max+1 after each datum: inside means the unbounded member."""

    def program():
        peak: int | None = None
        while True:
            datum = yield Read()
            peak = datum if peak is None else max(peak, datum)
            if (yield Query(peak + 1)):
                yield Emit(0)
            else:
                yield Emit(peak)

    return GenLearner("segment-prober", program)


def left_endpoint_bracket(x: int) -> int | None:
    """k when x == 2**(2k+1) + 1, else None."""
    base = x - 1
    if base < 2 or base & (base - 1):
        return None
    e = base.bit_length() - 1
    if e % 2 == 0:
        return None
    return (e - 1) // 2


class TrapTeacher(Teacher):
    """Signals the trap interval's identity with at most three emissions."""

    name = "trap-teacher"

    def __init__(self, family: PcsFFamily):
        self.family = family
        self.k: int | None = None
        self.distinct: set[int] = set()
        self.threshold: int | None = None
        self.second: int | None = None
        self.second_seen = False
        self.second_emitted = False
        self.extra: int | None = None

    def on_input(self, datum: int) -> list[int]:
        out: list[int] = []
        self.distinct.add(datum)
        if self.k is None:
            k = left_endpoint_bracket(datum)
            if k is None:
                return []
            self.k = k
            trap = self.family.trap_sets(k)
            pk = poly_eval(self.family.p_code, 2 * k + 1)
            self.threshold = 2 * pk + 1
            self.second = datum + 1
            excluded = set(trap.decoys) | {datum}
            for x in trap_interval(k).iter_increasing():
                if x not in excluded:
                    self.extra = x
                    break
            out.append(datum)
            return out
        if datum == self.second:
            self.second_seen = True
        if (
            len(self.distinct) > self.threshold
            and self.second_seen
            and not self.second_emitted
        ):
            out.append(self.second)
            self.second_emitted = True
        if datum == self.extra:
            out.append(datum)
            self.extra = None  # emit once
        return out


def make_pcsF_agents(family: PcsFFamily) -> dict:
    """Teacher pair and mind-change learner for the trap family."""
    for k, trap in family.traps.items():
        if not trap.resolved:
            raise ValueError(f"trap search for k={k} is unresolved; agents refuse construction")

    def pair_program():
        first = yield Read()
        k = left_endpoint_bracket(first)
        if k is None:
            return
        yield Emit(2 * k + 1)
        while True:
            yield Read()
            yield Emit(2 * k)

    pair_learner = GenLearner("trap-item-counter", pair_program)

    def pmc_program():
        seen: set[int] = set()
        k: int | None = None
        allowed: set[int] = set()
        while True:
            datum = yield Read()
            seen.add(datum)
            if k is None:
                maybe = left_endpoint_bracket(datum)
                if maybe is not None and maybe in family.traps:
                    k = maybe
                    allowed = set(family.trap_sets(k).decoys) | {datum}
            if k is None:
                yield Emit(0)
            elif seen <= allowed:
                yield Emit(2 * k + 1)
            else:
                yield Emit(2 * k)

    pmc_learner = GenLearner("trap-membership-watch", pmc_program)
    return {
        "teacher_pair": (pair_learner, lambda: TrapTeacher(family)),
        "pmc_learner": pmc_learner,
    }


def make_thm64_pcs_learner() -> Learner:
    """Least even and greatest odd decide between the two join shapes."""

    def program():
        evens: set[int] = set()
        odds: set[int] = set()
        while True:
            datum = yield Read()
            (evens if datum % 2 == 0 else odds).add(datum)
            if not evens or not odds:
                yield Emit(0)
                continue
            n = min(evens) // 2
            m = (max(odds) - 1) // 2
            if m == 2**n:
                yield Emit(2 * n)
            else:
                yield Emit(2 * (m + 2**n) + 1)

    return GenLearner("join-shape-split", program)


def make_halting_psd_learner() -> Learner:
    """Initial guess 6; a lone even 2i means 2i+1, any odd means the tower."""

    def program():
        yield Emit(6)
        distinct: set[int] = set()
        while True:
            datum = yield Read()
            distinct.add(datum)
            odds = [x for x in distinct if x % 2 == 1]
            if odds:
                i = odds[0] // 2
                yield Emit(2 ** (2**i))
            elif len(distinct) == 1:
                yield Emit(next(iter(distinct)) + 1)
            else:
                yield Emit(6)

    return GenLearner("pair-or-tower", program)


# ---------------------------------------------------------------------------
# scripted toys and the default registry


def make_constant_learner(value: int) -> Learner:
    def program():
        yield Emit(value)

    return GenLearner(f"constant-{value}", program)


def make_trap_parity_learner(offset: int) -> Learner:
    """Reads interval elements and emits 2k+offset for their bracket k."""

    def program():
        while True:
            datum = yield Read()
            k = 0
            while 2 ** (2 * k + 2) < datum:
                k += 1
            yield Emit(2 * k + offset)

    return GenLearner(f"trap-parity-{offset}", program)


def build_default_registry() -> LearnerRegistry:
    registry = LearnerRegistry()
    registry.register(0, "constant-zero", lambda: make_constant_learner(0), "single emission")
    registry.register(
        1, "trap-even-guesser", lambda: make_trap_parity_learner(0), "one emit per read"
    )
    registry.register(
        2, "trap-odd-guesser", lambda: make_trap_parity_learner(1), "one emit per read"
    )
    registry.register(
        3, "chain-column-oracle", make_csd_learner, "queries per column/element probe"
    )
    registry.register(
        4, "pow2-endpoint-oracle", make_pow2_oracle_learner, "queries per endpoint probe"
    )
    registry.register(5, "up-interval-scan", make_up_interval_learner, "one query per candidate")
    return registry
