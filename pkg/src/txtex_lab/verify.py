"""Executable invariant suites, one per module, runnable from the CLI.

Each check returns (name, passed, cases, note); a suite passes when every
check does.  The heavy sweeps double as the acceptance evidence and are also
driven from the test suite.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from . import adversary, agents, families
from .codec import (
    canonical_decode,
    canonical_encode,
    decode_tuple,
    encode_tuple,
    poly_encode,
    poly_eval,
    signed_int,
    signed_int_inv,
)
from .descriptor import build_descriptor, described_number, new_recognizer, recognizer_step, validate_descriptor
from .evaluate import evaluate_run
from .session import Budget, MembershipOracle, compose_pair, run_session
from .sets import is_subset, resolve, set_equal
from .text import make_text


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    cases: int
    note: str = ""


def _check(name, passed, cases, note=""):
    return CheckResult(name, bool(passed), cases, note)


# ---------------------------------------------------------------------------


def verify_codec() -> list[CheckResult]:
    out = []
    cases = 0
    good = True
    for n in range(100_000):
        for k in (1, 2, 3, 4):
            xs = decode_tuple(n, k)
            cases += 1
            if encode_tuple(xs) != n or max(xs) > n:
                good = False
                break
        if not good:
            break
    out.append(_check("tuple roundtrip with bounded coordinates", good, cases))

    good = all(signed_int(signed_int_inv(z)) == z for z in range(-10_000, 10_001))
    seen = {signed_int(n) for n in range(20_001)}
    out.append(_check("signed bijection", good and len(seen) == 20_001, 40_002))

    cases = 0
    good = True
    for degree in range(4):
        for coeffs in itertools.product(range(8), repeat=degree + 1):
            code = poly_encode(list(coeffs))
            for x in (0, 1, 3):
                cases += 1
                if poly_eval(code, x) != sum(c * x**j for j, c in enumerate(coeffs)):
                    good = False
    out.append(_check("polynomial evaluation vs direct sum", good, cases))

    rng = random.Random(0)
    cases = 0
    good = True
    for _ in range(2000):
        s = frozenset(rng.sample(range(21), rng.randint(0, 10)))
        cases += 1
        if canonical_decode(canonical_encode(s)) != s:
            good = False
    out.append(_check("canonical set codes roundtrip", good, cases))
    return out


def verify_descriptor() -> list[CheckResult]:
    out = []
    rng = random.Random(20240817)
    marker = adversary.marker_element(0)
    multi = {adversary.marker_element(j) for j in range(5)}
    built = validated = fired = prefix_safe = 0
    good = True
    for n in range(0, 201, 3):
        for floor in (0, 10_000):
            for markers in ({marker}, multi):
                d = build_descriptor(n, 0, floor, markers)
                built += 1
                if not validate_descriptor(d.elements, 0) or described_number(d.elements, 0) != n:
                    good = False
                    continue
                validated += 1
                elements = d.sorted_elements()
                if len(elements) <= 7:
                    perms = list(itertools.permutations(elements))
                else:
                    perms = [rng.sample(elements, len(elements)) for _ in range(100)]
                for perm in perms:
                    state = new_recognizer(0)
                    ok_perm = True
                    for pos, code in enumerate(perm):
                        state, res = recognizer_step(state, code)
                        complete = res.status == "complete"
                        if complete != (pos == len(perm) - 1):
                            ok_perm = False
                        if pos < len(perm) - 1 and complete:
                            prefix_safe -= 1
                    if not ok_perm or res.value != n:
                        good = False
                    fired += 1
    out.append(
        _check(
            "built descriptors validate, describe n, recognizer fires on last element",
            good,
            fired,
            f"{built} descriptors",
        )
    )
    return out


def verify_engine() -> list[CheckResult]:
    out = []
    family = families.make_basic_family("pow2")
    catalog = agents.make_basic_agents()

    text = make_text("seeded", family.member(4), seed=7)
    a = run_session(catalog["pow2_plain_learner"], text, budget=Budget(horizon=40, window=8))
    b = run_session(catalog["pow2_plain_learner"], text, budget=Budget(horizon=40, window=8))
    out.append(
        _check(
            "session replay is bit-identical",
            a.events == b.events and a.events_jsonl() == b.events_jsonl(),
            len(a.events),
        )
    )

    reads = sum(1 for e in a.events if e.kind == "read")
    stream = a.hypothesis_stream()
    changes = sum(1 for x, y in zip(stream, stream[1:]) if x != y)
    out.append(
        _check(
            "ledger soundness",
            a.ledger.distinct_data <= reads and changes == a.ledger.mind_changes,
            len(a.events),
        )
    )

    target = family.member(5)
    oracle = MembershipOracle(target)
    q = run_session(
        catalog["pow2_oracle_learner"],
        family.canonical_text(5),
        oracle=oracle,
        budget=Budget(horizon=80),
    )
    fidelity = all(
        e.payload[1] == target.contains(e.payload[0]) for e in q.events if e.kind == "query"
    )
    out.append(_check("oracle answers match exact membership", fidelity, oracle.queries))

    learner, teacher_factory = catalog["pow2_teacher_pair"]
    contract_cases = 0
    contract_good = True
    for n in (2, 4, 6):
        text = make_text("seeded", family.member(n), seed=n)
        tr = run_session(learner, text, teacher=teacher_factory(), budget=Budget(horizon=90, window=10))
        seen = set()
        for event in tr.events:
            if event.kind == "read":
                seen.add(event.payload[0])
            if event.kind == "teach":
                contract_cases += len(event.payload[1])
        if tr.end_reason == "contract-violation":
            contract_good = False
    out.append(_check("teacher emissions drawn from teacher input", contract_good, contract_cases))

    composed = compose_pair(lambda: learner, teacher_factory)
    equal = True
    cases = 0
    for n in (1, 3, 5):
        for seed in (0, 1):
            text = make_text("seeded", family.member(n), seed=seed)
            pair_run = run_session(
                learner, text, teacher=teacher_factory(), budget=Budget(horizon=70, window=10)
            )
            solo_run = run_session(composed, text, budget=Budget(horizon=70, window=10))
            cases += 1
            if solo_run.hypothesis_stream() != pair_run.hypothesis_stream():
                equal = False
    out.append(_check("composed pair reproduces the pair's hypothesis stream", equal, cases))
    return out


def verify_families() -> list[CheckResult]:
    out = []
    registry = agents.build_default_registry()
    p_lin = poly_encode([0, 1])

    cases = 0
    good = True
    basic_samples = {
        "up-intervals": range(0, 8),
        "pair-intervals": [0, 2, 5, 8, 33],
        "finite-canonical": [families.FiniteCanonical().index_of_set(s) for s in ({0}, {0, 2}, {1, 2, 3})],
        "pow2": range(0, 7),
        "join-singletons": range(0, 8),
        "pcs-G": range(0, 8),
    }
    for kind, sample in basic_samples.items():
        family = families.make_basic_family(kind)
        for n in sample:
            bound = family.separation_bound([n, family.min_index(n)])
            cases += 1
            if not set_equal(family.member(family.min_index(n)), family.member(n), bound):
                good = False
    tc = families.make_basic_family("tuple-contents", k=1)
    for n in range(0, 30):
        bound = tc.separation_bound([n, tc.min_index(n)])
        cases += 1
        if not set_equal(tc.member(tc.min_index(n)), tc.member(n), bound):
            good = False
    out.append(_check("member(min_index) equals member", good, cases))

    msd = families.make_msd(registry, 0, p_lin)
    good = all(
        described_number(msd.member(n).as_finite_set(), 0) == n for n in range(0, 101, 7)
    )
    sets = [msd.member(n).as_finite_set() for n in range(0, 40, 3)]
    good = good and len(set(sets)) == len(sets)
    out.append(_check("descriptor members describe their own index, pairwise distinct", good, 29))

    csd = families.make_csd()
    chain_cases = 0
    good = True
    for i in range(0, 9):
        width = csd.table.top(i)
        if width == 0:
            continue
        indices = csd.chain_indices(i)
        bound = csd.separation_bound(indices)
        for lower, upper in zip(indices, indices[1:]):
            chain_cases += 1
            inc = is_subset(csd.member(lower), csd.member(upper), bound)
            strict = not set_equal(csd.member(lower), csd.member(upper), bound)
            if not (inc and strict):
                good = False
    out.append(_check("chain inclusions strict below each chain top", good, chain_cases))

    trap_family = families.make_pcs_f(registry, 1, poly_encode([0]), max_k=2)
    trap = trap_family.trap_sets(1)
    interval = adversary.trap_interval(1)
    good = (
        trap.resolved
        and trap.trap_core <= trap.decoys
        and all(interval.contains(x) for x in trap.decoys)
        and trap_family.left_endpoint(1) in trap.trap_core
    )
    out.append(_check("resolved trap sets satisfy their shape invariants", good, len(trap.decoys)))

    halting = families.make_halting_family({1, 3})
    staged_good = True
    cases = 0
    for i in (1, 3):
        spec = halting.staged_spec(i)
        snaps = [resolve(spec, s).as_finite_set() for s in range(4)]
        for earlier, later in zip(snaps, snaps[1:]):
            cases += 1
            if not earlier <= later:
                staged_good = False
    out.append(_check("staged membership monotone in the stage", staged_good, cases))
    return out


def verify_agents() -> list[CheckResult]:
    out = []
    registry = agents.build_default_registry()
    catalog = agents.make_basic_agents()

    cases = 0
    good = True
    worst = 0.0
    for a in (2, 3):
        for n in range(0, 4097):
            queries = 0

            def probe(x, n=n):
                nonlocal queries
                queries += 1
                return x <= n

            found = agents.exp_query_search(probe, a)
            bound = agents.exp_search_query_bound(n, a)
            cases += 1
            worst = max(worst, queries / bound)
            if found != n or queries > bound:
                good = False
    out.append(
        _check("endpoint search exact within the query bound", good, cases, f"worst ratio {worst:.3f}")
    )

    pow2 = families.make_basic_family("pow2")
    p_pmc = poly_encode([2, 1])
    good = True
    cases = 0
    for n in range(0, 9):
        target = pow2.member(n)
        texts = [pow2.canonical_text(n)]
        texts += [make_text("seeded", target, seed=s) for s in range(3)]
        texts += [
            make_text("repeat-pad", target, pad_element=0, pad_count=9, seed=1),
        ]
        for text in texts:
            budget = Budget(horizon=2**n + 70, window=20)
            pmc_run = run_session(catalog["pow2_pmc_learner"], text, budget=budget)
            cases += 1
            if not evaluate_run(pmc_run, pow2, n, p_pmc, "PMC").passed:
                good = False
            oracle_run = run_session(
                catalog["pow2_oracle_learner"],
                text,
                oracle=MembershipOracle(target),
                budget=budget,
            )
            cases += 1
            if not evaluate_run(oracle_run, pow2, n, poly_encode([8, 0, 0, 1]), "PRT").passed:
                good = False
    out.append(_check("positive learners pass their criteria on varied texts", good, cases))

    registry2 = agents.build_default_registry()
    msd = families.make_msd(registry2, 0, poly_encode([0, 1]))
    learner, teacher_factory = agents.make_msd_pair()
    good = True
    cases = 0
    for n in range(0, 41, 5):
        tr = run_session(
            learner,
            msd.canonical_text(n),
            teacher=teacher_factory(),
            budget=Budget(horizon=n + 60, window=20),
        )
        cases += 1
        if tr.final_hypothesis != n or tr.ledger.mind_changes > n:
            good = False
    out.append(_check("descriptor pair: final hypothesis is the index, changes at most n", good, cases))

    pair_learner, pair_teacher = catalog["pow2_teacher_pair"]
    gated = agents.convert_psdT_to_pmc(pair_learner, pair_teacher)
    decoder, encoder_factory = agents.convert_pmc_to_psdT(catalog["pow2_pmc_learner"])
    good = True
    cases = 0
    for n in range(0, 8):
        text = make_text("seeded", pow2.member(n), seed=n)
        budget = Budget(horizon=2**n + 60, window=20)
        pair_run = run_session(pair_learner, text, teacher=pair_teacher(), budget=budget)
        extensions = sum(1 for e in pair_run.events if e.kind == "teach" and e.payload[1])
        gated_run = run_session(gated, text, budget=budget)
        cases += 1
        if gated_run.ledger.mind_changes > extensions:
            good = False
        psd_run = run_session(decoder, text, teacher=encoder_factory(), budget=budget)
        cases += 1
        if psd_run.ledger.distinct_data > 2:
            good = False
    out.append(_check("conversion resource guarantees", good, cases))
    return out


def verify_adversary() -> list[CheckResult]:
    out = []
    registry = agents.build_default_registry()
    p_lin = poly_encode([0, 1])

    good = True
    for m_id in (3, 4, 0):
        report, _ = adversary.msd_defeat(registry, m_id, p_lin)
        if not report.transcripts_identical or not report.wrong_for:
            good = False
    out.append(_check("defeat transcripts agree through the marker prefix", good, 3))

    qs = [adversary.compute_q(registry, 3, ell) for ell in (1, 5, 20, 50)]
    out.append(_check("query ceiling monotone in the stream length", qs == sorted(qs), len(qs)))

    csd = families.make_csd()
    chain = csd.chain_indices(5)[:2]
    chaser = adversary.make_chain_chaser(csd, chain)
    result = adversary.chain_force(chaser, None, chain, csd)
    from .session import run_on_sequence

    replay = run_on_sequence(chaser, result.prefix)
    stream = replay.emissions
    changes = sum(1 for x, y in zip(stream, stream[1:]) if x != y)
    out.append(
        _check(
            "forced mind changes equal the replayed count",
            result.status == "forced" and changes == result.forced_mind_changes,
            len(result.prefix),
        )
    )

    t1 = adversary.search_trap_sets(registry, 1, poly_encode([0]), 1, seed=5)
    t2 = adversary.search_trap_sets(registry, 1, poly_encode([0]), 1, seed=5)
    out.append(
        _check(
            "trap search reproducible from seed and budgets",
            (t1.trap_core, t1.decoys, t1.resolved) == (t2.trap_core, t2.decoys, t2.resolved),
            2,
        )
    )
    return out


SUITES = {
    "codec": verify_codec,
    "descriptor": verify_descriptor,
    "engine": verify_engine,
    "families": verify_families,
    "agents": verify_agents,
    "adversary": verify_adversary,
}


def verify_suite(name: str) -> list[CheckResult]:
    if name == "all":
        results = []
        for suite in SUITES.values():
            results.extend(suite())
        return results
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()
