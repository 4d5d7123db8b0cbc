import pytest

from txtex_lab import agents, families
from txtex_lab.codec import encode_tuple, pair, poly_encode
from txtex_lab.evaluate import evaluate_run
from txtex_lab.session import Budget, MembershipOracle, compose_pair, run_on_sequence, run_session
from txtex_lab.sets import FiniteSet, Interval
from txtex_lab.text import make_text


def counting_oracle(n):
    state = {"queries": 0}

    def probe(x):
        state["queries"] += 1
        return x <= n

    return probe, state


def test_exp_search_examples():
    probe, state = counting_oracle(0)
    assert agents.exp_query_search(probe, 2) == 0
    assert state["queries"] <= 2

    probe, state = counting_oracle(5)
    assert agents.exp_query_search(probe, 2) == 5

    for n in (1, 7, 63, 64, 100, 4096):
        probe, state = counting_oracle(n)
        assert agents.exp_query_search(probe, 2) == n
        assert state["queries"] <= agents.exp_search_query_bound(n, 2)


def test_exp_search_bound_sweep_base3():
    for n in range(0, 500):
        probe, state = counting_oracle(n)
        assert agents.exp_query_search(probe, 3) == n
        assert state["queries"] <= agents.exp_search_query_bound(n, 3)


def test_up_interval_learner():
    family = families.make_basic_family("up-intervals")
    learner = agents.make_interval_oracle_learners("up-intervals")
    for n in (0, 4):
        target = family.member(n)
        transcript = run_session(
            learner, family.canonical_text(n), oracle=MembershipOracle(target), budget=Budget(horizon=20)
        )
        assert transcript.final_hypothesis == n
        assert transcript.ledger.oracle_queries == n + 1


def test_pair_interval_learner():
    family = families.make_basic_family("pair-intervals")
    learner = agents.make_interval_oracle_learners("pair-intervals")
    for lo, hi in ((2, 5), (0, 0), (3, 17)):
        index = encode_tuple([lo, hi])
        target = family.member(index)
        transcript = run_session(
            learner, family.canonical_text(index), oracle=MembershipOracle(target), budget=Budget(horizon=40)
        )
        assert transcript.final_hypothesis == index


def test_tuple_teacher_pair():
    family = families.make_basic_family("tuple-contents", k=1)
    learner, teacher_factory = agents.make_tuple_teacher_pair(1)
    target = FiniteSet({7, 3})
    text = make_text("repeat-pad", target, pad_element=7, pad_count=2)
    transcript = run_session(learner, text, teacher=teacher_factory(), budget=Budget(horizon=20))
    assert transcript.final_hypothesis == encode_tuple([7, 3])
    assert transcript.ledger.distinct_data == 2
    # k=0: first datum is the answer
    learner0, teacher0 = agents.make_tuple_teacher_pair(0)
    transcript = run_session(
        learner0,
        make_text("canonical", FiniteSet({5})),
        teacher=teacher0(),
        budget=Budget(horizon=10),
    )
    assert transcript.final_hypothesis == 5


def test_tuple_pair_never_converges_on_small_content():
    # target has fewer distinct elements than the tuple needs
    learner, teacher_factory = agents.make_tuple_teacher_pair(2)
    transcript = run_session(
        learner,
        make_text("canonical", FiniteSet({4, 9})),
        teacher=teacher_factory(),
        budget=Budget(horizon=30),
    )
    assert transcript.final_hypothesis is None
    assert not transcript.converged


@pytest.fixture(scope="module")
def registry():
    return agents.build_default_registry()


@pytest.fixture(scope="module")
def msd_family(registry):
    return families.make_msd(registry, 0, poly_encode([0, 1]))


def test_msd_pair_identifies_all_orders(msd_family):
    learner, teacher_factory = agents.make_msd_pair()
    for n in (0, 1, 5, 23):
        target = msd_family.member(n)
        texts = [msd_family.canonical_text(n)]
        texts += [make_text("seeded", target, seed=s) for s in range(4)]
        for text in texts:
            transcript = run_session(
                learner, text, teacher=teacher_factory(), budget=Budget(horizon=n + 50, window=15)
            )
            assert transcript.converged
            assert transcript.final_hypothesis == n
            assert transcript.ledger.mind_changes <= n


def test_msd_pair_linear_ticks(msd_family):
    learner, teacher_factory = agents.make_msd_pair()
    ticks = []
    for n in range(0, 30):
        transcript = run_session(
            learner,
            msd_family.canonical_text(n),
            teacher=teacher_factory(),
            budget=Budget(horizon=n + 50, window=15),
        )
        ticks.append((n, transcript.convergence.ticks))
    assert all(t <= 2 * n + 3 for n, t in ticks)


def test_msd_teacher_silent_on_non_descriptor_stream():
    teacher = agents.DescriptorTeacher(0)
    # column-0 chain elements never complete a descriptor
    out = []
    for x in [pair(0, 0), pair(1, 0), pair(2, 0)] * 3:
        out += teacher.on_input(x)
    assert out == []


def test_csd_learner_identifies_every_small_index():
    family = families.make_csd()
    learner = agents.make_csd_learner()
    top = family.table.anchor(6)
    for n in range(0, top):
        target = family.member(n)
        transcript = run_session(
            learner,
            family.canonical_text(n),
            oracle=MembershipOracle(target),
            budget=Budget(horizon=60),
        )
        assert transcript.final_hypothesis == family.min_index(n)


def test_merged_learner_branches_and_query_overhead(registry):
    family = families.make_merged(registry, 0, poly_encode([0, 1]))
    merged = agents.make_merged_learner()
    csd3 = families.CsdFamily(3)
    csd3_learner = agents.make_csd_learner(csd3.table)
    for n in range(0, 22):
        target = family.member(n)
        transcript = run_session(
            merged,
            family.canonical_text(n),
            oracle=MembershipOracle(target),
            budget=Budget(horizon=120, window=15),
        )
        assert transcript.final_hypothesis == family.min_index(n)
        assert transcript.final_hypothesis % 2 == n % 2
        if n % 2 == 0:
            component = run_session(
                csd3_learner,
                csd3.canonical_text(n // 2),
                oracle=MembershipOracle(target),
                budget=Budget(horizon=120),
            )
            assert transcript.ledger.oracle_queries == component.ledger.oracle_queries + 1
        else:
            assert transcript.ledger.oracle_queries == 1


def test_finite_psd_learner_hypotheses():
    learner = agents.make_finite_psd_learner()
    run = run_on_sequence(learner, [3, 3, 1])
    assert run.emissions == [pair(1, 8), pair(1, 8), pair(2, 10)]


def test_pow2_plain_learner_needs_everything():
    family = families.make_basic_family("pow2")
    learner = agents.make_pow2_plain_learner()
    transcript = run_session(learner, family.canonical_text(4), budget=Budget(horizon=60, window=10))
    assert transcript.final_hypothesis == 4
    assert transcript.convergence.distinct_data == 2**4 + 1


def test_pow2_teacher_pair_counts_brackets():
    family = families.make_basic_family("pow2")
    learner, teacher_factory = agents.make_pow2_teacher_pair()
    for n in (0, 1, 6):
        transcript = run_session(
            learner,
            family.canonical_text(n),
            teacher=teacher_factory(),
            budget=Budget(horizon=2**n + 40, window=10),
        )
        assert transcript.final_hypothesis == n
        assert transcript.ledger.distinct_data <= 1
        assert evaluate_run(transcript, family, n, poly_encode([2, 1]), "PSD").passed


def test_pow2_pmc_learner_threshold_counting():
    family = families.make_basic_family("pow2")
    learner = agents.make_pow2_pmc_learner()
    transcript = run_session(learner, family.canonical_text(4), budget=Budget(horizon=60, window=10))
    assert transcript.final_hypothesis == 4
    assert transcript.ledger.mind_changes <= 5


def test_pmc_msd_learner_zero_mind_changes(msd_family):
    learner = agents.make_pmc_msd_learner()
    sessions = 0
    for n in (0, 2, 4, 7, 9, 12, 15, 19, 24, 30):
        for seed in range(5):
            text = make_text("seeded", msd_family.member(n), seed=seed)
            transcript = run_session(learner, text, budget=Budget(horizon=n + 40, window=10))
            assert transcript.final_hypothesis == n
            assert transcript.ledger.mind_changes == 0
            sessions += 1
    assert sessions == 50


def test_msd_pair_composition_equivalence(msd_family):
    learner, teacher_factory = agents.make_msd_pair()
    composed = compose_pair(lambda: learner, teacher_factory)
    for n in (0, 3, 8, 13):
        for seed in range(5):
            text = make_text("seeded", msd_family.member(n), seed=seed)
            budget = Budget(horizon=n + 50, window=15)
            pair_run = run_session(learner, text, teacher=teacher_factory(), budget=budget)
            solo_run = run_session(composed, text, budget=budget)
            assert solo_run.hypothesis_stream() == pair_run.hypothesis_stream()
            assert solo_run.ledger.mind_changes == pair_run.ledger.mind_changes
            assert solo_run.final_hypothesis == n


def test_convert_psdT_to_pmc_bounded_by_extensions():
    family = families.make_basic_family("pow2")
    learner, teacher_factory = agents.make_pow2_teacher_pair()
    gated = agents.convert_psdT_to_pmc(learner, teacher_factory)
    for n in (0, 3, 6):
        text = make_text("seeded", family.member(n), seed=n)
        budget = Budget(horizon=2**n + 50, window=15)
        pair_run = run_session(learner, text, teacher=teacher_factory(), budget=budget)
        extensions = sum(1 for e in pair_run.events if e.kind == "teach" and e.payload[1])
        gated_run = run_session(gated, text, budget=budget)
        assert gated_run.final_hypothesis == n
        assert gated_run.ledger.mind_changes <= extensions


def test_convert_psdT_to_pmc_silent_teacher():
    class SilentTeacher(agents.Teacher):
        def on_input(self, datum):
            return []

    learner, _ = agents.make_pow2_teacher_pair()
    gated = agents.convert_psdT_to_pmc(learner, SilentTeacher)
    transcript = run_session(
        gated, make_text("canonical", Interval(0, 4)), budget=Budget(horizon=30, window=5)
    )
    assert transcript.hypothesis_stream() == [0]


def test_convert_pmc_to_psdT_dataset_bound():
    family = families.make_basic_family("pow2")
    decoder, encoder_factory = agents.convert_pmc_to_psdT(agents.make_pow2_pmc_learner())
    for n in (0, 4, 8):
        for seed in range(3):
            text = make_text("seeded", family.member(n), seed=seed)
            transcript = run_session(
                decoder, text, teacher=encoder_factory(), budget=Budget(horizon=2**n + 50, window=15)
            )
            assert transcript.final_hypothesis == n
            assert transcript.ledger.distinct_data <= 2


def test_conversion_roundtrip_preserves_hypotheses():
    family = families.make_basic_family("pow2")
    decoder, encoder_factory = agents.convert_pmc_to_psdT(agents.make_pow2_pmc_learner())
    roundtrip = agents.convert_psdT_to_pmc(decoder, encoder_factory)
    for n in (0, 2, 5):
        for seed in range(4):
            text = make_text("seeded", family.member(n), seed=seed)
            transcript = run_session(roundtrip, text, budget=Budget(horizon=2**n + 50, window=15))
            assert transcript.final_hypothesis == n


def test_pcsG_learner_behavior():
    family = families.make_basic_family("pcs-G")
    learner = agents.make_pcsG_oracle_learner()
    unbounded = family.member(0)
    transcript = run_session(
        learner,
        make_text("canonical", Interval(0, None)),
        oracle=MembershipOracle(unbounded),
        budget=Budget(horizon=30, window=5),
    )
    assert transcript.hypothesis_stream() == [0] * len(transcript.hypothesis_stream())
    target = family.member(5)
    transcript = run_session(
        learner,
        make_text("repeat-pad", target, pad_element=5, pad_count=1),
        oracle=MembershipOracle(target),
        budget=Budget(horizon=30, window=5),
    )
    assert transcript.emissions[0].hypothesis == 5


def test_trap_teacher_pair_and_pmc(registry):
    family = families.make_pcs_f(registry, 1, poly_encode([0]), max_k=2)
    catalog = agents.make_pcsF_agents(family)
    learner, teacher_factory = catalog["teacher_pair"]
    for index in (0, 1, 2, 3, 4, 5):
        transcript = run_session(
            learner,
            family.canonical_text(index),
            teacher=teacher_factory(),
            budget=Budget(horizon=90, window=10),
        )
        assert transcript.converged, index
        assert transcript.final_hypothesis == index
    pmc = catalog["pmc_learner"]
    for index in (2, 3):
        transcript = run_session(pmc, family.canonical_text(index), budget=Budget(horizon=90, window=10))
        assert transcript.final_hypothesis == index
        assert transcript.ledger.mind_changes <= 2


def test_thm64_learner_rules():
    learner = agents.make_thm64_pcs_learner()
    run = run_on_sequence(learner, [6, 17])
    assert run.emissions[-1] == 6
    run = run_on_sequence(learner, [6, 5])
    assert run.emissions[-1] == 2 * (2 + 8) + 1
    run = run_on_sequence(learner, [1, 3, 5])
    assert run.emissions[-1] == 0


def test_halting_learner_rules():
    learner = agents.make_halting_psd_learner()
    run = run_on_sequence(learner, [])
    assert run.emissions == [6]
    run = run_on_sequence(learner, [4, 4, 4])
    assert run.emissions[-1] == 5
    run = run_on_sequence(learner, [4, 5])
    assert run.emissions[-1] == 2 ** (2**2)


def test_join_evens_learner():
    learner = agents.make_join_evens_learner()
    run = run_on_sequence(learner, [1, 3, 10, 7])
    assert run.emissions == [5]
