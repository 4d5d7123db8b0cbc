import pytest

from txtex_lab import agents, families
from txtex_lab.codec import poly_encode
from txtex_lab.evaluate import check_characteristic_sample, evaluate_run, hypothesis_correct
from txtex_lab.session import Budget, Emit, GenLearner, MembershipOracle, Read, run_session
from txtex_lab.text import make_text


@pytest.fixture(scope="module")
def pow2():
    return families.make_basic_family("pow2")


def test_evaluate_rejects_unknown_criterion(pow2):
    transcript = run_session(
        agents.make_pow2_pmc_learner(), pow2.canonical_text(2), budget=Budget(horizon=20, window=5)
    )
    with pytest.raises(ValueError):
        evaluate_run(transcript, pow2, 2, poly_encode([2, 1]), "XYZ")


def test_evaluate_non_converged(pow2):
    def program():
        n = 0
        while True:
            yield Read()
            n += 1
            yield Emit(n)  # changes forever

    restless = GenLearner("restless", program)
    transcript = run_session(restless, pow2.canonical_text(3), budget=Budget(horizon=20, window=4))
    verdict = evaluate_run(transcript, pow2, 3, poly_encode([2, 1]), "PMC")
    assert not verdict.passed and verdict.reason == "non-converged"


def test_evaluate_wrong_hypothesis(pow2):
    def program():
        yield Emit(7)

    wrong = GenLearner("wrong", program)
    transcript = run_session(wrong, pow2.canonical_text(3), budget=Budget(horizon=10))
    verdict = evaluate_run(transcript, pow2, 3, poly_encode([2, 1]), "PMC")
    assert not verdict.passed and verdict.reason == "wrong-hypothesis"


def test_evaluate_pmc_pass_and_fail(pow2):
    learner = agents.make_pow2_pmc_learner()
    transcript = run_session(learner, pow2.canonical_text(5), budget=Budget(horizon=60, window=10))
    assert evaluate_run(transcript, pow2, 5, poly_encode([2, 1]), "PMC").passed
    # zero polynomial allows no mind changes
    verdict = evaluate_run(transcript, pow2, 5, poly_encode([0]), "PMC")
    assert not verdict.passed and verdict.reason == "mind-change-bound-exceeded"


def test_evaluate_psd_example(pow2):
    plain = agents.make_pow2_plain_learner()
    transcript = run_session(plain, pow2.canonical_text(5), budget=Budget(horizon=60, window=10))
    verdict = evaluate_run(transcript, pow2, 5, poly_encode([0, 0, 1]), "PSD")
    assert not verdict.passed
    assert verdict.details["distinct_at_convergence"] == 2**5 + 1


def test_evaluate_prt_counts_queries(pow2):
    oracle_learner = agents.make_pow2_oracle_learner()
    target = pow2.member(4)
    transcript = run_session(
        oracle_learner, pow2.canonical_text(4), oracle=MembershipOracle(target), budget=Budget(horizon=40)
    )
    assert evaluate_run(transcript, pow2, 4, poly_encode([8, 0, 0, 1]), "PRT").passed
    verdict = evaluate_run(transcript, pow2, 4, poly_encode([1]), "PRT")
    assert not verdict.passed and verdict.reason == "query-bound-exceeded"


def test_evaluate_deterministic_on_replay(pow2):
    learner = agents.make_pow2_pmc_learner()
    text = make_text("seeded", pow2.member(4), seed=3)
    verdicts = []
    for _ in range(2):
        transcript = run_session(learner, text, budget=Budget(horizon=40, window=8))
        verdicts.append(evaluate_run(transcript, pow2, 4, poly_encode([2, 1]), "PMC"))
    assert verdicts[0] == verdicts[1]


def test_hypothesis_correct_accepts_any_index_of_the_set():
    family = families.make_halting_family({1})
    # indices 3 and 4 both code {2, 3}
    assert hypothesis_correct(family, 4, 3)
    assert hypothesis_correct(family, 3, 4)
    assert not hypothesis_correct(family, 5, 3)


def test_char_sample_pcsg():
    family = families.make_basic_family("pcs-G")
    for n in (1, 5, 8):
        verdict = check_characteristic_sample(
            agents.make_pcsG_oracle_learner,
            family,
            n,
            [n],
            poly_encode([2, 1]),
            max_text_len=4,
            max_universe=20,
        )
        assert verdict.passed
        assert verdict.details["locked_output"] == n
        assert verdict.details["exhaustive"]


def test_char_sample_join_singletons_size_one():
    family = families.make_basic_family("join-singletons")
    verdict = check_characteristic_sample(
        agents.make_join_evens_learner,
        family,
        5,
        [10],
        poly_encode([2, 1]),
        max_text_len=3,
        max_universe=15,
        use_oracle=False,
    )
    assert verdict.passed and verdict.details["sample_size"] == 1


def test_char_sample_thm64_size_two():
    family = families.make_thm64_g()
    for n in (2, 3):
        index = 2 * n
        verdict = check_characteristic_sample(
            agents.make_thm64_pcs_learner,
            family,
            index,
            [2 * n, 2 * 2**n + 1],
            poly_encode([3, 1]),
            max_text_len=3,
            max_universe=2 * 2**n + 2,
            use_oracle=False,
        )
        assert verdict.passed and verdict.details["exhaustive"]


def test_char_sample_rejections():
    family = families.make_basic_family("pcs-G")
    poly = poly_encode([2, 1])
    # sample outside the target
    verdict = check_characteristic_sample(
        agents.make_pcsG_oracle_learner, family, 3, [9], poly, max_text_len=3, max_universe=10
    )
    assert not verdict.passed and verdict.reason == "sample-outside-target"
    # oversized sample
    verdict = check_characteristic_sample(
        agents.make_pcsG_oracle_learner,
        family,
        1,
        [0, 1],
        poly_encode([1]),
        max_text_len=3,
        max_universe=10,
    )
    assert not verdict.passed and verdict.reason == "sample-too-large"


def test_char_sample_empty_sample_fails_for_changing_learner():
    family = families.make_basic_family("pcs-G")
    verdict = check_characteristic_sample(
        agents.make_pcsG_oracle_learner,
        family,
        4,
        [],
        poly_encode([2, 1]),
        max_text_len=3,
        max_universe=8,
    )
    assert not verdict.passed
    assert verdict.reason == "output-not-fixed"
    assert "prefix" in verdict.details


def test_char_sample_sampled_mode_flagged():
    family = families.make_thm64_g()
    n = 8
    verdict = check_characteristic_sample(
        agents.make_thm64_pcs_learner,
        family,
        2 * n,
        [2 * n, 2 * 2**n + 1],
        poly_encode([3, 1]),
        max_text_len=3,
        max_universe=2 * 2**n + 2,
        use_oracle=False,
    )
    assert verdict.passed
    assert verdict.details["exhaustive"] is False
