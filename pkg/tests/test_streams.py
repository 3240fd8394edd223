import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robust_dff.core import validate_instance
from robust_dff.harness import run_trial
from robust_dff.learner import RobustDFF
from robust_dff.streams import (
    PLACEMENTS,
    AdaptiveAdversary,
    GenerationError,
    StochasticSampler,
    adversarial_stream,
    gen_random_instance,
    lower_bound_instance,
    lower_bound_stream,
    pair_index,
)
from robust_dff.teacher import Teacher


def test_single_component_needs_no_coordinates():
    inst = gen_random_instance(1, 1, 1, 0, 0, 2, 0)
    assert validate_instance(inst).ok and inst.representation.separation == {}


def test_distinct_labels_use_dedicated_coordinates():
    for seed in range(30):
        try:
            inst = gen_random_instance(3, 3, 3, 0, 0, 1, seed)
        except GenerationError:
            continue
        assert validate_instance(inst).ok
        assert len({lit.feature for lit in inst.representation.separation.values()}) <= 3


def test_generator_rejects_bad_parameters():
    with pytest.raises(GenerationError):
        gen_random_instance(2, 5, 2, 1, 2, 4, 0)
    with pytest.raises(GenerationError):
        gen_random_instance(2, 5, 1, 1, 0, 4, 0)
    with pytest.raises(GenerationError):
        gen_random_instance(6, 3, 6, 0, 0, 2, 0)


def test_planted_exceptions_and_similarity_budget():
    for seed in range(20):
        inst = gen_random_instance(3, 10, 3, 2, 1, 4, seed)
        assert validate_instance(inst).ok and len(inst.exceptions) == 2
        teacher = Teacher(inst, s=1)
        _, report = run_trial(inst, adversarial_stream(inst, 100, seed), RobustDFF(3, 2, 1), teacher)
        assert report.max_similar <= 1


@pytest.mark.parametrize("placement", PLACEMENTS)
def test_each_exception_exactly_once(placement):
    inst = gen_random_instance(3, 10, 2, 3, 1, 4, 5)
    stream = adversarial_stream(inst, 50, 1, placement)
    assert len(stream) == 50
    assert sorted(x for x in stream if x in inst.exceptions) == sorted(inst.exceptions)


def test_front_and_back_placement():
    inst = gen_random_instance(3, 10, 2, 3, 1, 4, 5)
    front = adversarial_stream(inst, 50, 1, "front")
    assert set(front[1:4]) == inst.exceptions
    back = adversarial_stream(inst, 50, 1, "back")
    assert set(back[-3:]) == inst.exceptions
    first = adversarial_stream(inst, 50, 1, "random", exception_first=True)
    assert first[0] in inst.exceptions


def test_stream_too_short():
    inst = gen_random_instance(3, 10, 2, 3, 1, 4, 5)
    with pytest.raises(GenerationError):
        adversarial_stream(inst, 3, 0)


def test_adaptive_presents_each_exception_at_most_once():
    inst = gen_random_instance(4, 12, 3, 4, 2, 4, 3)
    adv = AdaptiveAdversary(inst, 200, 0, aggression=1.0)
    rows, report = run_trial(inst, adv, RobustDFF(4, 4, 2), Teacher(inst, s=2))
    seen = [r.example for r in rows if r.example in inst.exceptions]
    assert len(seen) == len(set(seen))
    assert report.n == 199 and report.bounds["thm3"]["passed"]


def test_pair_index_is_lexicographic():
    m = 5
    pairs = list(itertools.combinations(range(m), 2))
    assert [pair_index(i, j, m) for i, j in pairs] == list(range(len(pairs)))


def test_lower_bound_membership():
    for m in (2, 3, 4, 5):
        pairs = list(itertools.combinations(range(m), 2))
        for bits in itertools.islice(itertools.product([0, 1], repeat=len(pairs)), 16):
            S = frozenset(p for p, b in zip(pairs, bits) if b)
            inst = lower_bound_instance(m, S)
            assert validate_instance(inst).ok and inst.k == 0
            for xid, (i, j) in enumerate(pairs):
                assert inst.component_of[xid] == (i if (i, j) in S else j)
                assert inst.concept_label[xid] in (i, j)


def test_lower_bound_bits_do_not_depend_on_hidden_set():
    m = 4
    pairs = list(itertools.combinations(range(m), 2))
    a = lower_bound_instance(m, frozenset())
    b = lower_bound_instance(m, frozenset(pairs))
    assert {x: e.bits for x, e in a.examples.items()} == {x: e.bits for x, e in b.examples.items()}


def test_lower_bound_stream_shape_and_determinism():
    inst, order, S = lower_bound_stream(4, 11)
    assert len(order) == 7 and order[0] == 6 and sorted(order[1:]) == list(range(6))
    again = lower_bound_stream(4, 11)
    assert again[1] == order and again[2] == S


def test_lower_bound_m2_first_sight_is_a_coin_flip():
    wrong = []
    for seed in range(400):
        inst, order, _ = lower_bound_stream(2, seed)
        _, report = run_trial(inst, order, RobustDFF(2))
        wrong.append(report.mistakes)
    assert set(wrong) <= {0, 1}
    assert 0.4 < np.mean(wrong) < 0.6


def test_sampler_zero_eps_never_draws_exceptions():
    inst = gen_random_instance(3, 10, 2, 2, 1, 4, 0)
    draws = StochasticSampler(inst, 0.0, 0.0, 1).draw(5000)
    assert not set(draws) & inst.exceptions


def test_sampler_exception_rate():
    inst = gen_random_instance(3, 10, 2, 2, 1, 4, 0)
    draws = np.array(StochasticSampler(inst, 0.1, 0.05, 2).draw(100_000))
    rate = np.isin(draws, sorted(inst.exceptions)).mean()
    assert 0.094 <= rate <= 0.106


def test_sampler_single_exception_takes_all_mass():
    inst = gen_random_instance(3, 10, 2, 1, 1, 4, 0)
    sampler = StochasticSampler(inst, 0.05, 0.05, 3)
    hits = {x for x in sampler.draw(5000) if x in inst.exceptions}
    assert hits == set(inst.exceptions)
    assert sampler.exception_mass == pytest.approx(0.05)


def test_sampler_rejects_mass_above_sigma():
    inst = gen_random_instance(3, 10, 2, 2, 1, 4, 0)
    with pytest.raises(GenerationError):
        StochasticSampler(inst, 0.1, 0.02, 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31))
def test_generated_instances_validate(m, seed):
    inst = gen_random_instance(m, m * (m - 1) // 2 + 4, 3, 2, 1, 4, seed)
    assert validate_instance(inst).ok
