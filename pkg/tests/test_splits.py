import numpy as np
from hypothesis import given, settings
import hypothesis.strategies as st
from pytest import mark, raises

from ndnf_rules.discretise.splits import (ExclusionSet, SplitWeightSet, exclusion_to_tensor, is_valid_exclusion,
                                          prune_subsumed, relevant_set, search_exclusion_sets,
                                          split_negative_naive, split_positive_naive, subsumes)
from ndnf_rules.errors import BudgetExceededError, DomainError
from ndnf_rules.evaluation.oracle import enumerate_truth_table, exhaustive_exclusion_sets, split_examples

from .conftest import EXAMPLE_NODE, EXAMPLE_SPLITS, random_node


def test_relevant_set_of_example_node():
    relevant = relevant_set(EXAMPLE_NODE)
    assert relevant.indices == (0, 1, 2, 3, 4)
    assert relevant.small_indices == (1, 2, 3)
    assert relevant.small_positive == (3,)
    assert relevant.small_negative == (1, 2)
    assert relevant.half_max == 3.0


def test_weight_at_exactly_half_max_is_not_small():
    assert relevant_set(np.array([6.0, 3.0, -1.0])).small_indices == (2,)


@mark.parametrize('weights, expected', [
    (EXAMPLE_NODE, [(1,), (2,), (3,)]),
    ([6.0, 1.0, 1.0, 1.0], [(1, 2), (1, 3), (2, 3)]),
    ([6.0, 6.0], [()]),
    ([6.0, 0.0, -1.0], [(2,)]),
])
def test_search_exclusion_sets(weights, expected):
    found = search_exclusion_sets(np.array(weights))
    assert [e.indices for e in found] == expected


def test_exclusion_weight_sums():
    found = search_exclusion_sets(np.array([6.0, 1.0, 1.0, 1.0]))
    assert [e.weight_sum for e in found] == [2.0, 2.0, 2.0]


def test_search_rejects_all_zero_node():
    with raises(DomainError):
        search_exclusion_sets(np.zeros(3))


def test_search_budget_reports_partial():
    with raises(BudgetExceededError) as info:
        search_exclusion_sets(np.r_[60.0, np.full(14, 0.5)], budget_secs=0.0, node=7)
    assert info.value.node == 7
    assert isinstance(info.value.partial, list)


@settings(deadline=None, max_examples=60)
@given(st.integers(0, 2**32 - 1), st.integers(1, 10))
def test_search_matches_brute_force(seed, fan_in):
    w = random_node(np.random.default_rng(seed), fan_in)
    assert search_exclusion_sets(w) == exhaustive_exclusion_sets(w)


@settings(deadline=None, max_examples=60)
@given(st.integers(0, 2**32 - 1), st.integers(1, 10))
def test_exclusion_sets_are_valid_and_maximal(seed, fan_in):
    w = random_node(np.random.default_rng(seed), fan_in)
    relevant = relevant_set(w)
    for exclusion in search_exclusion_sets(w):
        assert is_valid_exclusion(w, exclusion.indices, relevant)
        for j in relevant.small_indices:
            if j not in exclusion.indices:
                assert not is_valid_exclusion(w, exclusion.indices + (j,), relevant)


def test_is_valid_exclusion():
    assert is_valid_exclusion(EXAMPLE_NODE, (1,))
    assert not is_valid_exclusion(EXAMPLE_NODE, (1, 2))
    assert not is_valid_exclusion(EXAMPLE_NODE, (0,))
    assert is_valid_exclusion(EXAMPLE_NODE, ())


def test_exclusion_to_tensor():
    tensors = [exclusion_to_tensor(EXAMPLE_NODE, e) for e in search_exclusion_sets(EXAMPLE_NODE)]
    assert np.array_equal(np.vstack(tensors), EXAMPLE_SPLITS)
    assert exclusion_to_tensor(np.array([6.0, 0.0, -2.0]), ExclusionSet(())).tolist() == [6.0, 0.0, -6.0]


def test_split_positive_naive():
    examples = split_examples(enumerate_truth_table(EXAMPLE_NODE, 1.0))
    tensors = split_positive_naive(EXAMPLE_NODE, examples.positives)
    assert tensors.shape == (4, 5)
    retained, dropped = prune_subsumed(tensors)
    assert len(retained) == 3
    assert sorted(map(tuple, tensors[retained])) == sorted(map(tuple, EXAMPLE_SPLITS))
    assert len(dropped) == 1


def test_split_negative_naive():
    tensors = split_negative_naive(np.array([4.0, -4.0]), np.array([[1.0, 1.0]]))
    assert tensors.tolist() == [[0.0, 6.0]]
    tensors = split_negative_naive(np.array([4.0, 0.0]), np.array([[-1.0, -1.0]]))
    assert tensors.tolist() == [[-6.0, 0.0]]


def test_subsumes():
    assert subsumes(np.array([6, 0, 0]), np.array([6, -6, 0]))
    assert not subsumes(np.array([6, -6, 0]), np.array([6, 0, 0]))
    assert not subsumes(np.array([-6, 0, 0]), np.array([6, -6, 0]))
    assert not subsumes(np.array([6, -6, 0]), np.array([6, -6, 0]))
    assert not subsumes(np.zeros(3), np.array([6, -6, 0]))


def test_prune_subsumed_keeps_shortest_and_maps_duplicates():
    tensors = np.array([
        [6, -6, 0],
        [6, 0, 0],
        [6, 0, 0],
        [0, 0, 6],
        [-6, 0, 6],
    ])
    retained, dropped = prune_subsumed(tensors)
    assert retained == [1, 3]
    assert dropped == {0: 1, 2: 1, 4: 3}


def test_prune_subsumed_empty():
    assert prune_subsumed(np.zeros((0, 3))) == ([], {})


def test_split_weight_set():
    splits = SplitWeightSet(EXAMPLE_SPLITS, source_node=2)
    assert len(splits) == 3
    assert len(SplitWeightSet.empty(5)) == 0
    assert SplitWeightSet(EXAMPLE_SPLITS[0]).tensors.shape == (1, 5)
