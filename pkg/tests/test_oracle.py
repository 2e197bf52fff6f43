import numpy as np
from pytest import approx, raises

import ndnf_rules.evaluation.oracle as oracle
from ndnf_rules.discretise.splits import Polarity
from ndnf_rules.errors import BudgetExceededError
from ndnf_rules.evaluation.oracle import (check_split_coverage, enumerate_inputs, enumerate_truth_table,
                                          render_truth_table, split_examples)

from .conftest import EXAMPLE_NODE, EXAMPLE_SPLITS


def test_enumerate_inputs_order():
    rows = enumerate_inputs(2)
    assert rows.tolist() == [[1, 1], [1, -1], [-1, 1], [-1, -1]]
    assert enumerate_inputs(0).shape == (1, 0)


def test_example_table():
    table = enumerate_truth_table(EXAMPLE_NODE, 1.0)
    assert table.fan_in == 5
    assert len(table.rows) == 32
    assert len({row[0] for row in table.rows}) == 32
    lookup = {row[0]: row for row in table.rows}
    _, activation, positive = lookup[(-1.0, -1.0, 1.0, 1.0, -1.0)]
    assert round(activation, 3) == 0.964 and positive
    assert round(lookup[(1.0, 1.0, 1.0, 1.0, 1.0)][1], 3) == -1.0
    assert int(table.bivalent.sum()) == 4


def test_enumeration_is_idempotent():
    first = enumerate_truth_table(EXAMPLE_NODE, 1.0)
    second = enumerate_truth_table(EXAMPLE_NODE, 1.0)
    assert np.array_equal(first.inputs, second.inputs)
    assert np.array_equal(first.activations, second.activations)


def test_zero_weights_are_not_enumerated():
    table = enumerate_truth_table(np.array([0.0, 6.0, 0.0]), 1.0)
    assert table.relevant == (1,)
    assert table.full_inputs().tolist() == [[1, 1, 1], [1, -1, 1]]


def test_single_weight_table():
    table = enumerate_truth_table(np.array([6.0]), 1.0)
    assert [(row[0], row[2]) for row in table.rows] == [((1.0,), True), ((-1.0,), False)]
    examples = split_examples(table)
    assert examples.positives.tolist() == [[1.0]]


def test_fan_in_cap():
    with raises(BudgetExceededError) as info:
        enumerate_truth_table(np.ones(6), 1.0, fan_in_cap=5, node=3)
    assert info.value.node == 3
    assert '3' in str(info.value)


def test_chunked_enumeration_matches_single_pass(monkeypatch):
    w = np.random.default_rng(1).uniform(-6, 6, 9)
    whole = enumerate_truth_table(w, 1.0)
    monkeypatch.setattr(oracle, 'CHUNK_ROWS', 64)
    chunked = enumerate_truth_table(w, 1.0, workers=3)
    assert np.array_equal(whole.inputs, chunked.inputs)
    assert np.array_equal(whole.activations, chunked.activations)


def test_split_examples_partition():
    examples = split_examples(enumerate_truth_table(EXAMPLE_NODE, 1.0))
    assert len(examples.positives) + len(examples.negatives) == 32
    # a mismatch on the first input costs 12, more than max|w|
    assert not np.any(examples.positives[:, 0] == 1)


def test_all_zero_node_has_no_positives():
    examples = split_examples(enumerate_truth_table(np.zeros(3), 1.0))
    assert len(examples.positives) == 0
    assert len(examples.negatives) == 1


def test_coverage_of_example_splits():
    assert check_split_coverage(EXAMPLE_NODE, 1.0, EXAMPLE_SPLITS).ok


def test_thresholded_node_misses_positives():
    report = check_split_coverage(EXAMPLE_NODE, 1.0, np.array([[-6.0, -6.0, -6.0, 6.0, -6.0]]))
    assert not report.ok
    assert report.violation_count == 3
    assert all(reason == 'uncovered' for _, reason in report.violations)
    assert ((-1.0, -1.0, -1.0, 1.0, -1.0), 'uncovered') not in report.violations


def test_dropping_one_split_leaves_one_positive_uncovered():
    report = check_split_coverage(EXAMPLE_NODE, 1.0, EXAMPLE_SPLITS[[0, 1]])
    assert report.violation_count == 1
    assert report.violations == [((-1.0, -1.0, -1.0, -1.0, -1.0), 'uncovered')]


def test_spurious_split_is_reported():
    report = check_split_coverage(EXAMPLE_NODE, 1.0, np.vstack([EXAMPLE_SPLITS, np.zeros(5)]))
    assert report.violation_count == 28
    assert {reason for _, reason in report.violations} == {'spurious'}


def test_empty_splits_for_node_without_positives():
    assert check_split_coverage(np.zeros(3), 1.0, np.zeros((0, 3))).ok


def test_negative_polarity_coverage():
    report = check_split_coverage(np.array([4.0, -4.0]), 1.0, np.array([[-6.0, 0.0], [0.0, 6.0]]),
                                  polarity=Polarity.NEGATIVE)
    assert report.ok
    assert report.checked == 4


def test_render_truth_table():
    table = enumerate_truth_table(np.array([6.0, 0.0, -6.0]), 1.0)
    text = render_truth_table(table)
    assert text.splitlines()[0].split() == ['x1', 'x3', 'activation', 'bivalent']
    assert text.endswith('\n')
    csv = render_truth_table(table, 'csv').splitlines()
    assert csv[0] == 'x1,x3,activation,bivalent'
    assert csv[2] == '1,-1,1.000,T'
    assert len(csv) == 5
    assert float(csv[1].split(',')[2]) == approx(np.tanh(-6.0), abs=1e-3)
