import numpy as np
from hypothesis import given, settings
import hypothesis.strategies as st
from pytest import approx, mark, raises

from ndnf_rules.core.predicates import (TemperatureSchedule, ThresholdPredicateBank, interpret, invent,
                                        invent_backward, parse_predicate, predicate_defs, step_temperature)
from ndnf_rules.errors import DomainError, InputShapeError


def test_invent_single_value():
    bank = ThresholdPredicateBank(thresholds=[[3.0]], temperature=1.0)
    assert invent(bank, np.array([5.0]))[0] == approx(np.tanh(2.0))
    assert round(float(invent(bank, np.array([5.0]))[0]), 3) == 0.964


def test_invent_atom_order():
    bank = ThresholdPredicateBank(thresholds=[[0.0, 1.0], [10.0, 20.0]], temperature=0.5)
    p = invent(bank, np.array([[0.5, 15.0]]))
    expected = np.tanh(np.array([0.5, -0.5, 5.0, -5.0]) / 0.5)
    assert p.shape == (1, 4)
    assert p[0] == approx(expected)


def test_invent_errors():
    bank = ThresholdPredicateBank(thresholds=[[0.0], [1.0]])
    with raises(InputShapeError):
        invent(bank, np.ones(3))
    with raises(DomainError):
        ThresholdPredicateBank(thresholds=[[0.0]], temperature=0.05)
    bank.temperature = 2.0
    with raises(DomainError):
        invent(bank, np.ones(2))


@settings(deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_invent_backward_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    bank = ThresholdPredicateBank(thresholds=rng.normal(size=(2, 3)), temperature=rng.uniform(0.3, 1.0))
    x = rng.normal(size=(5, 2))
    upstream = rng.normal(size=(5, 6))
    grad = invent_backward(bank, x, upstream)

    h = 1e-6
    numeric = np.zeros_like(bank.thresholds)
    for idx in np.ndindex(*bank.thresholds.shape):
        plus, minus = bank.copy(), bank.copy()
        plus.thresholds[idx] += h
        minus.thresholds[idx] -= h
        numeric[idx] = ((invent(plus, x) - invent(minus, x)) * upstream).sum() / (2 * h)
    assert grad == approx(numeric, rel=1e-4, abs=1e-7)


def test_interpret_listing_format():
    bank = ThresholdPredicateBank(thresholds=[[-269.8374328613281, 0.0, 1.0, 186.82131958007812]])
    assert interpret(bank, 0, 0) == 'a_0 = feature_0 > -269.8374328613281'
    assert interpret(bank, 0, 3) == 'a_3 = feature_0 > 186.82131958007812'


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_interpret_round_trips_thresholds(threshold):
    bank = ThresholdPredicateBank(thresholds=[[0.0, threshold]])
    parsed = parse_predicate(interpret(bank, 0, 1))
    assert (parsed.atom, parsed.feature) == (1, 0)
    assert parsed.threshold == threshold


def test_predicate_defs_numbering():
    bank = ThresholdPredicateBank(thresholds=np.arange(6.0).reshape(3, 2))
    defs = predicate_defs(bank)
    assert [(d.atom, d.feature) for d in defs] == [(0, 0), (1, 0), (2, 1), (3, 1), (4, 2), (5, 2)]
    assert [d.threshold for d in defs] == list(np.arange(6.0))


def test_parse_predicate_rejects_other_lines():
    with raises(ValueError):
        parse_predicate('c :- a_1.')


def test_from_data_uses_quantiles():
    x = np.arange(1.0, 6.0)[:, None]
    bank = ThresholdPredicateBank.from_data(x, per_feature=1)
    np.testing.assert_allclose(bank.thresholds, [[3.0]])
    assert ThresholdPredicateBank.from_data(np.random.default_rng(0).normal(size=(50, 3)), 4).thresholds.shape == (3, 4)


@mark.parametrize('epoch, expected', [(0, 1.0), (99, 0.1), (500, 0.1)])
def test_step_temperature(epoch, expected):
    assert step_temperature(TemperatureSchedule(), epoch) == approx(expected)


def test_step_temperature_decreases():
    values = [step_temperature(TemperatureSchedule(decay_epochs=20), e) for e in range(30)]
    assert values == sorted(values, reverse=True)
    assert all(0.1 <= v <= 1.0 for v in values)
    with raises(DomainError):
        step_temperature(TemperatureSchedule(), -1)
