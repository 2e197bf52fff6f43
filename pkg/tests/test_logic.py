import logging

import numpy as np
from hypothesis import given, settings
import hypothesis.strategies as st
from pytest import approx, raises

from ndnf_rules.core.predicates import ThresholdPredicateBank
from ndnf_rules.core.semisym import NodeKind, SemiSymbolicLayer
from ndnf_rules.data.loader import Dataset
from ndnf_rules.discretise.disentangle import disentangle_model
from ndnf_rules.errors import EvaluationError, TranslationError
from ndnf_rules.evaluation.oracle import enumerate_inputs
from ndnf_rules.logic.probabilistic import emit_mt_annotated, emit_mt_program, observed_patterns
from ndnf_rules.logic.program import (LogicProgram, Rule, compactness, emit_asp, eval_program,
                                      eval_program_batch, input_assignment, parse_asp, tensor_to_rule)
from ndnf_rules.logic.translate import label_heads, translate
from ndnf_rules.training.model import NeuralDnfModel, TaskKind, predict

from .conftest import EXAMPLE_NODE, EXAMPLE_SPLITS, node_model, random_node


def one_based(k):
    return f"a_{k + 1}"


def test_tensor_to_rule():
    assert tensor_to_rule([6, 0, 0, -6], 'c', one_based).to_text() == 'c :- a_1, not a_4.'
    assert tensor_to_rule(EXAMPLE_SPLITS[0], 'c', one_based).to_text() == 'c :- not a_1, not a_3, a_4, not a_5.'


def test_tensor_to_rule_rejects_off_lattice_values():
    with raises(TranslationError) as info:
        tensor_to_rule([6, 3.5, 0], 'c')
    assert info.value.index == 1
    assert info.value.value == 3.5


def test_all_zero_tensor_becomes_fact(caplog):
    with caplog.at_level(logging.WARNING):
        rule = tensor_to_rule([0, 0], 'c')
    assert rule.to_text() == 'c.'
    assert 'fact' in caplog.text


def test_rule_rejects_contradictory_body():
    with raises(ValueError):
        Rule('c', pos_body=('a_1',), neg_body=('a_1',))


def test_rule_orders_literals_naturally():
    rule = Rule('c', pos_body=('a_10', 'a_2'), neg_body=('a_3',))
    assert rule.to_text() == 'c :- a_2, not a_3, a_10.'
    assert rule.length == 3


def test_example_rules_reproduce_the_node(example_dataset):
    program = LogicProgram(rules=[tensor_to_rule(t, 't') for t in EXAMPLE_SPLITS], label_heads=['t'])
    inputs = input_assignment(program, example_dataset.x_bool)
    assert eval_program_batch(program, inputs)[:, 0].astype(int).tolist() == example_dataset.y.tolist()


def test_eval_program_single_assignment():
    program = parse_asp('conj_0 :- a_0, not a_1.\nt :- conj_0.\n')
    assert eval_program(program, {'a_0': True, 'a_1': False}) == {'conj_0': True, 't': True}
    assert eval_program(program, {'a_0': True, 'a_1': True})['t'] is False
    with raises(EvaluationError):
        eval_program(program, {'a_0': True})


def test_empty_program_and_facts():
    empty = LogicProgram(label_heads=['t'])
    assert eval_program(empty, {'a_0': True}) == {'t': False}
    fact = LogicProgram(rules=[Rule('t')], label_heads=['t'])
    assert eval_program_batch(fact, {'a_0': np.array([True, False])}).tolist() == [[True], [True]]


def test_emit_asp_orders_rules_and_puts_definitions_first():
    bank = ThresholdPredicateBank(thresholds=[[-269.8374328613281]])
    conj = SemiSymbolicLayer(NodeKind.CONJUNCTIVE, [[0.0, 6.0], [6.0, 0.0]])
    disj = SemiSymbolicLayer(NodeKind.DISJUNCTIVE, [[6.0, -6.0]])
    model = NeuralDnfModel(conj=conj, disj=disj, predicates=bank)
    text = emit_asp(translate(model))
    assert text == ('a_0 = feature_0 > -269.8374328613281\n'
                    'conj_1 :- a_0.\n'
                    't :- a_1.\n'
                    't :- not conj_1.\n')


def test_emit_parse_emit_fixpoint():
    model = node_model(EXAMPLE_NODE)
    disentangled, _, _ = disentangle_model(model, disj_tau='zero')
    text = emit_asp(translate(disentangled))
    assert emit_asp(parse_asp(text)) == text
    assert text.count('\n') == 3


def test_parse_ignores_comments_and_debug_lines():
    text = '% header\n[6.0, -6.0]\nt :- a_1,\n    a_4.  % trailing\n'
    program = parse_asp(text)
    assert emit_asp(program) == 't :- a_1, a_4.\n'
    assert program.label_heads == ['t']


def test_empty_program_emits_nothing():
    assert emit_asp(LogicProgram()) == ''


def test_compactness():
    program = LogicProgram(rules=[tensor_to_rule(t, 't') for t in EXAMPLE_SPLITS])
    report = compactness(program)
    assert (report.max_rule_length, report.avg_rule_length, report.num_rules) == (4, 4.0, 3)
    report = compactness(LogicProgram())
    assert (report.max_rule_length, report.avg_rule_length, report.num_rules) == (0, 0.0, 0)


def test_compactness_counts_conjunctions_only_for_multiclass():
    program = parse_asp('conj_0 :- a_0, a_1.\nconj_1 :- a_2.\n0.900::class_0 ; 0.100::class_1 :- conj_0.\n')
    report = compactness(program, conj_only=True)
    assert (report.max_rule_length, report.avg_rule_length, report.num_rules) == (2, 1.5, 2)


def test_label_heads():
    assert label_heads(TaskKind.BINARY, 1) == ['t']
    assert label_heads(TaskKind.MULTILABEL, 2) == ['l_0', 'l_1']
    assert label_heads(TaskKind.MULTICLASS, 3) == ['class_0', 'class_1', 'class_2']


def test_translate_without_flattening_keeps_conjunction_heads():
    program = translate(node_model([6.0, -6.0]), flatten=False)
    assert emit_asp(program) == 'conj_0 :- a_0, not a_1.\nt :- conj_0.\n'
    assert emit_asp(translate(node_model([6.0, -6.0]))) == 't :- a_0, not a_1.\n'


def test_translate_rejects_real_valued_layers():
    with raises(TranslationError):
        translate(node_model([6.0, -6.0], disj_weight=2.0))


@settings(deadline=None, max_examples=40)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_translated_program_matches_bivalent_forward(seed, flatten):
    rng = np.random.default_rng(seed)
    conj = SemiSymbolicLayer(NodeKind.CONJUNCTIVE, np.vstack([random_node(rng, 5) for _ in range(3)]))
    disj = SemiSymbolicLayer(NodeKind.DISJUNCTIVE, rng.uniform(-6, 6, (2, 3)))
    model = NeuralDnfModel(conj=conj, disj=disj, task=TaskKind.MULTILABEL)
    disentangled, _, _ = disentangle_model(model, disj_tau='zero')

    x = enumerate_inputs(5)
    program = translate(disentangled, flatten=flatten)
    from_program = eval_program_batch(program, input_assignment(program, x)).astype(int)
    assert from_program.tolist() == predict(disentangled, x, bivalent_conj=True).tolist()


def _mt_model(disj_weights):
    conj = SemiSymbolicLayer(NodeKind.CONJUNCTIVE, [[6.0, 0.0], [0.0, -6.0]])
    disj = SemiSymbolicLayer(NodeKind.DISJUNCTIVE, disj_weights)
    return NeuralDnfModel(conj=conj, disj=disj, task=TaskKind.MULTICLASS)


def test_mt_annotated_rule_with_uniform_weights():
    model = _mt_model([[1.0, 1.0], [1.0, 1.0]])
    assert emit_mt_annotated(model, [True, False]) == '0.500::class_0 ; 0.500::class_1 :- conj_0.'
    assert emit_mt_annotated(model, [False, False]) == '0.500::class_0 ; 0.500::class_1.'


def test_mt_annotated_probabilities_sum_to_one():
    model = _mt_model([[2.7, -0.4], [-1.3, 0.9], [0.2, 0.1]])
    line = emit_mt_annotated(model, [True, True])
    probs = [float(part.split('::')[0]) for part in line.split(' :- ')[0].split(' ; ')]
    assert sum(probs) == approx(1.0, abs=0.002)
    with raises(ValueError):
        emit_mt_annotated(node_model([6.0, 0.0]), [True])


def test_mt_program_picks_the_annotated_rule_of_each_pattern():
    model = _mt_model([[4.0, -4.0], [-4.0, 4.0]])
    x = enumerate_inputs(2)
    patterns = observed_patterns(model, x)
    assert len(patterns) == 4

    dataset = Dataset(name='patterns', x_bool=x, x_real=np.zeros((4, 0)), y=np.zeros(4, dtype=int),
                      task=TaskKind.MULTICLASS)
    program = emit_mt_program(model, dataset)
    assert len(program.annotated) == 4
    chosen = eval_program_batch(program, input_assignment(program, x)).argmax(axis=1)
    assert chosen.tolist() == predict(model, x, bivalent_conj=True).tolist()
    text = emit_asp(program)
    assert emit_asp(parse_asp(text)) == text
