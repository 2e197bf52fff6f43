"""
Translation of discretised neural DNF models into logic programs.
"""

import logging
from typing import Dict, List, Optional, Set

import numpy as np

from ..config.settings import LATTICE_WEIGHT
from ..core.predicates import predicate_defs
from ..errors import TranslationError
from ..training.model import NeuralDnfModel, TaskKind
from .program import AtomNamer, LogicProgram, Rule, default_atom_namer, tensor_to_rule

logger = logging.getLogger(__name__)


def label_heads(task: TaskKind, n_outputs: int) -> List[str]:
    """Output atom names: t (binary), l_k (multilabel), class_k (multiclass)."""
    task = TaskKind(task)
    if task is TaskKind.BINARY:
        return ['t']
    prefix = 'class' if task is TaskKind.MULTICLASS else 'l'
    return [f"{prefix}_{k}" for k in range(n_outputs)]


def conj_head_names(model: NeuralDnfModel, share_origin: bool = True) -> List[str]:
    """
    Head name of every conjunctive row.

    With ``share_origin`` split rows keep the name of the node they came from
    (``nconj_i`` for rows standing for its negation); otherwise every row gets
    its own ``conj_r``.
    """
    if not share_origin:
        return [f"conj_{r}" for r in range(model.conj.out_nodes)]
    return [f"{'nconj' if negated else 'conj'}_{origin}"
            for origin, negated in zip(model.conj_origin, model.conj_negated)]


def conjunction_rules(model: NeuralDnfModel, heads: List[str],
                      atom_namer: AtomNamer = default_atom_namer) -> List[Rule]:
    """One rule per nonzero conjunctive row; all-zero rows are constant false and emit nothing."""
    rules = []
    for row, head in zip(model.conj.weights, heads):
        if not np.any(row):
            continue
        rules.append(tensor_to_rule(row, head, atom_namer))
    return rules


def _fold_constants(rules: List[Rule], label_rules: List[Rule]) -> List[Rule]:
    defined = {rule.head for rule in rules}
    folded = []
    for rule in label_rules:
        if any(atom.startswith(('conj_', 'nconj_')) and atom not in defined for atom in rule.pos_body):
            continue
        neg = tuple(atom for atom in rule.neg_body
                    if not (atom.startswith(('conj_', 'nconj_')) and atom not in defined))
        folded.append(Rule(head=rule.head, pos_body=rule.pos_body, neg_body=neg))
    return folded


def _flatten(conj_rules: List[Rule], label_rules: List[Rule]) -> List[Rule]:
    negated: Set[str] = {atom for rule in label_rules for atom in rule.neg_body}
    by_head: Dict[str, List[Rule]] = {}
    for rule in conj_rules:
        by_head.setdefault(rule.head, []).append(rule)

    inlined = {head for head in by_head if head not in negated}
    flattened: List[Rule] = []
    for rule in label_rules:
        targets = [atom for atom in rule.pos_body if atom in inlined]
        if len(targets) != 1 or rule.length != 1:
            flattened.append(rule)
            continue
        for body in by_head[targets[0]]:
            flattened.append(Rule(head=rule.head, pos_body=body.pos_body, neg_body=body.neg_body))

    used = {atom for rule in flattened for atom in rule.pos_body + rule.neg_body}
    kept_conj = [rule for rule in conj_rules if rule.head in used]
    return kept_conj + flattened


def translate(model: NeuralDnfModel, flatten: bool = True,
              atom_namer: AtomNamer = default_atom_namer) -> LogicProgram:
    """
    Build a logic program from a discretised model.

    Conjunctive rows become ``conj_i`` rules; each nonzero disjunctive weight becomes
    ``d :- conj_i`` (+6) or ``d :- not conj_i`` (-6). Conjunctions without rules are
    constant false and are folded away. With ``flatten``, conjunctions used only
    positively are inlined into the label rules.

    Args:
        model: Model whose conjunctive (and, for tanh heads, disjunctive) layers are on the lattice
        flatten: Inline positively used conjunctions
        atom_namer: Names for input atoms

    Returns:
        LogicProgram (label rules omitted for mutex-tanh models)

    Raises:
        TranslationError: A weight is off the lattice
    """
    defs = predicate_defs(model.predicates) if model.predicates is not None else []
    labels = label_heads(model.task, model.disj.out_nodes)
    multiclass = model.task is TaskKind.MULTICLASS
    heads = conj_head_names(model, share_origin=not multiclass)
    conj_rules = conjunction_rules(model, heads, atom_namer)

    if multiclass:
        return LogicProgram(predicate_defs=defs, rules=conj_rules, label_heads=labels, n_atoms=model.n_atoms)

    label_rules = []
    for d, (label, row) in enumerate(zip(labels, model.disj.weights)):
        for i, value in enumerate(row):
            if value == LATTICE_WEIGHT:
                label_rules.append(Rule(head=label, pos_body=(heads[i],)))
            elif value == -LATTICE_WEIGHT:
                label_rules.append(Rule(head=label, neg_body=(heads[i],)))
            elif value != 0.0:
                raise TranslationError(i, float(value))

    label_rules = _fold_constants(conj_rules, label_rules)
    rules = _flatten(conj_rules, label_rules) if flatten else conj_rules + label_rules
    logger.debug(f"Translated model into {len(rules)} rules over {len(labels)} label heads")
    return LogicProgram(predicate_defs=defs, rules=rules, label_heads=labels, n_atoms=model.n_atoms)
