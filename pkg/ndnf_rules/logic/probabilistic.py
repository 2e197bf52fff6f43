"""
Annotated-disjunction rules for mutex-tanh (DNF-MT) heads.

The disjunctive layer of a DNF-MT model stays real-valued. For each pattern of
active conjunctions its class distribution is computed under bivalent
conjunctive activations and rendered as ``p0::class_0 ; p1::class_1 :- conj_i, ...``.
"""

import logging
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from ..core.semisym import forward, force_bivalent, mutex_tanh_head
from ..errors import InputShapeError
from ..training.model import NeuralDnfModel, TaskKind, encode_atoms
from .program import AnnotatedRule, LogicProgram
from .translate import conj_head_names, translate

logger = logging.getLogger(__name__)


def pattern_probabilities(model: NeuralDnfModel, conj_pattern: Sequence[bool]) -> np.ndarray:
    """Class probabilities of the real-valued disjunctive layer for one bivalent conjunction pattern."""
    pattern = np.asarray(conj_pattern, dtype=bool)
    if pattern.shape != (model.conj.out_nodes,):
        raise InputShapeError(f"pattern must have {model.conj.out_nodes} entries, got {pattern.shape}")
    raw = forward(model.disj, np.where(pattern, 1.0, -1.0)).raw
    return mutex_tanh_head(raw)[0]


def annotated_rule(model: NeuralDnfModel, conj_pattern: Sequence[bool]) -> AnnotatedRule:
    heads = conj_head_names(model, share_origin=False)
    probs = pattern_probabilities(model, conj_pattern)
    classes = [f"class_{k}" for k in range(model.disj.out_nodes)]
    body = tuple(head for head, active in zip(heads, conj_pattern) if active)
    return AnnotatedRule(heads=tuple((c, float(p)) for c, p in zip(classes, probs)), pos_body=body)


def emit_mt_annotated(model: NeuralDnfModel, conj_pattern: Sequence[bool]) -> str:
    """
    Render the annotated rule for one active-conjunction pattern.

    Args:
        model: DNF-MT model with a discretised conjunctive layer
        conj_pattern: Truth value of every conjunctive node

    Returns:
        One rule line, probabilities to 3 decimals
    """
    if model.task is not TaskKind.MULTICLASS:
        raise ValueError('annotated rules are only defined for mutex-tanh heads')
    return annotated_rule(model, conj_pattern).to_text()


def observed_patterns(model: NeuralDnfModel, x_bool: np.ndarray, x_real=None) -> List[Tuple[bool, ...]]:
    """Distinct bivalent conjunction patterns over a batch, sorted by their active indices."""
    atoms = encode_atoms(model, x_bool, x_real, bivalent=True)
    active = force_bivalent(forward(model.conj, atoms).out) > 0
    unique = {tuple(bool(v) for v in row) for row in active}
    return sorted(unique, key=lambda p: tuple(i for i, v in enumerate(p) if v))


def emit_mt_program(model: NeuralDnfModel, dataset, patterns: Iterable[Sequence[bool]] = None) -> LogicProgram:
    """
    Conjunction rules plus one annotated rule per conjunction pattern.

    Args:
        model: DNF-MT model with a discretised conjunctive layer
        dataset: Patterns are taken from this dataset when ``patterns`` is None
        patterns: Explicit patterns to emit

    Returns:
        LogicProgram with annotated rules
    """
    program = translate(model, flatten=False)
    if patterns is None:
        x_real = dataset.x_real if model.predicates is not None else None
        patterns = observed_patterns(model, dataset.x_bool, x_real)
    program.annotated = [annotated_rule(model, pattern) for pattern in patterns]
    logger.debug(f"Emitted {len(program.annotated)} annotated rules")
    return program
