"""
Metrics module for the neural DNF toolkit.

This module provides macro-F1 scoring for all three task kinds and the
`evaluate` entry point for trained models and extracted logic programs.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np
from sklearn.metrics import accuracy_score, f1_score

from ..errors import DomainError
from ..logic.probabilistic import emit_mt_program
from ..logic.program import LogicProgram, eval_program_dataset
from ..logic.translate import translate
from ..training.model import NeuralDnfModel, TaskKind, predict

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvaluationResult:
    macro_f1: float
    per_class_f1: List[float]
    accuracy: float
    n_samples: int


def _labels_for(task: TaskKind, y_true: np.ndarray, y_pred: np.ndarray, n_classes: Optional[int]) -> Optional[List[int]]:
    if task is TaskKind.BINARY:
        return [0, 1]
    if task is TaskKind.MULTICLASS:
        n = n_classes or int(max(np.max(y_true, initial=0), np.max(y_pred, initial=0)) + 1)
        return list(range(n))
    return None


def per_class_f1(y_true: np.ndarray, y_pred: np.ndarray, task: TaskKind,
                 n_classes: Optional[int] = None) -> np.ndarray:
    """
    F1 per class (binary, multiclass) or per label (multilabel, positive class).

    Classes with neither support nor predictions score 1.0.
    """
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    labels = _labels_for(TaskKind(task), y_true, y_pred, n_classes)
    return np.asarray(f1_score(y_true, y_pred, labels=labels, average=None, zero_division=1.0), dtype=float)


def macro_f1(y_true: np.ndarray, y_pred: np.ndarray, task: TaskKind, n_classes: Optional[int] = None) -> float:
    """Macro-averaged F1 (see per_class_f1 for the per-task averaging)."""
    return float(np.mean(per_class_f1(y_true, y_pred, task, n_classes)))


def accuracy(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Exact-match accuracy (subset accuracy for multilabel)."""
    return float(accuracy_score(np.asarray(y_true, dtype=int), np.asarray(y_pred, dtype=int)))


def score(y_true: np.ndarray, y_pred: np.ndarray, task: TaskKind, n_classes: Optional[int] = None) -> EvaluationResult:
    """
    Score predictions against labels.

    Args:
        y_true: Ground-truth labels
        y_pred: Predictions in the same layout
        task: Task kind
        n_classes: Number of classes for multiclass tasks

    Returns:
        EvaluationResult
    """
    y_true = np.asarray(y_true)
    if y_true.shape[0] == 0:
        raise DomainError('cannot evaluate on an empty dataset')
    per_class = per_class_f1(y_true, y_pred, task, n_classes)
    return EvaluationResult(
        macro_f1=float(np.mean(per_class)),
        per_class_f1=[float(v) for v in per_class],
        accuracy=accuracy(y_true, y_pred),
        n_samples=int(y_true.shape[0]),
    )


def evaluate(subject: Union[NeuralDnfModel, LogicProgram], dataset, mode: str = 'neural') -> EvaluationResult:
    """
    Evaluate a model or an extracted logic program on a dataset.

    Args:
        subject: NeuralDnfModel or LogicProgram
        dataset: Dataset to score on
        mode: 'neural' (real-valued forward, bivalent outputs) or 'bivalent'
              (evaluate the logic program; a model is translated first)

    Returns:
        EvaluationResult with macro-F1, per-class F1 and accuracy
    """
    if len(dataset) == 0:
        raise DomainError('cannot evaluate on an empty dataset')

    if isinstance(subject, LogicProgram):
        program = subject
    elif mode == 'neural':
        x_real = dataset.x_real if subject.predicates is not None else None
        y_pred = predict(subject, dataset.x_bool, x_real)
        return score(dataset.y, y_pred, dataset.task, dataset.n_outputs)
    elif subject.task is TaskKind.MULTICLASS:
        program = emit_mt_program(subject, dataset)
    else:
        program = translate(subject)

    y_pred = eval_program_dataset(program, dataset)
    return score(dataset.y, y_pred, dataset.task, dataset.n_outputs)
