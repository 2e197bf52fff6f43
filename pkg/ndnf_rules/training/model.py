"""
Two-layer neural DNF model.

Input atoms (threshold predicates first, then boolean features) feed a
conjunctive semi-symbolic layer, whose outputs feed a disjunctive layer. The
disjunctive outputs are read through tanh, or through mutex-tanh for
multiclass tasks.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from ..core.predicates import ThresholdPredicateBank, invent
from ..core.semisym import Activation, NodeKind, SemiSymbolicLayer, force_bivalent, forward, mutex_tanh_head
from ..errors import InputShapeError

logger = logging.getLogger(__name__)


class HeadKind(str, Enum):
    TANH = 'tanh'
    MUTEX_TANH = 'mutex_tanh'


class TaskKind(str, Enum):
    BINARY = 'binary'
    MULTICLASS = 'multiclass'
    MULTILABEL = 'multilabel'

    @property
    def head(self) -> HeadKind:
        return HeadKind.MUTEX_TANH if self is TaskKind.MULTICLASS else HeadKind.TANH


@dataclass
class NeuralDnfModel:
    """
    Neural DNF / DNF-MT model.

    Attributes:
        conj: Conjunctive layer [n_conj x n_atoms]
        disj: Disjunctive layer [n_outputs x n_conj]
        task: Classification task; fixes the head
        predicates: Optional threshold predicate bank feeding the first atoms
        conj_origin: Original conjunctive node of each row (kept through disentanglement)
        conj_negated: Rows that stand for the negation of their origin node
    """

    conj: SemiSymbolicLayer
    disj: SemiSymbolicLayer
    task: TaskKind = TaskKind.BINARY
    predicates: Optional[ThresholdPredicateBank] = None
    conj_origin: List[int] = field(default_factory=list)
    conj_negated: List[bool] = field(default_factory=list)

    def __post_init__(self):
        self.task = TaskKind(self.task)
        if self.conj.kind is not NodeKind.CONJUNCTIVE or self.disj.kind is not NodeKind.DISJUNCTIVE:
            raise ValueError('conj/disj layers have the wrong node kinds')
        if self.conj.out_nodes != self.disj.in_features:
            raise InputShapeError(
                f"conj has {self.conj.out_nodes} nodes but disj expects {self.disj.in_features} inputs")
        if self.task is TaskKind.MULTICLASS and self.disj.out_nodes < 2:
            raise InputShapeError('multiclass models need at least two disjunctive nodes')
        if self.predicates is not None and self.predicates.width > self.conj.in_features:
            raise InputShapeError('predicate bank is wider than the conjunctive input')
        if not self.conj_origin:
            self.conj_origin = list(range(self.conj.out_nodes))
        if not self.conj_negated:
            self.conj_negated = [False] * self.conj.out_nodes
        if len(self.conj_origin) != self.conj.out_nodes or len(self.conj_negated) != self.conj.out_nodes:
            raise InputShapeError('conj_origin/conj_negated must have one entry per conjunctive node')

    @property
    def head(self) -> HeadKind:
        return self.task.head

    @property
    def n_atoms(self) -> int:
        return self.conj.in_features

    @property
    def n_predicates(self) -> int:
        return self.predicates.width if self.predicates is not None else 0

    @property
    def n_boolean(self) -> int:
        return self.n_atoms - self.n_predicates

    @classmethod
    def initialise(cls, n_boolean: int, task: TaskKind, n_outputs: int, n_conjunctions: int,
                   rng: np.random.Generator, predicates: Optional[ThresholdPredicateBank] = None,
                   delta: float = 0.1) -> 'NeuralDnfModel':
        """Fresh model with weights drawn uniformly from [-1, 1]."""
        n_atoms = n_boolean + (predicates.width if predicates is not None else 0)
        conj = SemiSymbolicLayer(NodeKind.CONJUNCTIVE, rng.uniform(-1.0, 1.0, (n_conjunctions, n_atoms)), delta)
        disj = SemiSymbolicLayer(NodeKind.DISJUNCTIVE, rng.uniform(-1.0, 1.0, (n_outputs, n_conjunctions)), delta)
        return cls(conj=conj, disj=disj, task=task, predicates=predicates)

    def copy(self) -> 'NeuralDnfModel':
        return NeuralDnfModel(
            conj=self.conj.copy(),
            disj=self.disj.copy(),
            task=self.task,
            predicates=self.predicates.copy() if self.predicates is not None else None,
            conj_origin=list(self.conj_origin),
            conj_negated=list(self.conj_negated),
        )


@dataclass(frozen=True)
class ModelOutput:
    atoms: np.ndarray
    conj: Activation
    conj_input: np.ndarray
    disj: Activation
    probs: Optional[np.ndarray]


def encode_atoms(model: NeuralDnfModel, x_bool: np.ndarray, x_real: Optional[np.ndarray] = None,
                 bivalent: bool = False) -> np.ndarray:
    """
    Input atoms for the conjunctive layer: predicate activations, then boolean features.

    Args:
        model: Model (its predicate bank is used when present)
        x_bool: [B x F] features in [-1, 1]
        x_real: [B x R] raw real features, required when the model has predicates
        bivalent: Force predicate activations to +/-1

    Returns:
        [B x n_atoms] atom values
    """
    x_bool = np.atleast_2d(np.asarray(x_bool, dtype=float))
    if model.predicates is None:
        atoms = x_bool
    else:
        if x_real is None:
            raise InputShapeError('model has threshold predicates but no real features were given')
        predicates = invent(model.predicates, np.atleast_2d(x_real))
        if bivalent:
            predicates = force_bivalent(predicates)
        atoms = np.concatenate([predicates, x_bool], axis=1)
    if atoms.shape[1] != model.n_atoms:
        raise InputShapeError(f"expected {model.n_atoms} atoms, got {atoms.shape[1]}")
    return atoms


def forward_model(model: NeuralDnfModel, x_bool: np.ndarray, x_real: Optional[np.ndarray] = None,
                  bivalent_conj: bool = False) -> ModelOutput:
    """
    Full forward pass.

    With ``bivalent_conj`` the predicate and conjunctive activations are forced to
    +/-1 before the disjunctive layer, which is how discretised models are read.
    """
    atoms = encode_atoms(model, x_bool, x_real, bivalent=bivalent_conj)
    conj = forward(model.conj, atoms)
    conj_input = force_bivalent(conj.out) if bivalent_conj else conj.out
    disj = forward(model.disj, conj_input)
    probs = mutex_tanh_head(disj.raw)[0] if model.head is HeadKind.MUTEX_TANH else None
    return ModelOutput(atoms=atoms, conj=conj, conj_input=conj_input, disj=disj, probs=probs)


def predict(model: NeuralDnfModel, x_bool: np.ndarray, x_real: Optional[np.ndarray] = None,
            bivalent_conj: bool = False) -> np.ndarray:
    """
    Hard predictions.

    Returns:
        Binary: [B] in {0, 1}; multilabel: [B x L] in {0, 1}; multiclass: [B] class indices
    """
    output = forward_model(model, x_bool, x_real, bivalent_conj)
    if model.task is TaskKind.MULTICLASS:
        return np.argmax(output.probs, axis=1)
    hard = (output.disj.out > 0).astype(int)
    return hard[:, 0] if model.task is TaskKind.BINARY else hard
