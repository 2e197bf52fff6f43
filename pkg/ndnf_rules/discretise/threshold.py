"""
Thresholding discretisation with a shared tau.

Weights with |w| > tau are saturated to 6 * sign(w); the rest are zeroed.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np
import pandas as pd

from ..config.settings import LATTICE_WEIGHT, worker_count
from ..errors import DomainError
from ..evaluation.metrics import accuracy, macro_f1
from ..training.model import HeadKind, NeuralDnfModel, predict

logger = logging.getLogger(__name__)


class ThresholdScope(str, Enum):
    MODEL = 'model'
    DISJ = 'disj'


@dataclass(frozen=True)
class ThresholdChoice:
    """
    Selected tau and how it was chosen.

    Attributes:
        tau: Shared threshold
        scope: Layers the threshold applies to
        metric: Selection metric name
        value: Selection metric at tau
        table: Metric per candidate tau (None when tau was fixed)
    """

    tau: float
    scope: ThresholdScope = ThresholdScope.MODEL
    metric: str = 'macro_f1'
    value: float = float('nan')
    table: Optional[pd.DataFrame] = field(default=None, compare=False, repr=False)


def threshold_weights(weights: np.ndarray, tau: float) -> np.ndarray:
    """6 * sign(w) * 1(|w| > tau), elementwise."""
    if tau < 0:
        raise DomainError(f"tau must be non-negative, got {tau}")
    w = np.asarray(weights, dtype=float)
    return LATTICE_WEIGHT * np.sign(w) * (np.abs(w) > tau)


def apply_threshold(model: NeuralDnfModel, tau: float, scope: ThresholdScope = ThresholdScope.MODEL) -> NeuralDnfModel:
    """
    Discretised copy of a model; thresholded layers get delta magnitude 1.

    The disjunctive layer of a mutex-tanh model is left real-valued.
    """
    scope = ThresholdScope(scope)
    result = model.copy()
    if scope is ThresholdScope.MODEL:
        result.conj.weights = threshold_weights(model.conj.weights, tau)
        result.conj.delta = 1.0
    if model.head is not HeadKind.MUTEX_TANH:
        result.disj.weights = threshold_weights(model.disj.weights, tau)
    result.disj.delta = 1.0
    return result


def _scoped_weights(model: NeuralDnfModel, scope: ThresholdScope) -> np.ndarray:
    parts = []
    if scope is ThresholdScope.MODEL:
        parts.append(model.conj.weights.ravel())
    if model.head is not HeadKind.MUTEX_TANH:
        parts.append(model.disj.weights.ravel())
    return np.concatenate(parts) if parts else np.zeros(0)


def candidate_taus(model: NeuralDnfModel, scope: ThresholdScope = ThresholdScope.MODEL) -> List[float]:
    """0 plus the midpoints between consecutive distinct nonzero |w| in scope."""
    magnitudes = np.unique(np.abs(_scoped_weights(model, ThresholdScope(scope))))
    magnitudes = magnitudes[magnitudes > 0]
    midpoints = (magnitudes[:-1] + magnitudes[1:]) / 2.0
    return [0.0] + [float(m) for m in midpoints]


def _metric(name: str, model: NeuralDnfModel, dataset) -> float:
    x_real = dataset.x_real if model.predicates is not None else None
    y_pred = predict(model, dataset.x_bool, x_real, bivalent_conj=True)
    if name == 'accuracy':
        return accuracy(dataset.y, y_pred)
    return macro_f1(dataset.y, y_pred, dataset.task, dataset.n_outputs)


def sweep_tau(model: NeuralDnfModel, dataset, scope: ThresholdScope = ThresholdScope.MODEL,
              metric: str = 'macro_f1', candidates: Optional[List[float]] = None,
              workers: Optional[int] = None) -> ThresholdChoice:
    """
    Choose tau by evaluating every candidate on a dataset split.

    Args:
        model: Trained model
        dataset: Selection split (non-empty)
        scope: Threshold both layers or the disjunctive layer only
        metric: 'macro_f1' or 'accuracy'
        candidates: Explicit candidates (defaults to candidate_taus)
        workers: Worker threads for candidate evaluation

    Returns:
        Best choice; ties go to the smaller tau
    """
    if len(dataset) == 0:
        raise DomainError('tau selection needs a non-empty split')
    scope = ThresholdScope(scope)
    taus = sorted(candidates if candidates is not None else candidate_taus(model, scope))

    def run(tau: float) -> float:
        return _metric(metric, apply_threshold(model, tau, scope), dataset)

    with ThreadPoolExecutor(max_workers=worker_count(workers)) as pool:
        values = list(pool.map(run, taus))

    best = 0
    for k, value in enumerate(values):
        if value > values[best]:
            best = k
    table = pd.DataFrame({'tau': taus, metric: values})
    logger.info(f"Selected tau={taus[best]:.4g} ({metric}={values[best]:.4f}) from {len(taus)} candidates")
    return ThresholdChoice(tau=taus[best], scope=scope, metric=metric, value=values[best], table=table)


def zero_tau(model: NeuralDnfModel, dataset=None, scope: ThresholdScope = ThresholdScope.MODEL,
             metric: str = 'macro_f1') -> ThresholdChoice:
    """The fixed tau = 0 choice, scored on ``dataset`` when given."""
    scope = ThresholdScope(scope)
    value = _metric(metric, apply_threshold(model, 0.0, scope), dataset) if dataset is not None and len(dataset) else float('nan')
    return ThresholdChoice(tau=0.0, scope=scope, metric=metric, value=value)
