"""
Training loop for neural DNF models.

Losses:
    task      BCE on (out + 1) / 2 for binary/multilabel, CE on mutex-tanh probs for multiclass
    aux       mean |w| * |6 - |w|| over all conjunctive and disjunctive weights
    conj_pm1  mean (1 - out^2) over conjunctive activations

Optimisation is mini-batch SGD with momentum; delta and temperature schedules
advance once per epoch.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..config.schema import TrainConfig
from ..config.settings import LATTICE_WEIGHT
from ..core.predicates import ThresholdPredicateBank, invent_backward, step_temperature
from ..core.semisym import backward, step_delta
from ..errors import TrainingDivergedError
from ..evaluation.metrics import macro_f1
from .model import NeuralDnfModel, TaskKind, forward_model, predict

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LossBreakdown:
    task_loss: float
    aux_weight: float
    aux_conj_pm1: float
    total: float


@dataclass
class Gradients:
    conj: np.ndarray
    disj: np.ndarray
    thresholds: Optional[np.ndarray] = None


@dataclass
class OptimiserState:
    """Momentum buffers keyed by parameter name."""

    velocities: Dict[str, np.ndarray] = field(default_factory=dict)


@dataclass
class TrainRun:
    """
    Everything needed to continue training a model.

    Attributes:
        model: Model being trained
        config: Training configuration
        optimiser: Momentum buffers
        rng: Random stream (shuffling); resumed runs continue it
        epoch: Number of completed epochs
        history: One record per completed epoch
    """

    model: NeuralDnfModel
    config: TrainConfig
    optimiser: OptimiserState = field(default_factory=OptimiserState)
    rng: np.random.Generator = field(default_factory=np.random.default_rng)
    epoch: int = 0
    history: List[Dict[str, Any]] = field(default_factory=list)


def aux_weight_loss(model: NeuralDnfModel) -> float:
    """Mean of |w| * |6 - |w|| over all layer weights."""
    weights = np.concatenate([model.conj.weights.ravel(), model.disj.weights.ravel()])
    if weights.size == 0:
        return 0.0
    magnitudes = np.abs(weights)
    return float(np.mean(magnitudes * np.abs(LATTICE_WEIGHT - magnitudes)))


def _aux_weight_grad(weights: np.ndarray, count: int) -> np.ndarray:
    magnitudes = np.abs(weights)
    d_magnitude = np.abs(LATTICE_WEIGHT - magnitudes) + magnitudes * np.sign(magnitudes - LATTICE_WEIGHT)
    return np.sign(weights) * d_magnitude / count


def aux_conj_pm1_loss(conj_activations: np.ndarray) -> float:
    """Mean of (1 - out^2); 0 for an empty batch."""
    out = np.asarray(conj_activations, dtype=float)
    if out.size == 0:
        return 0.0
    return float(np.mean(1.0 - out ** 2))


def task_loss(model: NeuralDnfModel, raw: np.ndarray, y: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Task loss and its gradient with respect to the disjunctive raw outputs.

    Args:
        model: Model (selects BCE or CE)
        raw: [B x O] disjunctive pre-activations
        y: Binary [B], multilabel [B x L] in {0, 1}, or multiclass [B] class indices

    Returns:
        (loss, dL/draw)
    """
    if model.task is TaskKind.MULTICLASS:
        labels = np.asarray(y, dtype=int)
        shifted = raw - raw.max(axis=1, keepdims=True)
        log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        log_probs = shifted - log_norm
        batch = raw.shape[0]
        loss = -float(np.mean(log_probs[np.arange(batch), labels]))
        grad = np.exp(log_probs)
        grad[np.arange(batch), labels] -= 1.0
        return loss, grad / batch

    targets = np.asarray(y, dtype=float).reshape(raw.shape)
    logits = 2.0 * raw
    loss = float(np.mean(np.logaddexp(0.0, logits) - targets * logits))
    probs = 0.5 * (1.0 + np.tanh(raw))
    return loss, 2.0 * (probs - targets) / raw.size


def loss_and_gradients(model: NeuralDnfModel, x_bool: np.ndarray, y: np.ndarray, config: TrainConfig,
                       x_real: Optional[np.ndarray] = None) -> Tuple[LossBreakdown, Gradients]:
    """
    Full loss on one batch and its exact gradients.

    Args:
        model: Model to differentiate
        x_bool: [B x F] boolean features
        y: Labels for the batch
        config: Supplies the auxiliary loss weights
        x_real: [B x R] real features when the model has predicates

    Returns:
        (LossBreakdown, Gradients)
    """
    output = forward_model(model, x_bool, x_real)
    loss_task, grad_raw = task_loss(model, output.disj.raw, y)
    aux_w = aux_weight_loss(model)
    aux_pm1 = aux_conj_pm1_loss(output.conj.out)
    total = loss_task + config.aux_weight_lambda * aux_w + config.conj_pm1_lambda * aux_pm1

    grad_disj, grad_conj_out = backward(model.disj, output.conj_input, grad_raw, through_tanh=False)
    if output.conj.out.size:
        grad_conj_out = grad_conj_out + config.conj_pm1_lambda * (-2.0 * output.conj.out / output.conj.out.size)
    grad_conj, grad_atoms = backward(model.conj, output.atoms, grad_conj_out)

    n_weights = model.conj.weights.size + model.disj.weights.size
    if n_weights and config.aux_weight_lambda:
        grad_conj = grad_conj + config.aux_weight_lambda * _aux_weight_grad(model.conj.weights, n_weights)
        grad_disj = grad_disj + config.aux_weight_lambda * _aux_weight_grad(model.disj.weights, n_weights)

    grad_thresholds = None
    if model.predicates is not None:
        grad_thresholds = invent_backward(model.predicates, x_real, grad_atoms[:, :model.n_predicates])

    breakdown = LossBreakdown(task_loss=loss_task, aux_weight=aux_w, aux_conj_pm1=aux_pm1, total=total)
    return breakdown, Gradients(conj=grad_conj, disj=grad_disj, thresholds=grad_thresholds)


def _sgd_step(run: TrainRun, name: str, param: np.ndarray, grad: np.ndarray) -> None:
    velocity = run.optimiser.velocities.get(name)
    velocity = grad.copy() if velocity is None else run.config.momentum * velocity + grad
    run.optimiser.velocities[name] = velocity
    param -= run.config.learning_rate * velocity


def start_run(model: NeuralDnfModel, config: TrainConfig, rng: Optional[np.random.Generator] = None) -> TrainRun:
    """Wrap a model in a fresh TrainRun seeded from the config."""
    return TrainRun(model=model, config=config, rng=rng or np.random.default_rng(config.seed))


def apply_schedules(run: TrainRun) -> None:
    """Set delta and temperature for the run's current epoch."""
    delta = step_delta(run.config.delta_schedule, run.epoch)
    run.model.conj.delta = delta
    run.model.disj.delta = delta
    if run.model.predicates is not None:
        run.model.predicates.temperature = step_temperature(run.config.temperature_schedule, run.epoch)


def train_epoch(run: TrainRun, dataset, config: Optional[TrainConfig] = None
                ) -> Tuple[NeuralDnfModel, LossBreakdown, Dict[str, float]]:
    """
    One pass of mini-batch SGD.

    Args:
        run: Training state, updated in place
        dataset: Training data (a data.loader.Dataset)
        config: Overrides run.config for this epoch

    Returns:
        (model, loss on the whole dataset after the epoch, metrics)

    Raises:
        TrainingDivergedError: A batch loss or gradient became non-finite
    """
    if config is not None:
        run.config = config
    apply_schedules(run)
    model = run.model
    n = len(dataset)
    order = run.rng.permutation(n)
    batch_size = run.config.batch_size

    for start in range(0, n, batch_size):
        idx = order[start:start + batch_size]
        x_real = dataset.x_real[idx] if model.predicates is not None else None
        breakdown, grads = loss_and_gradients(model, dataset.x_bool[idx], dataset.y[idx], run.config, x_real)
        parts = [grads.conj, grads.disj] + ([grads.thresholds] if grads.thresholds is not None else [])
        if not np.isfinite(breakdown.total) or not all(np.all(np.isfinite(g)) for g in parts):
            raise TrainingDivergedError(run.epoch)
        _sgd_step(run, 'conj', model.conj.weights, grads.conj)
        _sgd_step(run, 'disj', model.disj.weights, grads.disj)
        if grads.thresholds is not None:
            _sgd_step(run, 'thresholds', model.predicates.thresholds, grads.thresholds)

    x_real = dataset.x_real if model.predicates is not None else None
    breakdown, _ = loss_and_gradients(model, dataset.x_bool, dataset.y, run.config, x_real)
    if not np.isfinite(breakdown.total):
        raise TrainingDivergedError(run.epoch)

    metrics = {'macro_f1': macro_f1(dataset.y, predict(model, dataset.x_bool, x_real), model.task)}
    run.history.append({
        'epoch': run.epoch,
        'delta': model.conj.delta,
        'temperature': model.predicates.temperature if model.predicates is not None else np.nan,
        'task_loss': breakdown.task_loss,
        'aux_weight': breakdown.aux_weight,
        'aux_conj_pm1': breakdown.aux_conj_pm1,
        'total': breakdown.total,
        'macro_f1': metrics['macro_f1'],
    })
    logger.debug(f"Epoch {run.epoch}: total={breakdown.total:.4f} task={breakdown.task_loss:.4f} "
                 f"aux={breakdown.aux_weight:.4f} pm1={breakdown.aux_conj_pm1:.4f}")
    run.epoch += 1
    return model, breakdown, metrics


def train(run: TrainRun, dataset, epochs: Optional[int] = None, progress: bool = True) -> pd.DataFrame:
    """
    Train for a number of epochs.

    Args:
        run: Training state, updated in place
        dataset: Training data
        epochs: Epochs to run (defaults to the remaining configured epochs)
        progress: Show a tqdm progress bar

    Returns:
        Per-epoch history as a DataFrame
    """
    epochs = epochs if epochs is not None else max(run.config.epochs - run.epoch, 0)
    started = time.time()
    logger.info(f"Training for {epochs} epochs on {len(dataset)} samples")

    for _ in tqdm(range(epochs), desc='Training', disable=not progress):
        _, breakdown, metrics = train_epoch(run, dataset)
        if run.epoch % run.config.log_every == 0:
            logger.info(f"Epoch {run.epoch}/{run.config.epochs}: loss={breakdown.total:.4f} "
                        f"macro_f1={metrics['macro_f1']:.3f} delta={run.model.conj.delta:.2f}")

    logger.info(f"Training finished in {time.time() - started:.1f}s")
    return pd.DataFrame(run.history)


def build_model(dataset, config: TrainConfig, rng: np.random.Generator) -> NeuralDnfModel:
    """
    Initialise a model sized for a dataset.

    Real features get a threshold predicate bank initialised at training-set quantiles.
    """
    predicates = None
    if dataset.x_real.shape[1]:
        predicates = ThresholdPredicateBank.from_data(
            dataset.x_real, per_feature=config.predicates_per_feature,
            temperature=config.temperature_start)
    return NeuralDnfModel.initialise(
        n_boolean=dataset.x_bool.shape[1],
        task=dataset.task,
        n_outputs=dataset.n_outputs,
        n_conjunctions=config.n_conjunctions,
        rng=rng,
        predicates=predicates,
        delta=config.delta_initial,
    )
