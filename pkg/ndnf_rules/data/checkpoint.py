"""
Model checkpoints.

Checkpoints are versioned JSON. Floats are stored as their shortest round-trip
decimal strings (``repr``), so a loaded model is bit-identical to the saved one
on every platform.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from ..config.schema import TrainConfig
from ..config.settings import CHECKPOINT_FORMAT_VERSION
from ..core.predicates import ThresholdPredicateBank
from ..core.semisym import NodeKind, SemiSymbolicLayer
from ..errors import CheckpointError
from ..training.model import NeuralDnfModel, TaskKind
from ..training.trainer import OptimiserState, TrainRun
from ..utils.helpers import load_json, save_json

logger = logging.getLogger(__name__)


@dataclass
class ModelCheckpoint:
    """
    A model plus the state needed to resume or reproduce it.

    Attributes:
        model: Model weights, deltas, head and predicate bank
        config: Training configuration, when the model was trained
        epoch: Completed epochs (the schedules' position)
        seed: Seed the run started from
        rng_state: Bit-generator state of the run's random stream
        velocities: Momentum buffers
        metadata: Free-form facts about the run (dataset name, feature names, ...)
        version: Checkpoint format version
    """

    model: NeuralDnfModel
    config: Optional[TrainConfig] = None
    epoch: int = 0
    seed: Optional[int] = None
    rng_state: Optional[Dict[str, Any]] = None
    velocities: Dict[str, np.ndarray] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)
    version: int = CHECKPOINT_FORMAT_VERSION


def _encode_array(array: np.ndarray) -> Dict[str, Any]:
    array = np.asarray(array, dtype=float)
    return {'shape': list(array.shape), 'values': [repr(float(v)) for v in array.ravel()]}


def _decode_array(data: Dict[str, Any]) -> np.ndarray:
    values = np.array([float(v) for v in data['values']], dtype=float)
    return values.reshape(data['shape'])


def _encode_layer(layer: SemiSymbolicLayer) -> Dict[str, Any]:
    return {'kind': layer.kind.value, 'weights': _encode_array(layer.weights), 'delta': repr(float(layer.delta))}


def _decode_layer(data: Dict[str, Any]) -> SemiSymbolicLayer:
    return SemiSymbolicLayer(NodeKind(data['kind']), _decode_array(data['weights']), float(data['delta']))


def model_to_dict(model: NeuralDnfModel) -> Dict[str, Any]:
    predicates = None
    if model.predicates is not None:
        predicates = {'thresholds': _encode_array(model.predicates.thresholds),
                      'temperature': repr(float(model.predicates.temperature))}
    return {
        'task': model.task.value,
        'conj': _encode_layer(model.conj),
        'disj': _encode_layer(model.disj),
        'predicates': predicates,
        'conj_origin': [int(i) for i in model.conj_origin],
        'conj_negated': [bool(b) for b in model.conj_negated],
    }


def model_from_dict(data: Dict[str, Any]) -> NeuralDnfModel:
    predicates = None
    if data.get('predicates') is not None:
        predicates = ThresholdPredicateBank(thresholds=_decode_array(data['predicates']['thresholds']),
                                            temperature=float(data['predicates']['temperature']))
    return NeuralDnfModel(conj=_decode_layer(data['conj']), disj=_decode_layer(data['disj']),
                          task=TaskKind(data['task']), predicates=predicates,
                          conj_origin=list(data['conj_origin']), conj_negated=list(data['conj_negated']))


def checkpoint_from_run(run: TrainRun, metadata: Optional[Dict[str, Any]] = None) -> ModelCheckpoint:
    """Snapshot a training run."""
    return ModelCheckpoint(
        model=run.model.copy(),
        config=run.config,
        epoch=run.epoch,
        seed=run.config.seed,
        rng_state=run.rng.bit_generator.state,
        velocities={name: v.copy() for name, v in run.optimiser.velocities.items()},
        metadata=dict(metadata or {}),
    )


def resume_run(checkpoint: ModelCheckpoint) -> TrainRun:
    """
    Rebuild a TrainRun that continues exactly where the checkpoint left off.

    Raises:
        CheckpointError: The checkpoint has no training configuration
    """
    if checkpoint.config is None:
        raise CheckpointError('checkpoint has no training configuration to resume from')
    rng = np.random.default_rng(checkpoint.seed)
    if checkpoint.rng_state is not None:
        rng.bit_generator.state = checkpoint.rng_state
    return TrainRun(model=checkpoint.model.copy(), config=checkpoint.config,
                    optimiser=OptimiserState({k: v.copy() for k, v in checkpoint.velocities.items()}),
                    rng=rng, epoch=checkpoint.epoch)


def save_checkpoint(checkpoint: ModelCheckpoint, path: str) -> None:
    """
    Write a checkpoint as JSON.

    Args:
        checkpoint: Checkpoint to save
        path: Output file
    """
    data = {
        'format_version': checkpoint.version,
        'model': model_to_dict(checkpoint.model),
        'config': checkpoint.config.model_dump() if checkpoint.config is not None else None,
        'epoch': checkpoint.epoch,
        'seed': checkpoint.seed,
        'rng_state': checkpoint.rng_state,
        'velocities': {name: _encode_array(v) for name, v in checkpoint.velocities.items()},
        'metadata': checkpoint.metadata,
    }
    save_json(data, path)
    logger.info(f"Checkpoint saved to {path} (epoch {checkpoint.epoch})")


def load_checkpoint(path: str) -> ModelCheckpoint:
    """
    Read a checkpoint written by save_checkpoint.

    Raises:
        CheckpointError: Unreadable file, unknown format version or malformed content
    """
    try:
        data = load_json(path)
    except (OSError, ValueError) as e:
        raise CheckpointError(f"Cannot read checkpoint {path}: {e}") from e

    version = data.get('format_version')
    if version != CHECKPOINT_FORMAT_VERSION:
        raise CheckpointError(f"Unsupported checkpoint format version {version!r} in {path}")

    try:
        config = TrainConfig(**data['config']) if data.get('config') is not None else None
        checkpoint = ModelCheckpoint(
            model=model_from_dict(data['model']),
            config=config,
            epoch=int(data.get('epoch', 0)),
            seed=data.get('seed'),
            rng_state=data.get('rng_state'),
            velocities={name: _decode_array(v) for name, v in data.get('velocities', {}).items()},
            metadata=data.get('metadata', {}),
            version=version,
        )
    except (KeyError, TypeError, ValueError) as e:
        logger.error(f"Malformed checkpoint {path}: {e}")
        raise CheckpointError(f"Malformed checkpoint {path}: {e}") from e
    logger.debug(f"Checkpoint loaded from {path}")
    return checkpoint
