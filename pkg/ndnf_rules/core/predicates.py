"""
Threshold-learning predicate invention.

Each real feature i gets m learnable thresholds t_ij; the predicate activation is
p_ij = tanh((x_i - t_ij) / T) and reads bivalently as ``feature_i > t_ij``.
Predicate atoms are numbered k = i * m + j.
"""

import logging
import re
from dataclasses import dataclass
from typing import List

import numpy as np

from ..errors import DomainError, InputShapeError

logger = logging.getLogger(__name__)

MIN_TEMPERATURE = 0.1
MAX_TEMPERATURE = 1.0

_PREDICATE_LINE = re.compile(r'^a_(\d+)\s*=\s*feature_(\d+)\s*>\s*(\S+)\s*$')


@dataclass(frozen=True)
class TemperatureSchedule:
    """Linear decay from start to end over decay_epochs epochs."""

    start: float = 1.0
    end: float = 0.1
    decay_epochs: int = 100


@dataclass(frozen=True)
class PredicateDef:
    """One interpreted threshold predicate: a_atom = feature_feature > threshold."""

    atom: int
    feature: int
    threshold: float

    def to_line(self) -> str:
        return f"a_{self.atom} = feature_{self.feature} > {float(self.threshold)!r}"


@dataclass
class ThresholdPredicateBank:
    """
    Learnable thresholds for the real-valued features.

    Attributes:
        thresholds: [R x m] thresholds in feature units
        temperature: Current temperature in [0.1, 1]
    """

    thresholds: np.ndarray
    temperature: float = 1.0

    def __post_init__(self):
        self.thresholds = np.array(self.thresholds, dtype=float, ndmin=2)
        _check_temperature(self.temperature)

    @property
    def n_features(self) -> int:
        return self.thresholds.shape[0]

    @property
    def per_feature(self) -> int:
        return self.thresholds.shape[1]

    @property
    def width(self) -> int:
        return self.thresholds.size

    @classmethod
    def from_data(cls, x_real: np.ndarray, per_feature: int = 4, temperature: float = 1.0) -> 'ThresholdPredicateBank':
        """Initialise thresholds at evenly spaced quantiles of the training features."""
        x_real = np.asarray(x_real, dtype=float)
        quantiles = np.arange(1, per_feature + 1) / (per_feature + 1)
        thresholds = np.quantile(x_real, quantiles, axis=0).T
        return cls(thresholds=thresholds, temperature=temperature)

    def copy(self) -> 'ThresholdPredicateBank':
        return ThresholdPredicateBank(thresholds=self.thresholds.copy(), temperature=self.temperature)


def _check_temperature(temperature: float) -> None:
    if not MIN_TEMPERATURE - 1e-12 <= temperature <= MAX_TEMPERATURE + 1e-12:
        raise DomainError(f"temperature must lie in [0.1, 1], got {temperature}")


def invent(bank: ThresholdPredicateBank, x_real: np.ndarray) -> np.ndarray:
    """
    Predicate activations for a batch of real feature vectors.

    Args:
        bank: Threshold bank
        x_real: [B x R] (or [R]) real features

    Returns:
        [B x R*m] (or [R*m]) activations in (-1, 1)
    """
    _check_temperature(bank.temperature)
    x = np.asarray(x_real, dtype=float)
    single = x.ndim == 1
    x = x[None, :] if single else x
    if x.shape[1] != bank.n_features:
        raise InputShapeError(f"expected {bank.n_features} real features, got {x.shape[1]}")
    p = np.tanh((x[:, :, None] - bank.thresholds[None, :, :]) / bank.temperature)
    p = p.reshape(x.shape[0], bank.width)
    return p[0] if single else p


def invent_backward(bank: ThresholdPredicateBank, x_real: np.ndarray, upstream_grad: np.ndarray) -> np.ndarray:
    """
    Gradient of a loss with respect to the thresholds.

    Args:
        bank: Threshold bank
        x_real: Inputs used in the forward pass
        upstream_grad: dL/dp, shaped like invent's output

    Returns:
        [R x m] gradient (dp/dt = -(1 - p^2) / T)
    """
    p = np.atleast_2d(invent(bank, x_real))
    upstream = np.atleast_2d(np.asarray(upstream_grad, dtype=float))
    local = -(1.0 - p ** 2) / bank.temperature
    grad = (upstream * local).sum(axis=0)
    return grad.reshape(bank.n_features, bank.per_feature)


def interpret(bank: ThresholdPredicateBank, i: int, j: int) -> str:
    """Render predicate (i, j) as ``a_k = feature_i > t``."""
    return PredicateDef(atom=i * bank.per_feature + j, feature=i,
                        threshold=float(bank.thresholds[i, j])).to_line()


def predicate_defs(bank: ThresholdPredicateBank) -> List[PredicateDef]:
    """All predicate definitions in atom order."""
    return [PredicateDef(atom=i * bank.per_feature + j, feature=i, threshold=float(bank.thresholds[i, j]))
            for i in range(bank.n_features) for j in range(bank.per_feature)]


def parse_predicate(line: str) -> PredicateDef:
    """Parse a line produced by interpret; the threshold round-trips bit-exactly."""
    match = _PREDICATE_LINE.match(line.strip())
    if not match:
        raise ValueError(f"Not a predicate definition: {line!r}")
    return PredicateDef(atom=int(match.group(1)), feature=int(match.group(2)),
                        threshold=float(match.group(3)))


def step_temperature(schedule: TemperatureSchedule, epoch: int) -> float:
    """
    Temperature for a given epoch.

    Epoch 0 gives start and epoch decay_epochs - 1 gives end; values are clamped
    to [0.1, 1].
    """
    if epoch < 0:
        raise DomainError('epoch must be non-negative')
    span = max(schedule.decay_epochs - 1, 1)
    fraction = min(epoch / span, 1.0)
    value = schedule.start + (schedule.end - schedule.start) * fraction
    return float(np.clip(round(value, 12), MIN_TEMPERATURE, MAX_TEMPERATURE))
