"""
Semi-symbolic node math.

A semi-symbolic node computes

    raw = sum_i w_i x_i + delta * (max_i |w_i| - sum_i |w_i|)
    out = tanh(raw)

and is read bivalently as true iff out > 0. The signed delta is +|delta| for
conjunctive nodes and -|delta| for disjunctive nodes. All functions here are
pure numpy over value types; the trainer owns every mutation.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np

from ..config.settings import LATTICE_WEIGHT
from ..errors import DomainError, InputShapeError

logger = logging.getLogger(__name__)


class NodeKind(str, Enum):
    CONJUNCTIVE = 'conjunctive'
    DISJUNCTIVE = 'disjunctive'

    @property
    def delta_sign(self) -> float:
        return 1.0 if self is NodeKind.CONJUNCTIVE else -1.0


@dataclass(frozen=True)
class Activation:
    """Pre-activation and tanh output of a bank of nodes (any leading batch shape)."""

    raw: np.ndarray
    out: np.ndarray

    @property
    def bivalent(self) -> np.ndarray:
        return self.out > 0


@dataclass
class SemiSymbolicLayer:
    """
    A bank of semi-symbolic nodes of one kind.

    Attributes:
        kind: Conjunctive or disjunctive
        weights: [out_nodes x in_features] weight matrix
        delta: Magnitude of delta in [0, 1]; the sign comes from kind
    """

    kind: NodeKind
    weights: np.ndarray
    delta: float = 1.0

    def __post_init__(self):
        self.weights = np.array(self.weights, dtype=float, ndmin=2)
        if self.weights.ndim != 2:
            raise InputShapeError(f"weights must be 2-D, got shape {self.weights.shape}")
        if not np.all(np.isfinite(self.weights)):
            raise DomainError('weights must be finite')
        if not 0.0 <= self.delta <= 1.0:
            raise DomainError(f"delta magnitude must lie in [0, 1], got {self.delta}")

    @property
    def out_nodes(self) -> int:
        return self.weights.shape[0]

    @property
    def in_features(self) -> int:
        return self.weights.shape[1]

    @property
    def delta_signed(self) -> float:
        return self.kind.delta_sign * self.delta

    def copy(self) -> 'SemiSymbolicLayer':
        return SemiSymbolicLayer(kind=self.kind, weights=self.weights.copy(), delta=self.delta)


@dataclass(frozen=True)
class DeltaSchedule:
    """Piecewise-constant delta ramp, clamped at cap."""

    initial: float = 0.1
    step_size: float = 0.1
    step_every: int = 10
    cap: float = field(default=1.0)

    def __post_init__(self):
        if not 0.0 < self.initial <= 1.0:
            raise DomainError(f"initial delta must lie in (0, 1], got {self.initial}")
        if self.step_every < 1:
            raise DomainError('step_every must be at least 1')
        if self.step_size < 0:
            raise DomainError('step_size must be non-negative')


def bias(weights_row: np.ndarray, delta_signed: float) -> float:
    """
    Dynamic bias of a single node.

    Args:
        weights_row: Node weights
        delta_signed: Signed delta (+ for conjunctions, - for disjunctions)

    Returns:
        delta * (max|w| - sum|w|); 0 for an empty or all-zero row
    """
    magnitudes = np.abs(np.asarray(weights_row, dtype=float))
    if magnitudes.size == 0:
        return 0.0
    return float(delta_signed * (magnitudes.max() - magnitudes.sum()))


def layer_bias(weights: np.ndarray, delta_signed: float) -> np.ndarray:
    """Dynamic bias for every row of a weight matrix."""
    magnitudes = np.abs(weights)
    if magnitudes.shape[1] == 0:
        return np.zeros(magnitudes.shape[0])
    return delta_signed * (magnitudes.max(axis=1) - magnitudes.sum(axis=1))


def _as_batch(layer: SemiSymbolicLayer, x: np.ndarray) -> Tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    batch = x[None, :] if single else x
    if batch.ndim != 2 or batch.shape[1] != layer.in_features:
        raise InputShapeError(f"expected {layer.in_features} input features, got shape {x.shape}")
    if not np.all(np.isfinite(batch)):
        raise DomainError('inputs must be finite')
    if np.any(np.abs(batch) > 1.0):
        raise DomainError('inputs must lie in [-1, 1]')
    return batch, single


def forward(layer: SemiSymbolicLayer, x: np.ndarray) -> Activation:
    """
    Forward pass of a semi-symbolic layer.

    Args:
        layer: Layer to evaluate
        x: Input vector [in_features] or batch [B x in_features], values in [-1, 1]

    Returns:
        Activation with raw/out shaped [out_nodes] or [B x out_nodes]
    """
    batch, single = _as_batch(layer, x)
    raw = batch @ layer.weights.T + layer_bias(layer.weights, layer.delta_signed)
    if single:
        raw = raw[0]
    return Activation(raw=raw, out=np.tanh(raw))


def backward(layer: SemiSymbolicLayer, x: np.ndarray, upstream_grad: np.ndarray,
             through_tanh: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact gradients of the forward map.

    The max|w| term is differentiated through the lowest-index argmax only and
    sign(0) = 0, so all-zero rows get a finite (pure linear) gradient.

    Args:
        layer: Layer evaluated in the forward pass
        x: Inputs used in the forward pass
        upstream_grad: dL/dout (or dL/draw when through_tanh is False)
        through_tanh: Apply the tanh chain rule

    Returns:
        (grad_weights [out_nodes x in_features], grad_x shaped like x)
    """
    batch, single = _as_batch(layer, x)
    upstream = np.asarray(upstream_grad, dtype=float)
    upstream = upstream[None, :] if upstream.ndim == 1 else upstream
    if upstream.shape != (batch.shape[0], layer.out_nodes):
        raise InputShapeError(f"upstream gradient shape {upstream.shape} does not match outputs")

    if through_tanh:
        out = forward(layer, batch).out
        grad_raw = upstream * (1.0 - out ** 2)
    else:
        grad_raw = upstream

    signs = np.sign(layer.weights)
    bias_grad = -signs
    if layer.in_features:
        rows = np.arange(layer.out_nodes)
        top = np.argmax(np.abs(layer.weights), axis=1)
        bias_grad[rows, top] += signs[rows, top]

    grad_weights = grad_raw.T @ batch + layer.delta_signed * grad_raw.sum(axis=0)[:, None] * bias_grad
    grad_x = grad_raw @ layer.weights
    return grad_weights, (grad_x[0] if single else grad_x)


def mutex_tanh_head(raw: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Mutually exclusive class head.

    Args:
        raw: Disjunctive pre-activations [C] or [B x C], C >= 2

    Returns:
        (probs on the simplex, out = 2 * probs - 1)
    """
    raw = np.asarray(raw, dtype=float)
    if raw.shape[-1] < 2:
        raise InputShapeError('mutex-tanh needs at least two classes')
    shifted = raw - raw.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    probs = exp / exp.sum(axis=-1, keepdims=True)
    return probs, 2.0 * probs - 1.0


def step_delta(schedule: DeltaSchedule, epoch: int) -> float:
    """Delta magnitude for a given epoch (non-decreasing, clamped at the cap)."""
    if epoch < 0:
        raise DomainError('epoch must be non-negative')
    value = schedule.initial + (epoch // schedule.step_every) * schedule.step_size
    # rounding keeps 0.1-step ramps on exact decimals
    return min(schedule.cap, round(value, 12))


def lattice_raw(tensor: np.ndarray, x: np.ndarray) -> np.ndarray:
    """
    Raw output of discretised conjunctive nodes under bivalent inputs.

    A tensor in {-6, 0, 6}^N fires iff the result equals 6 and is fully off
    iff it equals -6. The all-zero tensor is an empty body and always fires.

    Args:
        tensor: One tensor [N] or a stack [K x N]
        x: Inputs [N] or [B x N]

    Returns:
        Raw values shaped by the broadcast of x and tensor
    """
    tensor = np.asarray(tensor, dtype=float)
    x = np.asarray(x, dtype=float)
    return x @ tensor.T + LATTICE_WEIGHT - np.abs(tensor).sum(axis=-1)


def force_bivalent(out: np.ndarray) -> np.ndarray:
    """Map activations to +/-1 (true iff strictly positive)."""
    return np.where(np.asarray(out) > 0, 1.0, -1.0)
