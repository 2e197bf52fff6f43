"""
Split weight sets and the exclusion-set search.

A conjunctive node with weights w is replaced by lattice tensors in {-6, 0, 6}^N
whose disjunction reproduces the node's bivalent behaviour. This module holds
the value types shared by the oracle and the disentangler, the naive per-example
splits, subsumption pruning, and the breadth-first search for maximal
exclusion sets.
"""

import logging
import math
import time
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import LATTICE_WEIGHT
from ..errors import BudgetExceededError, DomainError

logger = logging.getLogger(__name__)


class Polarity(str, Enum):
    POSITIVE = 'positive'
    NEGATIVE = 'negative'


@dataclass(frozen=True)
class RelevantSet:
    """
    Relevant and small-magnitude indices of one weights row.

    Attributes:
        indices: j with w_j != 0
        small_indices: j in indices with |w_j| < max|w| / 2
        small_positive: small indices with w_j > 0
        small_negative: small indices with w_j < 0
        half_max: max|w| / 2
    """

    indices: Tuple[int, ...]
    small_indices: Tuple[int, ...]
    small_positive: Tuple[int, ...]
    small_negative: Tuple[int, ...]
    half_max: float


@dataclass(frozen=True, order=True)
class ExclusionSet:
    indices: Tuple[int, ...]
    weight_sum: float = field(compare=False, default=0.0)


@dataclass
class SplitWeightSet:
    """
    Lattice tensors replacing one conjunctive node.

    Attributes:
        tensors: [K x N] array with entries in {-6, 0, 6}
        source_node: Index of the conjunctive node that was split
        polarity: How the node is used downstream
    """

    tensors: np.ndarray
    source_node: int = 0
    polarity: Polarity = Polarity.POSITIVE

    def __post_init__(self):
        self.tensors = np.asarray(self.tensors, dtype=float)
        if self.tensors.ndim == 1:
            self.tensors = self.tensors[None, :] if self.tensors.size else np.zeros((0, 0))

    def __len__(self) -> int:
        return self.tensors.shape[0]

    @classmethod
    def empty(cls, width: int, source_node: int = 0, polarity: Polarity = Polarity.POSITIVE) -> 'SplitWeightSet':
        return cls(tensors=np.zeros((0, width)), source_node=source_node, polarity=polarity)


def relevant_set(weights_row: np.ndarray) -> RelevantSet:
    w = np.asarray(weights_row, dtype=float)
    indices = tuple(int(j) for j in np.flatnonzero(w))
    half_max = float(np.abs(w).max()) / 2.0 if w.size else 0.0
    small = tuple(j for j in indices if abs(w[j]) < half_max)
    return RelevantSet(
        indices=indices,
        small_indices=small,
        small_positive=tuple(j for j in small if w[j] > 0),
        small_negative=tuple(j for j in small if w[j] < 0),
        half_max=half_max,
    )


def exclusion_weight(weights_row: np.ndarray, indices: Sequence[int]) -> float:
    """Exact sum of |w_j| over the given indices."""
    w = np.asarray(weights_row, dtype=float)
    return math.fsum(abs(float(w[j])) for j in indices)


def is_valid_exclusion(weights_row: np.ndarray, indices: Sequence[int],
                       relevant: Optional[RelevantSet] = None) -> bool:
    """An exclusion set is valid iff it lies in the small set and sum|w_E| < max|w| / 2."""
    relevant = relevant or relevant_set(weights_row)
    if not set(indices) <= set(relevant.small_indices):
        return False
    return exclusion_weight(weights_row, indices) < relevant.half_max


def search_exclusion_sets(weights_row: np.ndarray, budget_secs: Optional[float] = None,
                          node: Optional[int] = None) -> List[ExclusionSet]:
    """
    Breadth-first search for the maximal valid exclusion sets.

    The queue is seeded with the singletons of the small set. A dequeued set is
    extended by every single small index it lacks; valid extensions not seen
    before are queued, and a set with no valid extension is recorded as maximal.

    Args:
        weights_row: Node weights (nonzero somewhere)
        budget_secs: Wall-clock budget, None for unlimited
        node: Node index reported in budget errors

    Returns:
        Maximal exclusion sets sorted by index tuple; [empty set] when no weight is small

    Raises:
        BudgetExceededError: The budget ran out; ``partial`` holds the sets found so far
    """
    w = np.asarray(weights_row, dtype=float)
    relevant = relevant_set(w)
    if not relevant.indices:
        raise DomainError('cannot search exclusion sets of an all-zero node')
    if not relevant.small_indices:
        return [ExclusionSet(indices=(), weight_sum=0.0)]

    started = time.monotonic()
    queue: 'OrderedDict[FrozenSet[int], None]' = OrderedDict(
        (frozenset([j]), None) for j in relevant.small_indices)
    visited = set(queue)
    maximal: List[ExclusionSet] = []

    while queue:
        if budget_secs is not None and time.monotonic() - started > budget_secs:
            raise BudgetExceededError(
                f"Exclusion-set search exceeded {budget_secs}s budget", node=node,
                partial=sorted(maximal))
        current, _ = queue.popitem(last=False)
        extended = False
        for j in relevant.small_indices:
            if j in current:
                continue
            candidate = current | {j}
            if not is_valid_exclusion(w, candidate, relevant):
                continue
            extended = True
            if candidate not in visited:
                visited.add(candidate)
                queue[candidate] = None
        if not extended:
            indices = tuple(sorted(current))
            maximal.append(ExclusionSet(indices=indices, weight_sum=exclusion_weight(w, indices)))

    return sorted(maximal)


def exclusion_to_tensor(weights_row: np.ndarray, exclusion: ExclusionSet) -> np.ndarray:
    """6 * sign(w) on the relevant set minus the excluded indices, 0 elsewhere."""
    tensor = LATTICE_WEIGHT * np.sign(np.asarray(weights_row, dtype=float))
    tensor[list(exclusion.indices)] = 0.0
    return tensor


def split_positive_naive(weights_row: np.ndarray, positives: np.ndarray) -> np.ndarray:
    """
    One tensor per positive example: x_j * 1(x_j = sign(w_j)) * 6.

    Args:
        weights_row: Node weights
        positives: [P x N] bivalent inputs on which the node is true

    Returns:
        [P x N] tensors
    """
    signs = np.sign(np.asarray(weights_row, dtype=float))
    x = np.asarray(positives, dtype=float).reshape(-1, signs.size)
    return x * (x == signs) * LATTICE_WEIGHT


def split_negative_naive(weights_row: np.ndarray, negatives: np.ndarray) -> np.ndarray:
    """
    One tensor per negative example: x_j * 1(x_j != sign(w_j)) * 6 on the relevant set.

    Args:
        weights_row: Node weights
        negatives: [Q x N] bivalent inputs on which the node is false

    Returns:
        [Q x N] tensors, zero outside the relevant set
    """
    signs = np.sign(np.asarray(weights_row, dtype=float))
    x = np.asarray(negatives, dtype=float).reshape(-1, signs.size)
    return x * ((x != signs) & (signs != 0)) * LATTICE_WEIGHT


def subsumes(tensor_m: np.ndarray, tensor_n: np.ndarray) -> bool:
    """
    True iff m's literals are a strict nonempty subset of n's with the same signs.
    """
    m = np.asarray(tensor_m)
    n = np.asarray(tensor_n)
    support_m = np.count_nonzero(m)
    support_n = np.count_nonzero(n)
    if not 0 < support_m < support_n:
        return False
    return bool(np.all((m == 0) | (m == n)))


def prune_subsumed(tensors: np.ndarray) -> Tuple[List[int], Dict[int, int]]:
    """
    Drop duplicates and subsumed tensors.

    Args:
        tensors: [K x N] lattice tensors

    Returns:
        (retained indices in input order, map from each dropped index to a retained
        index that subsumes or duplicates it)
    """
    tensors = np.asarray(tensors)
    support = np.count_nonzero(tensors, axis=1) if len(tensors) else np.zeros(0, dtype=int)
    order = sorted(range(len(tensors)), key=lambda k: (support[k], k))
    retained: List[int] = []
    dropped: Dict[int, int] = {}
    for k in order:
        if retained:
            kept = tensors[retained]
            # duplicates, or strict nonempty sub-bodies with matching signs
            covers = np.all((kept == 0) | (kept == tensors[k]), axis=1) & (
                (support[retained] > 0) | np.all(kept == tensors[k], axis=1))
            hits = np.flatnonzero(covers)
            if hits.size:
                dropped[k] = retained[int(hits[0])]
                continue
        retained.append(k)
    return sorted(retained), dropped
