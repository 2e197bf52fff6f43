"""
Exhaustive truth-table oracles.

Every discretisation claim in the toolkit is checked here by brute force: a
node's soft-valued truth table is enumerated over all bivalent assignments of
its relevant inputs, and split weight sets are checked against the resulting
positive and negative example sets.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..config.settings import DEFAULT_FAN_IN_CAP, LATTICE_WEIGHT, MAX_REPORTED_VIOLATIONS, worker_count
from ..core.semisym import bias, lattice_raw
from ..discretise.splits import (ExclusionSet, Polarity, SplitWeightSet, exclusion_weight,
                                 is_valid_exclusion, relevant_set)
from ..errors import BudgetExceededError

logger = logging.getLogger(__name__)

# Rows per enumeration chunk handed to a worker
CHUNK_ROWS = 1 << 16


@dataclass(frozen=True)
class SoftTruthTable:
    """
    Activations of one node over every bivalent assignment of its relevant inputs.

    Rows are ordered with +1 before -1 per input, leftmost input most significant,
    so the first row is the all-true assignment.
    """

    weights_row: np.ndarray
    delta_signed: float
    relevant: Tuple[int, ...]
    inputs: np.ndarray
    activations: np.ndarray

    @property
    def fan_in(self) -> int:
        return len(self.relevant)

    @property
    def width(self) -> int:
        return int(np.asarray(self.weights_row).size)

    @property
    def bivalent(self) -> np.ndarray:
        return self.activations > 0

    @property
    def rows(self) -> List[Tuple[Tuple[float, ...], float, bool]]:
        return [(tuple(x), float(a), bool(a > 0)) for x, a in zip(self.inputs, self.activations)]

    def full_inputs(self, fill: float = 1.0) -> np.ndarray:
        """Inputs expanded to the node's full width; irrelevant positions get ``fill``."""
        full = np.full((self.inputs.shape[0], self.width), fill, dtype=float)
        full[:, list(self.relevant)] = self.inputs
        return full


@dataclass(frozen=True)
class ExampleSets:
    """Full-width positive and negative inputs of a node."""

    positives: np.ndarray
    negatives: np.ndarray
    relevant: Tuple[int, ...]


@dataclass
class CoverageReport:
    """
    Result of a coverage check.

    Attributes:
        polarity: Which example set the splits must cover
        checked: Number of inputs checked
        violation_count: Total violations found
        violations: Up to MAX_REPORTED_VIOLATIONS (input, reason) pairs
    """

    polarity: Polarity
    checked: int = 0
    violation_count: int = 0
    violations: List[Tuple[Tuple[float, ...], str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.violation_count == 0

    def add(self, x: np.ndarray, reason: str) -> None:
        self.violation_count += 1
        if len(self.violations) < MAX_REPORTED_VIOLATIONS:
            self.violations.append((tuple(float(v) for v in x), reason))


def _enumerate_chunk(fan_in: int, start: int, stop: int) -> np.ndarray:
    codes = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(fan_in - 1, -1, -1, dtype=np.int64)
    bits = (codes[:, None] >> shifts[None, :]) & 1
    return 1.0 - 2.0 * bits


def enumerate_inputs(fan_in: int) -> np.ndarray:
    """All of {-1, 1}^fan_in in truth-table order: +1 first, most significant input first."""
    return _enumerate_chunk(fan_in, 0, 1 << fan_in)


def enumerate_truth_table(weights_row: np.ndarray, delta_signed: float = 1.0,
                          fan_in_cap: int = DEFAULT_FAN_IN_CAP, node: Optional[int] = None,
                          workers: Optional[int] = None) -> SoftTruthTable:
    """
    Build the soft-valued truth table of one node.

    Args:
        weights_row: Node weights
        delta_signed: Signed delta
        fan_in_cap: Largest relevant-set size that may be enumerated
        node: Node index reported in budget errors
        workers: Worker threads for chunked enumeration (capped by NDNF_THREADS)

    Returns:
        Complete table over {-1, 1}^|J|
    """
    w = np.asarray(weights_row, dtype=float)
    relevant = tuple(int(j) for j in np.flatnonzero(w))
    fan_in = len(relevant)
    if fan_in > fan_in_cap:
        raise BudgetExceededError(
            f"Node {node if node is not None else '?'} has fan-in {fan_in} above the cap of {fan_in_cap}",
            node=node)

    total = 1 << fan_in
    bounds = [(start, min(start + CHUNK_ROWS, total)) for start in range(0, total, CHUNK_ROWS)]
    if len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=worker_count(workers)) as pool:
            chunks = list(pool.map(lambda b: _enumerate_chunk(fan_in, *b), bounds))
    else:
        chunks = [_enumerate_chunk(fan_in, *bounds[0])]
    inputs = np.concatenate(chunks, axis=0)

    raw = inputs @ w[list(relevant)] + bias(w, delta_signed)
    return SoftTruthTable(weights_row=w.copy(), delta_signed=float(delta_signed), relevant=relevant,
                          inputs=inputs, activations=np.tanh(raw))


def split_examples(table: SoftTruthTable) -> ExampleSets:
    """Partition a table's full-width inputs by their bivalent value."""
    full = table.full_inputs()
    mask = table.bivalent
    return ExampleSets(positives=full[mask], negatives=full[~mask], relevant=table.relevant)


def _as_tensors(splits: Union[SplitWeightSet, Sequence[np.ndarray], np.ndarray], width: int) -> np.ndarray:
    tensors = splits.tensors if isinstance(splits, SplitWeightSet) else np.asarray(splits, dtype=float)
    if tensors.size == 0:
        return np.zeros((0, width))
    return np.atleast_2d(tensors)


def check_split_coverage(weights_row: np.ndarray, delta_signed: float,
                         splits: Union[SplitWeightSet, Sequence[np.ndarray], np.ndarray],
                         polarity: Polarity = Polarity.POSITIVE,
                         fan_in_cap: int = DEFAULT_FAN_IN_CAP) -> CoverageReport:
    """
    Check that split tensors fire exactly on the required example set.

    For positive polarity every positive input must make some split raw equal 6 and
    every negative input must leave all splits at raw <= -6. Negative polarity swaps
    the roles of the two sets.

    Args:
        weights_row: Original node weights
        delta_signed: Original node's signed delta
        splits: Split tensors
        polarity: Which example set the splits stand for
        fan_in_cap: Enumeration cap

    Returns:
        Coverage report; violations are data, not exceptions
    """
    table = enumerate_truth_table(weights_row, delta_signed, fan_in_cap)
    examples = split_examples(table)
    tensors = _as_tensors(splits, table.width)

    if polarity is Polarity.POSITIVE:
        required, forbidden = examples.positives, examples.negatives
    else:
        required, forbidden = examples.negatives, examples.positives

    report = CoverageReport(polarity=Polarity(polarity), checked=len(required) + len(forbidden))
    if len(tensors):
        fires_required = np.isclose(lattice_raw(tensors, required), LATTICE_WEIGHT).any(axis=1)
        fires_forbidden = (lattice_raw(tensors, forbidden) > -LATTICE_WEIGHT + 1e-9).any(axis=1)
    else:
        fires_required = np.zeros(len(required), dtype=bool)
        fires_forbidden = np.zeros(len(forbidden), dtype=bool)
    for x in required[~fires_required]:
        report.add(x, 'uncovered')
    for x in forbidden[fires_forbidden]:
        report.add(x, 'spurious')
    return report


def exhaustive_exclusion_sets(weights_row: np.ndarray) -> List[ExclusionSet]:
    """
    Maximal valid exclusion sets by brute force over every subset of the small set.

    Uses the same validity test as the breadth-first search.
    """
    w = np.asarray(weights_row, dtype=float)
    relevant = relevant_set(w)
    small = relevant.small_indices
    if not small:
        return [ExclusionSet(indices=(), weight_sum=0.0)]

    maximal = []
    for size in range(1, len(small) + 1):
        for subset in itertools.combinations(small, size):
            if not is_valid_exclusion(w, subset, relevant):
                continue
            if any(is_valid_exclusion(w, subset + (j,), relevant) for j in small if j not in subset):
                continue
            indices = tuple(sorted(subset))
            maximal.append(ExclusionSet(indices=indices, weight_sum=exclusion_weight(w, indices)))
    return sorted(maximal)


def truth_table_frame(table: SoftTruthTable) -> pd.DataFrame:
    columns = [f"x{j + 1}" for j in table.relevant]
    frame = pd.DataFrame(table.inputs.astype(int), columns=columns)
    frame['activation'] = np.round(table.activations, 3)
    frame['bivalent'] = np.where(table.bivalent, 'T', 'F')
    return frame


def render_truth_table(table: SoftTruthTable, fmt: str = 'text') -> str:
    """
    Render a truth table as aligned text or CSV.

    Args:
        table: Table to render
        fmt: 'text' or 'csv'

    Returns:
        Rendered table ending in a newline
    """
    frame = truth_table_frame(table)
    if fmt == 'csv':
        return frame.to_csv(index=False, float_format='%.3f', lineterminator='\n')
    text = frame.to_string(index=False, formatters={'activation': lambda v: f"{v:.3f}"})
    return text + '\n'
