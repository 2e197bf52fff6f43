"""
Disentanglement of conjunctive nodes.

Each conjunctive node is replaced by lattice split nodes whose disjunction
reproduces its bivalent behaviour (or the behaviour of its negation, when the
node is used negatively downstream). The splits are reconnected to the
disjunctive layer with the original connecting weight, and the disjunctive
layer is then thresholded unless the head is mutex-tanh.

Nodes are read at delta = 1.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..config.settings import DEFAULT_BUDGET_SECS, DEFAULT_FAN_IN_CAP, worker_count
from ..errors import BudgetExceededError, ReconnectError
from ..evaluation.oracle import check_split_coverage, enumerate_truth_table, split_examples
from ..training.model import HeadKind, NeuralDnfModel
from .splits import (Polarity, SplitWeightSet, exclusion_to_tensor, prune_subsumed, relevant_set,
                     search_exclusion_sets, split_negative_naive, split_positive_naive)
from .threshold import ThresholdChoice, ThresholdScope, apply_threshold, sweep_tau, threshold_weights, zero_tau

logger = logging.getLogger(__name__)


@dataclass
class NodeProvenance:
    """
    What happened to one conjunctive node.

    Attributes:
        node: Row index in the (polarity-duplicated) input model
        origin: Original conjunctive node index
        polarity: Downstream usage
        examples: |X+| (positive) or |X-| (negative), None if not enumerated
        exclusion_sets: |E*| for the search path, None otherwise
        splits: Number of split tensors produced
        elapsed_ms: Wall-clock time spent on the node
        verdict: 'ok', 'violations=<n>', 'unverified', 'skipped', 'constant' or 'fallback'
    """

    node: int
    origin: int
    polarity: Polarity
    examples: Optional[int]
    exclusion_sets: Optional[int]
    splits: int
    elapsed_ms: float
    verdict: str

    def to_line(self) -> str:
        examples = '-' if self.examples is None else self.examples
        exclusion = '-' if self.exclusion_sets is None else self.exclusion_sets
        return (f"node={self.origin} row={self.node} polarity={self.polarity.value} examples={examples} "
                f"exclusion_sets={exclusion} splits={self.splits} elapsed_ms={self.elapsed_ms:.1f} "
                f"verify={self.verdict}")


def disentangle_node(weights_row: np.ndarray, polarity: Polarity = Polarity.POSITIVE,
                     budget_secs: Optional[float] = DEFAULT_BUDGET_SECS, node: Optional[int] = None,
                     method: str = 'search', fan_in_cap: int = DEFAULT_FAN_IN_CAP) -> SplitWeightSet:
    """
    Split one conjunctive node.

    Positive polarity uses the exclusion-set search (or, with ``method='naive'``,
    one tensor per positive example followed by subsumption pruning). Negative
    polarity builds one tensor per negative example and prunes subsumed ones.

    Args:
        weights_row: Node weights
        polarity: Downstream usage of the node
        budget_secs: Search budget in seconds
        node: Node index for errors and logs
        method: 'search' or 'naive' (positive polarity only)
        fan_in_cap: Enumeration cap for the example-based paths

    Returns:
        Subsumption-free split set

    Raises:
        BudgetExceededError: Search budget or enumeration cap exceeded
    """
    w = np.asarray(weights_row, dtype=float)
    polarity = Polarity(polarity)
    source = node if node is not None else 0

    if polarity is Polarity.POSITIVE:
        if not relevant_set(w).indices:
            return SplitWeightSet.empty(w.size, source, polarity)
        if method == 'search':
            exclusions = search_exclusion_sets(w, budget_secs=budget_secs, node=node)
            tensors = np.array([exclusion_to_tensor(w, e) for e in exclusions])
            return SplitWeightSet(tensors=tensors, source_node=source, polarity=polarity)
        examples = split_examples(enumerate_truth_table(w, 1.0, fan_in_cap, node=node))
        candidates = split_positive_naive(w, examples.positives)
    else:
        examples = split_examples(enumerate_truth_table(w, 1.0, fan_in_cap, node=node))
        candidates = split_negative_naive(w, examples.negatives)

    if len(candidates) == 0:
        return SplitWeightSet.empty(w.size, source, polarity)
    retained, _ = prune_subsumed(candidates)
    return SplitWeightSet(tensors=candidates[retained], source_node=source, polarity=polarity)


def reconnect(model: NeuralDnfModel, node_index: int, splits: SplitWeightSet) -> NeuralDnfModel:
    """
    Replace a conjunctive node by its split nodes.

    The node's row and column are replaced in place by one row/column per split.
    Each new column carries the original connecting weight, with its sign flipped
    for negative polarity. Empty splits drop the column entirely.

    Raises:
        ReconnectError: The node's downstream weights do not all match the polarity
    """
    column = model.disj.weights[:, node_index]
    polarity = Polarity(splits.polarity)
    if polarity is Polarity.POSITIVE and np.any(column < 0):
        raise ReconnectError(f"Node {node_index} is used negatively; split it with negative polarity")
    if polarity is Polarity.NEGATIVE and np.any(column > 0):
        raise ReconnectError(f"Node {node_index} is used positively; split it with positive polarity")

    k = len(splits)
    tensors = splits.tensors.reshape(k, model.n_atoms)
    new_column = np.abs(column)[:, None] * np.ones((1, k))

    result = model.copy()
    result.conj.weights = np.concatenate(
        [model.conj.weights[:node_index], tensors, model.conj.weights[node_index + 1:]], axis=0)
    result.disj.weights = np.concatenate(
        [model.disj.weights[:, :node_index], new_column, model.disj.weights[:, node_index + 1:]], axis=1)
    origin = model.conj_origin[node_index]
    negated = model.conj_negated[node_index] != (polarity is Polarity.NEGATIVE)
    result.conj_origin = model.conj_origin[:node_index] + [origin] * k + model.conj_origin[node_index + 1:]
    result.conj_negated = model.conj_negated[:node_index] + [negated] * k + model.conj_negated[node_index + 1:]
    return result


def split_by_usage(model: NeuralDnfModel) -> Tuple[NeuralDnfModel, List[Polarity]]:
    """
    Give every conjunctive node a single downstream polarity.

    Nodes used with both signs are duplicated (one copy per sign); nodes with no
    nonzero downstream weight are dropped.

    Returns:
        (model with one polarity per conjunctive row, polarity per row)
    """
    rows, columns, origins, negated, polarities = [], [], [], [], []
    for i in range(model.conj.out_nodes):
        column = model.disj.weights[:, i]
        for polarity, mask in ((Polarity.POSITIVE, column > 0), (Polarity.NEGATIVE, column < 0)):
            if not np.any(mask):
                continue
            rows.append(model.conj.weights[i])
            columns.append(np.where(mask, column, 0.0))
            origins.append(model.conj_origin[i])
            negated.append(model.conj_negated[i])
            polarities.append(polarity)
        if not np.any(column):
            logger.debug(f"Dropping dead conjunctive node {i}")

    result = model.copy()
    n_atoms = model.n_atoms
    result.conj.weights = np.array(rows).reshape(len(rows), n_atoms)
    result.disj.weights = np.array(columns).T.reshape(model.disj.out_nodes, len(rows))
    result.conj_origin = origins
    result.conj_negated = negated
    return result, polarities


def _disentangle_task(args) -> Tuple[Optional[SplitWeightSet], NodeProvenance]:
    index, row, origin, polarity, budget_secs, verify, fan_in_cap = args
    started = time.monotonic()
    relevant = relevant_set(row)

    if not relevant.indices and polarity is Polarity.NEGATIVE:
        return None, NodeProvenance(index, origin, polarity, None, None, 1, 0.0, 'constant')

    try:
        splits = disentangle_node(row, polarity, budget_secs=budget_secs, node=index, fan_in_cap=fan_in_cap)
    except BudgetExceededError as e:
        elapsed = (time.monotonic() - started) * 1000.0
        logger.warning(f"Node {index} fell back to thresholding: {e}")
        return None, NodeProvenance(index, origin, polarity, None, None, 1, elapsed, 'fallback')

    exclusion_sets = len(splits) if polarity is Polarity.POSITIVE and relevant.indices else None
    examples, verdict = None, 'unverified'
    if verify == 'enumerable':
        if len(relevant.indices) <= fan_in_cap:
            table = enumerate_truth_table(row, 1.0, fan_in_cap, node=index)
            positives = int(np.count_nonzero(table.bivalent))
            examples = positives if polarity is Polarity.POSITIVE else len(table.activations) - positives
            report = check_split_coverage(row, 1.0, splits, polarity, fan_in_cap)
            verdict = 'ok' if report.ok else f"violations={report.violation_count}"
        else:
            verdict = 'skipped'
    elapsed = (time.monotonic() - started) * 1000.0
    return splits, NodeProvenance(index, origin, polarity, examples, exclusion_sets, len(splits), elapsed, verdict)


def disentangle_model(model: NeuralDnfModel, budget_secs: Optional[float] = DEFAULT_BUDGET_SECS,
                      disj_tau: str = 'sweep', eval_dataset=None, metric: str = 'macro_f1',
                      verify: str = 'off', fan_in_cap: int = DEFAULT_FAN_IN_CAP,
                      workers: Optional[int] = None
                      ) -> Tuple[NeuralDnfModel, List[NodeProvenance], Optional[ThresholdChoice]]:
    """
    Disentangle every conjunctive node and discretise the disjunctive layer.

    Args:
        model: Trained model
        budget_secs: Per-node search budget
        disj_tau: 'zero' or 'sweep' for the disjunctive threshold
        eval_dataset: Split used to sweep the disjunctive tau
        metric: Sweep selection metric
        verify: 'off' or 'enumerable' (check every enumerable node against the oracle)
        fan_in_cap: Enumeration cap for verification and the negative path
        workers: Worker threads for per-node tasks

    Returns:
        (discretised model, provenance per node in row order, disjunctive threshold choice
        or None for mutex-tanh heads)
    """
    usage_model, polarities = split_by_usage(model)
    tasks = [(i, usage_model.conj.weights[i], usage_model.conj_origin[i], polarities[i],
              budget_secs, verify, fan_in_cap) for i in range(usage_model.conj.out_nodes)]

    with ThreadPoolExecutor(max_workers=worker_count(workers)) as pool:
        results = list(pool.map(_disentangle_task, tasks))

    for _, record in results:
        logger.info(record.to_line())

    result = usage_model.copy()
    result.conj.delta = 1.0
    for index in reversed(range(len(results))):
        splits, record = results[index]
        if splits is None:
            if record.verdict == 'fallback':
                result.conj.weights[index] = threshold_weights(result.conj.weights[index], 0.0)
            continue
        result = reconnect(result, index, splits)

    failures = sum(1 for _, record in results if record.verdict == 'fallback')
    if failures:
        logger.warning(f"{failures} of {len(results)} nodes fell back to thresholding")

    if model.head is HeadKind.MUTEX_TANH:
        return result, [record for _, record in results], None

    if disj_tau == 'sweep' and eval_dataset is not None and len(eval_dataset):
        choice = sweep_tau(result, eval_dataset, scope=ThresholdScope.DISJ, metric=metric, workers=workers)
    else:
        choice = zero_tau(result, eval_dataset, scope=ThresholdScope.DISJ, metric=metric)
    return apply_threshold(result, choice.tau, ThresholdScope.DISJ), [record for _, record in results], choice
