"""
Synthetic boolean networks.

A network maps the gene states at time t to the states at t+1. Each gene's
update function is a DNF over the time-t states, written in the rule dialect
(``l_k :- a_j, not a_i.``). Learning the network is a multilabel task with one
label per gene.
"""

import logging
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DatasetError
from ..evaluation.oracle import enumerate_inputs
from ..logic.program import LogicProgram, Rule, emit_asp, eval_program_batch, parse_asp
from ..training.model import TaskKind
from .loader import Dataset

logger = logging.getLogger(__name__)

_GENE_ATOM = re.compile(r'^[al]_(\d+)$')

# Full enumeration is used below this many genes when no sample count is given
MAX_ENUMERATED_GENES = 16


@dataclass(frozen=True)
class BooleanNetworkSpec:
    """
    Ground-truth update functions of a boolean network.

    Attributes:
        n_genes: Number of genes
        program: One or more rules ``l_k :- ...`` per gene over atoms ``a_0..a_{n-1}``;
            genes without rules are constant false
        text: Canonical rule text of the program
    """

    n_genes: int
    program: LogicProgram
    text: str


def _gene_index(atom: str) -> int:
    match = _GENE_ATOM.match(atom)
    if not match:
        raise DatasetError(f"Unexpected atom {atom!r} in network spec")
    return int(match.group(1))


def parse_network_spec(text: str, n_genes: Optional[int] = None) -> BooleanNetworkSpec:
    """
    Parse a network spec written in the rule dialect.

    Args:
        text: Rules ``l_k :- a_j, not a_i.``; a fact ``l_k.`` makes gene k constant true
        n_genes: Number of genes (inferred from the largest index when None)

    Returns:
        Validated spec with label heads l_0..l_{n-1}

    Raises:
        DatasetError: Heads other than l_k, body atoms other than a_j, or indices out of range
    """
    try:
        program = parse_asp(text)
    except ValueError as e:
        raise DatasetError(f"Malformed network spec: {e}") from e

    indices = []
    for rule in program.rules:
        if not rule.head.startswith('l_'):
            raise DatasetError(f"Network rules must have gene heads l_k, got {rule.head}")
        indices.append(_gene_index(rule.head))
        for atom in rule.pos_body + rule.neg_body:
            if not atom.startswith('a_'):
                raise DatasetError(f"Network rule bodies range over a_j, got {atom}")
            indices.append(_gene_index(atom))

    inferred = max(indices) + 1 if indices else 0
    n_genes = inferred if n_genes is None else n_genes
    if n_genes < 1 or inferred > n_genes:
        raise DatasetError(f"Network spec uses gene index {inferred - 1} but has {n_genes} genes")

    program.label_heads = [f"l_{k}" for k in range(n_genes)]
    return BooleanNetworkSpec(n_genes=n_genes, program=program, text=emit_asp(program))


def generate_boolean_network(spec: BooleanNetworkSpec, seed: int = 0, samples: Optional[int] = None,
                             name: Optional[str] = None) -> Dataset:
    """
    Build the transition dataset of a network.

    Args:
        spec: Network spec
        seed: Seed for sampled states
        samples: Number of sampled time-t states; all 2^n states (in truth-table
            order) when None
        name: Dataset name

    Returns:
        Multilabel dataset: features are time-t states in {-1, 1}, labels the
        time-(t+1) states in {0, 1}; the spec text is kept as ground truth
    """
    n = spec.n_genes
    if samples is None:
        if n > MAX_ENUMERATED_GENES:
            raise DatasetError(f"{n} genes are too many to enumerate; pass a sample count")
        states = enumerate_inputs(n)
    else:
        rng = np.random.default_rng(seed)
        states = rng.choice(np.array([-1.0, 1.0]), size=(samples, n))

    inputs = {f"a_{j}": states[:, j] > 0 for j in range(n)}
    labels = eval_program_batch(spec.program, inputs).astype(int)

    dataset = Dataset(name=name or f"boolean_network_{n}", x_bool=states, x_real=np.zeros((len(states), 0)),
                      y=labels, task=TaskKind.MULTILABEL,
                      feature_names=[f"a_{j}" for j in range(n)],
                      label_names=list(spec.program.label_heads), ground_truth=spec.text)
    logger.info(f"Generated {len(dataset)} transitions of a {n}-gene network")
    return dataset


def random_boolean_network(n_genes: int, seed: int = 0, max_rules: int = 2, max_literals: int = 3) -> BooleanNetworkSpec:
    """
    Draw a random ground-truth network.

    Every gene gets 1..max_rules rules; each rule reads 1..max_literals distinct
    genes (sorted), each negated with probability 1/2.

    Args:
        n_genes: Number of genes
        seed: Seed for the draw
        max_rules: Upper bound on rules per gene
        max_literals: Upper bound on body literals per rule

    Returns:
        Network spec
    """
    if n_genes < 1:
        raise DatasetError('a network needs at least one gene')
    rng = np.random.default_rng(seed)
    program = LogicProgram(label_heads=[f"l_{k}" for k in range(n_genes)])
    for k in range(n_genes):
        for _ in range(int(rng.integers(1, max_rules + 1))):
            width = int(rng.integers(1, min(max_literals, n_genes) + 1))
            parents = np.sort(rng.choice(n_genes, size=width, replace=False))
            negate = rng.random(width) < 0.5
            program.rules.append(Rule(head=f"l_{k}",
                                      pos_body=tuple(f"a_{j}" for j, neg in zip(parents, negate) if not neg),
                                      neg_body=tuple(f"a_{j}" for j, neg in zip(parents, negate) if neg)))
    spec = BooleanNetworkSpec(n_genes=n_genes, program=program, text=emit_asp(program))
    logger.debug(f"Random {n_genes}-gene network:\n{spec.text}")
    return spec
