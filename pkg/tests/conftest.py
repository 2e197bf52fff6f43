import numpy as np
import pytest

from ndnf_rules.config.schema import TrainConfig
from ndnf_rules.core.semisym import NodeKind, SemiSymbolicLayer
from ndnf_rules.data.loader import Dataset
from ndnf_rules.evaluation.oracle import enumerate_inputs, enumerate_truth_table
from ndnf_rules.training.model import NeuralDnfModel, TaskKind

# The entangled conjunctive node used throughout the docs
EXAMPLE_NODE = np.array([-6.0, -2.0, -2.0, 2.0, -6.0])

# Its three disentangled rules, as lattice tensors
EXAMPLE_SPLITS = np.array([
    [-6.0, 0.0, -6.0, 6.0, -6.0],
    [-6.0, -6.0, 0.0, 6.0, -6.0],
    [-6.0, -6.0, -6.0, 0.0, -6.0],
])


def random_node(rng: np.random.Generator, fan_in: int, zero_fraction: float = 0.3) -> np.ndarray:
    """Weights uniform in [-6, 6] with random zeroing; never all zero."""
    while True:
        w = rng.uniform(-6.0, 6.0, fan_in)
        w[rng.random(fan_in) < zero_fraction] = 0.0
        if np.any(w):
            return w


def node_model(weights_row, disj_weight: float = 6.0, task: TaskKind = TaskKind.BINARY) -> NeuralDnfModel:
    """One conjunctive node feeding one disjunctive node."""
    conj = SemiSymbolicLayer(NodeKind.CONJUNCTIVE, np.atleast_2d(weights_row), 1.0)
    disj = SemiSymbolicLayer(NodeKind.DISJUNCTIVE, [[disj_weight]], 1.0)
    return NeuralDnfModel(conj=conj, disj=disj, task=task)


def truth_table_dataset(weights_row) -> Dataset:
    """Every bivalent input of a node, labelled with the node's bivalent value."""
    w = np.asarray(weights_row, dtype=float)
    table = enumerate_truth_table(w, 1.0)
    x = enumerate_inputs(w.size)
    assert table.fan_in == w.size
    return Dataset(name='truth_table', x_bool=x, x_real=np.zeros((len(x), 0)),
                   y=table.bivalent.astype(int), task=TaskKind.BINARY)


@pytest.fixture
def example_node():
    return EXAMPLE_NODE.copy()


@pytest.fixture
def example_dataset():
    return truth_table_dataset(EXAMPLE_NODE)


@pytest.fixture
def conjunction_dataset():
    """Label = a_0 and not a_1 over all four assignments of two inputs."""
    x = enumerate_inputs(2)
    y = ((x[:, 0] > 0) & (x[:, 1] < 0)).astype(int)
    return Dataset(name='conjunction', x_bool=x, x_real=np.zeros((4, 0)), y=y, task=TaskKind.BINARY)


@pytest.fixture
def small_train_config():
    return TrainConfig(epochs=5, learning_rate=0.05, batch_size=4, momentum=0.9, n_conjunctions=4, seed=0)
