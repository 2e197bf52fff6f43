"""
Data loader module for the neural DNF toolkit.

This module provides the Dataset container and loaders for CSV files and the
UCI Monk problems.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..errors import DatasetError
from ..training.model import TaskKind

logger = logging.getLogger(__name__)

# Level counts of the six Monk attributes
MONK_LEVELS = (3, 3, 2, 3, 4, 2)


@dataclass
class Dataset:
    """
    Features, labels and split tags.

    Attributes:
        name: Dataset name
        x_bool: [n x F] features in [-1, 1] (one-hot categoricals are +/-1)
        x_real: [n x R] raw real features for threshold predicates (R may be 0)
        y: Binary [n] in {0, 1}, multiclass [n] class indices, multilabel [n x L] in {0, 1}
        task: Task kind
        splits: [n] split tag per row
        feature_names: Names of the x_bool columns
        real_names: Names of the x_real columns
        label_names: Label column names (or class names for multiclass)
        categories: Levels of every one-hot encoded column, for encoding later files
        ground_truth: Rule text of the generating program, when known
    """

    name: str
    x_bool: np.ndarray
    x_real: np.ndarray
    y: np.ndarray
    task: TaskKind
    splits: np.ndarray = None
    feature_names: List[str] = field(default_factory=list)
    real_names: List[str] = field(default_factory=list)
    label_names: List[str] = field(default_factory=list)
    categories: Dict[str, List[str]] = field(default_factory=dict)
    ground_truth: Optional[str] = None

    def __post_init__(self):
        self.task = TaskKind(self.task)
        n = self.x_bool.shape[0]
        x_real = np.asarray(self.x_real, dtype=float)
        if x_real.ndim == 2:
            self.x_real = x_real
        elif x_real.size == 0:
            self.x_real = np.zeros((n, 0))
        else:
            self.x_real = x_real.reshape(len(x_real), -1)
        if self.splits is None:
            self.splits = np.array(['train'] * n, dtype=object)
        if self.x_real.shape[0] != n or self.y.shape[0] != n or len(self.splits) != n:
            raise DatasetError(f"Dataset {self.name}: inconsistent row counts")
        if self.task is TaskKind.MULTILABEL and self.y.ndim != 2:
            raise DatasetError('multilabel labels must be a 2-D indicator matrix')
        if self.task is not TaskKind.MULTILABEL and self.y.ndim != 1:
            raise DatasetError(f"{self.task.value} labels must be a vector")

    def __len__(self) -> int:
        return int(self.x_bool.shape[0])

    @property
    def n_outputs(self) -> int:
        if self.task is TaskKind.BINARY:
            return 1
        if self.task is TaskKind.MULTILABEL:
            return int(self.y.shape[1])
        return max(len(self.label_names), int(self.y.max(initial=0)) + 1)

    def subset(self, tag: str) -> 'Dataset':
        """Rows with the given split tag; 'all' returns the whole dataset."""
        if tag == 'all':
            return self
        mask = self.splits == tag
        return replace(self, x_bool=self.x_bool[mask], x_real=self.x_real[mask], y=self.y[mask],
                       splits=self.splits[mask])

    def has_split(self, tag: str) -> bool:
        return bool(np.any(self.splits == tag))


def assign_splits(dataset: Dataset, seed: int, val_fraction: float = 0.0, test_fraction: float = 0.0) -> Dataset:
    """
    Randomly tag rows as train/val/test.

    Args:
        dataset: Dataset to split
        seed: Seed for the permutation
        val_fraction: Fraction of rows tagged 'val'
        test_fraction: Fraction of rows tagged 'test'

    Returns:
        Copy of the dataset with new split tags
    """
    if val_fraction + test_fraction >= 1.0:
        raise DatasetError('val_fraction + test_fraction must be below 1')
    n = len(dataset)
    order = np.random.default_rng(seed).permutation(n)
    n_test = int(round(n * test_fraction))
    n_val = int(round(n * val_fraction))
    splits = np.array(['train'] * n, dtype=object)
    splits[order[:n_test]] = 'test'
    splits[order[n_test:n_test + n_val]] = 'val'
    return replace(dataset, splits=splits)


def _truthy(series: pd.Series, column: str) -> np.ndarray:
    values = series.astype(str).str.strip().str.lower()
    mapping = {'1': True, 'true': True, 't': True, 'yes': True,
               '0': False, '-1': False, 'false': False, 'f': False, 'no': False}
    unknown = sorted(set(values) - set(mapping))
    if unknown:
        raise DatasetError(f"Column {column} has non-boolean values {unknown[:5]}")
    return values.map(mapping).to_numpy(dtype=bool)


def _one_hot(series: pd.Series, column: str, levels: Optional[List[str]]) -> Tuple[np.ndarray, List[str]]:
    values = series.astype(str).str.strip()
    known = levels if levels is not None else sorted(values.unique())
    encoded = -np.ones((len(values), len(known)))
    index = {level: k for k, level in enumerate(known)}
    unknown = 0
    for row, value in enumerate(values):
        k = index.get(value)
        if k is None:
            unknown += 1
        else:
            encoded[row, k] = 1.0
    if unknown:
        logger.warning(f"Column {column}: {unknown} rows with unseen categories encoded as all -1")
    return encoded, known


def _labels(frame: pd.DataFrame, label_columns: Sequence[str], task: TaskKind) -> Tuple[np.ndarray, List[str]]:
    if (frame[list(label_columns)].astype(str).apply(lambda s: s.str.strip()) == "").any().any():
        raise DatasetError('missing label values')
    if task is TaskKind.MULTILABEL:
        y = np.stack([_truthy(frame[c], c) for c in label_columns], axis=1).astype(int)
        return y, list(label_columns)
    if len(label_columns) != 1:
        raise DatasetError(f"{task.value} tasks take exactly one label column")
    column = label_columns[0]
    values = frame[column].astype(str).str.strip()
    if task is TaskKind.BINARY:
        levels = sorted(values.unique())
        try:
            return _truthy(frame[column], column).astype(int), [column]
        except DatasetError:
            if len(levels) != 2:
                raise DatasetError(f"Binary label {column} has {len(levels)} levels")
            return (values == levels[1]).to_numpy(dtype=int), [column]
    classes = sorted(values.unique())
    index = {c: k for k, c in enumerate(classes)}
    return values.map(index).to_numpy(dtype=int), classes


def load_csv(path: str, label_columns: Sequence[str], task: TaskKind = TaskKind.BINARY,
             categorical_columns: Optional[Sequence[str]] = None, real_columns: Optional[Sequence[str]] = None,
             boolean_columns: Optional[Sequence[str]] = None, split_column: Optional[str] = None,
             predicate_invention: bool = True, categories: Optional[Dict[str, List[str]]] = None,
             name: Optional[str] = None) -> Dataset:
    """
    Load a CSV file with a header row.

    Columns not named as real, boolean, label or split columns are treated as
    categorical and one-hot encoded to +/-1. Real columns are kept raw for
    threshold predicates, or standardised and clipped to [-1, 1] when predicate
    invention is off.

    Args:
        path: CSV file
        label_columns: Label column(s)
        task: Task kind
        categorical_columns: Explicit categorical columns
        real_columns: Real-valued columns
        boolean_columns: Columns already boolean (0/1, -1/1, true/false), encoded as one +/-1 feature
        split_column: Column holding train/val/test tags
        predicate_invention: Keep real columns raw for threshold predicates
        categories: Category levels from a training file (unseen levels become all -1)
        name: Dataset name (defaults to the path)

    Returns:
        Dataset
    """
    task = TaskKind(task)
    try:
        frame = pd.read_csv(path, dtype=str, skipinitialspace=True, keep_default_na=False)
    except pd.errors.ParserError as e:
        logger.error(f"Error parsing {path}: {e}")
        raise DatasetError(f"Malformed CSV {path}: {e}") from e

    if frame.isna().any().any():
        raise DatasetError(f"Ragged rows in {path}")

    missing = [c for c in list(label_columns) + list(real_columns or []) + list(boolean_columns or [])
               if c not in frame.columns]
    if missing:
        raise DatasetError(f"Columns not found in {path}: {missing}")

    real_columns = list(real_columns or [])
    boolean_columns = list(boolean_columns or [])
    reserved = set(label_columns) | set(real_columns) | set(boolean_columns) | ({split_column} if split_column else set())
    categorical = list(categorical_columns) if categorical_columns else [c for c in frame.columns if c not in reserved]

    blocks, names, levels_out = [], [], {}
    for column in frame.columns:
        if column in boolean_columns:
            blocks.append(np.where(_truthy(frame[column], column), 1.0, -1.0)[:, None])
            names.append(column)
        elif column in categorical:
            encoded, levels = _one_hot(frame[column], column, (categories or {}).get(column))
            blocks.append(encoded)
            names.extend(f"{column}={level}" for level in levels)
            levels_out[column] = levels

    try:
        x_real = frame[real_columns].to_numpy(dtype=float) if real_columns else np.zeros((len(frame), 0))
    except ValueError as e:
        raise DatasetError(f"Non-numeric value in real columns of {path}: {e}") from e
    real_names = list(real_columns)
    if real_columns and not predicate_invention:
        std = x_real.std(axis=0)
        scaled = (x_real - x_real.mean(axis=0)) / np.where(std > 0, std, 1.0)
        blocks.append(np.clip(scaled, -1.0, 1.0))
        names.extend(real_columns)
        x_real, real_names = np.zeros((len(frame), 0)), []

    x_bool = np.concatenate(blocks, axis=1) if blocks else np.zeros((len(frame), 0))
    y, label_names = _labels(frame, label_columns, task)
    splits = (frame[split_column].astype(str).str.strip().to_numpy(dtype=object)
              if split_column else None)

    dataset = Dataset(name=name or path, x_bool=x_bool, x_real=x_real, y=y, task=task, splits=splits,
                      feature_names=names, real_names=real_names, label_names=label_names,
                      categories=levels_out)
    logger.info(f"Loaded {len(dataset)} rows from {path}: {x_bool.shape[1]} boolean and "
                f"{x_real.shape[1]} real features")
    return dataset


def load_monk(path: str, split: str = 'train', name: Optional[str] = None) -> Dataset:
    """
    Load a UCI Monk problem file.

    Lines hold the class, six attribute values and an id, whitespace separated.
    Attributes are one-hot encoded against their fixed level counts, so train and
    test files share the same 17 features.
    """
    try:
        frame = pd.read_csv(path, sep=r'\s+', header=None)
    except (pd.errors.ParserError, OSError) as e:
        logger.error(f"Error loading Monk file {path}: {e}")
        raise DatasetError(f"Cannot read Monk file {path}: {e}") from e
    if frame.shape[1] < 7:
        raise DatasetError(f"Monk file {path} has {frame.shape[1]} columns, expected 8")

    blocks, names = [], []
    for attribute, levels in enumerate(MONK_LEVELS):
        values = frame.iloc[:, attribute + 1].to_numpy(dtype=int)
        if values.min() < 1 or values.max() > levels:
            raise DatasetError(f"Monk attribute a{attribute + 1} out of range in {path}")
        block = -np.ones((len(frame), levels))
        block[np.arange(len(frame)), values - 1] = 1.0
        blocks.append(block)
        names.extend(f"a{attribute + 1}={level}" for level in range(1, levels + 1))

    y = frame.iloc[:, 0].to_numpy(dtype=int)
    dataset = Dataset(name=name or path, x_bool=np.concatenate(blocks, axis=1), x_real=np.zeros((len(frame), 0)),
                      y=y, task=TaskKind.BINARY, splits=np.array([split] * len(frame), dtype=object),
                      feature_names=names, label_names=['class'])
    logger.info(f"Loaded {len(dataset)} Monk rows from {path}")
    return dataset


def save_csv(dataset: Dataset, path: str) -> None:
    """Write boolean features and labels as 0/1 columns plus the split tag."""
    frame = pd.DataFrame((dataset.x_bool > 0).astype(int), columns=dataset.feature_names or
                         [f"x{j}" for j in range(dataset.x_bool.shape[1])])
    for j, column in enumerate(dataset.real_names):
        frame[column] = dataset.x_real[:, j]
    labels = dataset.y if dataset.y.ndim == 2 else dataset.y[:, None]
    label_names = dataset.label_names if dataset.task is not TaskKind.MULTICLASS else ['class']
    for j, column in enumerate(label_names):
        frame[column] = labels[:, j]
    frame['split'] = dataset.splits
    frame.to_csv(path, index=False, lineterminator='\n')
    logger.debug(f"Dataset {dataset.name} saved to {path}")
