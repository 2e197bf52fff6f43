"""
Validated configuration models.

Config files are plain key/value text (``KEY=value`` per line, ``#`` comments),
read with python-dotenv and validated here. Keys are case-insensitive and
each key belongs to exactly one of the models below.
"""

import logging
from typing import Any, Dict, List, Literal, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.predicates import TemperatureSchedule
from ..core.semisym import DeltaSchedule
from .settings import DEFAULT_BUDGET_SECS, DEFAULT_FAN_IN_CAP

logger = logging.getLogger(__name__)


def _split_csv(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(',') if item.strip()]
    return value


class TrainConfig(BaseModel):
    """Optimiser, schedule and architecture settings for one training run."""

    model_config = ConfigDict(extra='forbid')

    epochs: int = Field(300, ge=1)
    learning_rate: float = Field(0.1, ge=0.0)
    batch_size: int = Field(32, ge=1)
    momentum: float = Field(0.9, ge=0.0, lt=1.0)
    aux_weight_lambda: float = Field(0.1, ge=0.0)
    conj_pm1_lambda: float = Field(0.1, ge=0.0)
    delta_initial: float = Field(0.1, gt=0.0, le=1.0)
    delta_step: float = Field(0.1, ge=0.0)
    delta_every: int = Field(10, ge=1)
    temperature_start: float = Field(1.0, ge=0.1, le=1.0)
    temperature_end: float = Field(0.1, ge=0.1, le=1.0)
    temperature_decay_epochs: Optional[int] = Field(None, ge=1)
    n_conjunctions: int = Field(12, ge=1)
    predicates_per_feature: int = Field(4, ge=1)
    seed: int = 0
    log_every: int = Field(50, ge=1)

    @model_validator(mode='after')
    def _temperature_decreases(self) -> 'TrainConfig':
        if self.temperature_end > self.temperature_start:
            raise ValueError('temperature_end must not exceed temperature_start')
        return self

    @property
    def delta_schedule(self) -> DeltaSchedule:
        return DeltaSchedule(initial=self.delta_initial, step_size=self.delta_step,
                             step_every=self.delta_every)

    @property
    def temperature_schedule(self) -> TemperatureSchedule:
        return TemperatureSchedule(start=self.temperature_start, end=self.temperature_end,
                                   decay_epochs=self.temperature_decay_epochs or self.epochs)


class DatasetConfig(BaseModel):
    """Where the data comes from and how its columns are interpreted."""

    model_config = ConfigDict(extra='forbid')

    dataset: Literal['csv', 'boolean_network', 'monk'] = 'boolean_network'
    path: Optional[str] = None
    task: Literal['binary', 'multiclass', 'multilabel'] = 'multilabel'
    label_columns: List[str] = Field(default_factory=list)
    categorical_columns: List[str] = Field(default_factory=list)
    real_columns: List[str] = Field(default_factory=list)
    boolean_columns: List[str] = Field(default_factory=list)
    split_column: Optional[str] = None
    predicate_invention: bool = True
    genes: int = Field(5, ge=1)
    network_seed: int = 0
    samples: Optional[int] = Field(None, ge=1)
    val_fraction: float = Field(0.0, ge=0.0, lt=1.0)
    test_fraction: float = Field(0.0, ge=0.0, lt=1.0)

    _split_lists = field_validator('label_columns', 'categorical_columns', 'real_columns', 'boolean_columns',
                                   mode='before')(_split_csv)

    @model_validator(mode='after')
    def _path_required(self) -> 'DatasetConfig':
        if self.dataset in ('csv', 'monk') and not self.path:
            raise ValueError(f"dataset={self.dataset} requires a path")
        if self.dataset == 'csv' and not self.label_columns:
            raise ValueError('dataset=csv requires label_columns')
        return self


class ExperimentConfig(BaseModel):
    """A full experiment: dataset, training settings, seeds and discretisation options."""

    model_config = ConfigDict(extra='forbid')

    name: str = 'experiment'
    train: TrainConfig = Field(default_factory=TrainConfig)
    data: DatasetConfig = Field(default_factory=DatasetConfig)
    seeds: List[int] = Field(default_factory=lambda: [0, 1, 2, 3, 4])
    thresh_tau: Literal['zero', 'sweep'] = 'sweep'
    disj_tau: Literal['zero', 'sweep'] = 'sweep'
    selection_metric: Literal['macro_f1', 'accuracy'] = 'macro_f1'
    eval_split: str = 'all'
    budget_secs: float = Field(DEFAULT_BUDGET_SECS, gt=0.0)
    fan_in_cap: int = Field(DEFAULT_FAN_IN_CAP, ge=1)
    verify: Literal['off', 'enumerable'] = 'off'

    _split_seeds = field_validator('seeds', mode='before')(_split_csv)

    @field_validator('seeds')
    @classmethod
    def _seeds_nonempty(cls, seeds: List[int]) -> List[int]:
        if not seeds:
            raise ValueError('at least one seed is required')
        return seeds


def _route(values: Dict[str, Any]) -> Dict[str, Any]:
    """Sort flat keys into the nested ExperimentConfig layout."""
    train_keys = set(TrainConfig.model_fields)
    data_keys = set(DatasetConfig.model_fields)
    top_keys = set(ExperimentConfig.model_fields) - {'train', 'data'}

    routed: Dict[str, Any] = {'train': {}, 'data': {}}
    for key, value in values.items():
        name = key.lower()
        if value is None or value == '':
            continue
        if name in train_keys:
            routed['train'][name] = value
        elif name in data_keys:
            routed['data'][name] = value
        elif name in top_keys:
            routed[name] = value
        else:
            raise ValueError(f"Unknown config key: {key}")
    return routed


def load_experiment_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    Load and validate an experiment config file.

    Args:
        path: Key/value config file; defaults are used when None
        overrides: Flat key/value pairs applied after the file (e.g. CLI flags)

    Returns:
        Validated experiment configuration
    """
    values: Dict[str, Any] = dict(dotenv_values(path)) if path else {}
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    config = ExperimentConfig(**_route(values))
    logger.debug(f"Loaded config {config.name} from {path or '<defaults>'}")
    return config
