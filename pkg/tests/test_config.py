from pydantic import ValidationError
from pytest import raises

from ndnf_rules.config.schema import DatasetConfig, ExperimentConfig, TrainConfig, load_experiment_config
from ndnf_rules.config.settings import parse_args, worker_count


def test_defaults():
    config = load_experiment_config()
    assert config.seeds == [0, 1, 2, 3, 4]
    assert config.train.delta_schedule.initial == 0.1
    assert config.train.temperature_schedule.decay_epochs == config.train.epochs
    assert config.data.dataset == 'boolean_network'


def test_load_routes_flat_keys(tmp_path):
    path = tmp_path / 'run.env'
    path.write_text('# smoke run\nNAME=smoke\nEPOCHS=7\nlearning_rate=0.05\nGENES=4\nSEEDS=3, 5\n'
                    'THRESH_TAU=zero\nVERIFY=enumerable\n')
    config = load_experiment_config(str(path), overrides={'seed': None, 'epochs': '9'})
    assert config.name == 'smoke'
    assert config.train.epochs == 9
    assert config.train.learning_rate == 0.05
    assert config.data.genes == 4
    assert config.seeds == [3, 5]
    assert config.thresh_tau == 'zero'
    assert config.verify == 'enumerable'


def test_unknown_key_is_rejected(tmp_path):
    path = tmp_path / 'bad.env'
    path.write_text('EPOCS=7\n')
    with raises(ValueError):
        load_experiment_config(str(path))


def test_validation_errors():
    with raises(ValidationError):
        TrainConfig(learning_rate=-1.0)
    with raises(ValidationError):
        TrainConfig(temperature_start=0.5, temperature_end=0.9)
    with raises(ValidationError):
        DatasetConfig(dataset='csv', label_columns=['y'])
    with raises(ValidationError):
        DatasetConfig(dataset='csv', path='data.csv')
    with raises(ValidationError):
        ExperimentConfig(seeds='')
    with raises(ValidationError):
        ExperimentConfig(thresh_tau='median')


def test_dataset_config_splits_column_lists():
    config = DatasetConfig(dataset='csv', path='data.csv', label_columns='y', real_columns='a, b')
    assert config.label_columns == ['y']
    assert config.real_columns == ['a', 'b']


def test_cli_parser():
    args = parse_args(['truth-table', '--weights', '-6,-2,-2,2,-6', '--format', 'csv'])
    assert (args.command, args.weights, args.format, args.delta) == ('truth-table', '-6,-2,-2,2,-6', 'csv', 1.0)
    args = parse_args(['truth-table', '--weights=-6,-2', '--kind', 'disjunctive'])
    assert (args.weights, args.kind) == ('-6,-2', 'disjunctive')
    args = parse_args(['discretise', '--checkpoint', 'c.json', '--eval', 'train', '--tau', 'zero'])
    assert (args.eval_split, args.tau, args.scope) == ('train', 'zero', 'model')


def test_worker_count_is_capped():
    assert worker_count(1) == 1
    assert worker_count(0) == 1
    assert worker_count(10 ** 6) == worker_count()
