import os

import pandas as pd

from ndnf_rules.main import main

CONFIG = """
NAME=cli
DATASET=boolean_network
GENES=3
EPOCHS=5
LEARNING_RATE=0.05
BATCH_SIZE=4
N_CONJUNCTIONS=4
SEEDS=0
BUDGET_SECS=30
"""


def _config(tmp_path) -> str:
    path = tmp_path / 'cli.env'
    path.write_text(CONFIG)
    return str(path)


def test_truth_table_csv(capsys):
    assert main(['truth-table', '--weights', '-6,-2,-2,2,-6', '--format', 'csv']) == 0
    lines = capsys.readouterr().out.splitlines()
    header = lines.index('x1,x2,x3,x4,x5,activation,bivalent')
    rows = lines[header + 1:header + 33]
    assert len(rows) == 32
    assert sum(row.endswith(',T') for row in rows) == 4


def test_pipeline_commands(tmp_path, capsys):
    config, out = _config(tmp_path), str(tmp_path / 'out')

    assert main(['train', '--config', config, '--out-dir', out]) == 0
    checkpoint = os.path.join(out, 'checkpoint.json')
    assert os.path.exists(checkpoint)
    assert len(pd.read_csv(os.path.join(out, 'history.csv'))) == 5

    assert main(['discretise', '--checkpoint', checkpoint, '--config', config, '--out-dir', out,
                 '--format', 'csv']) == 0
    assert capsys.readouterr().out
    assert main(['emit-rules', '--checkpoint', os.path.join(out, 'thresholded.json'), '--out-dir', out]) == 0
    assert os.path.exists(os.path.join(out, 'rules.lp'))
    assert main(['eval', '--checkpoint', checkpoint, '--config', config, '--split', 'train',
                 '--rules', os.path.join(out, 'rules.lp')]) == 0
    assert 'macro_f1=' in capsys.readouterr().out

    assert main(['disentangle', '--checkpoint', checkpoint, '--config', config, '--out-dir', out,
                 '--verify', 'enumerable']) == 0
    assert os.path.exists(os.path.join(out, 'provenance.log'))
    assert main(['emit-rules', '--checkpoint', os.path.join(out, 'disentangled.json'), '--out-dir', out,
                 '--format', 'csv-metrics']) == 0
    compact = pd.read_csv(os.path.join(out, 'compactness.csv'))
    assert list(compact.columns) == ['max_rule_length', 'avg_rule_length', 'num_rules']

    assert main(['eval', '--checkpoint', os.path.join(out, 'thresholded.json'), '--config', config,
                 '--mode', 'bivalent']) == 0


def test_experiment_and_bench(tmp_path):
    config, out = _config(tmp_path), str(tmp_path / 'out')
    assert main(['experiment', '--config', config, '--seed', '4', '--out-dir', out]) == 0
    per_seed = pd.read_csv(os.path.join(out, 'cli', 'per_seed.csv'))
    assert per_seed['seed'].tolist() == [4]

    assert main(['bench', '--fan-in-min', '2', '--fan-in-max', '3', '--trials', '1', '--out-dir', out]) == 0
    assert os.path.exists(os.path.join(out, 'bench.dat'))


def test_errors_return_one(tmp_path):
    assert main(['eval', '--checkpoint', str(tmp_path / 'missing.json'), '--config', _config(tmp_path)]) == 1
    bad = tmp_path / 'bad.env'
    bad.write_text('EPOCS=3\n')
    assert main(['train', '--config', str(bad), '--out-dir', str(tmp_path)]) == 1


def test_truth_table_with_leading_negative_weight(capsys):
    assert main(['truth-table', '--weights', '-6,-2,-2,2,-6']) == 0
    out = capsys.readouterr().out
    assert 'activation' in out
    assert ' T' in out


def test_empty_selection_split_falls_back_to_all_rows(tmp_path, caplog):
    config, out = _config(tmp_path), str(tmp_path / 'out')
    assert main(['train', '--config', config, '--out-dir', out]) == 0
    checkpoint = os.path.join(out, 'checkpoint.json')

    assert main(['discretise', '--checkpoint', checkpoint, '--config', config, '--out-dir', out,
                 '--eval', 'val']) == 0
    assert main(['disentangle', '--checkpoint', checkpoint, '--config', config, '--out-dir', out,
                 '--eval', 'val']) == 0
    assert os.path.exists(os.path.join(out, 'thresholded.json'))
    assert os.path.exists(os.path.join(out, 'disentangled.json'))
    assert "Split 'val' is empty; using the whole dataset" in caplog.text
