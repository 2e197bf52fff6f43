import os

import numpy as np
import pytest
from pytest import approx, raises

from ndnf_rules.data.loader import Dataset, assign_splits, load_csv, load_monk, save_csv
from ndnf_rules.errors import DatasetError
from ndnf_rules.training.model import TaskKind


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_load_csv_encodes_categoricals_and_booleans(tmp_path):
    path = write(tmp_path, 'toy.csv', 'colour,flag,label\nred,1,yes\nblue,0,no\nred,true,no\n')
    dataset = load_csv(path, ['label'], boolean_columns=['flag'])
    assert dataset.feature_names == ['colour=blue', 'colour=red', 'flag']
    assert dataset.x_bool.tolist() == [[-1, 1, 1], [1, -1, -1], [-1, 1, 1]]
    assert dataset.y.tolist() == [1, 0, 0]
    assert dataset.categories == {'colour': ['blue', 'red']}
    assert dataset.splits.tolist() == ['train'] * 3


def test_load_csv_with_known_categories(tmp_path):
    path = write(tmp_path, 'test.csv', 'colour,label\ngreen,1\nred,0\n')
    dataset = load_csv(path, ['label'], categories={'colour': ['blue', 'red']})
    assert dataset.x_bool.tolist() == [[-1, -1], [-1, 1]]


def test_load_csv_keeps_real_columns_raw_for_predicates(tmp_path):
    path = write(tmp_path, 'real.csv', 'size,label\n1.5,1\n-2.0,0\n')
    dataset = load_csv(path, ['label'], real_columns=['size'])
    assert dataset.x_real.tolist() == [[1.5], [-2.0]]
    assert dataset.x_bool.shape == (2, 0)

    scaled = load_csv(path, ['label'], real_columns=['size'], predicate_invention=False)
    assert scaled.x_real.shape == (2, 0)
    assert scaled.x_bool[:, 0] == approx([1.0, -1.0])


def test_load_csv_multiclass_and_multilabel(tmp_path):
    path = write(tmp_path, 'multi.csv', 'a,cls,l1,l2\nx,b,1,0\ny,a,0,1\nx,c,1,1\n')
    multiclass = load_csv(path, ['cls'], task=TaskKind.MULTICLASS, categorical_columns=['a'])
    assert multiclass.label_names == ['a', 'b', 'c']
    assert multiclass.y.tolist() == [1, 0, 2]
    assert multiclass.n_outputs == 3

    multilabel = load_csv(path, ['l1', 'l2'], task=TaskKind.MULTILABEL, categorical_columns=['a'])
    assert multilabel.y.tolist() == [[1, 0], [0, 1], [1, 1]]


def test_load_csv_split_column(tmp_path):
    path = write(tmp_path, 'split.csv', 'a,label,split\nx,1,train\ny,0,test\n')
    dataset = load_csv(path, ['label'], split_column='split')
    assert dataset.feature_names == ['a=x', 'a=y']
    assert len(dataset.subset('test')) == 1
    assert dataset.has_split('test') and not dataset.has_split('val')


@pytest.mark.parametrize('text, kwargs', [
    ('a,label\nx,1,extra,more\n', {}),
    ('a,label\nx\n', {}),
    ('a,label\nx,\n', {}),
    ('a,label\nx,1\n', {'real_columns': ['missing']}),
    ('size,label\nbig,1\n', {'real_columns': ['size']}),
    ('a,label\nx,1\ny,2\nz,3\n', {}),
    ('a,flag,label\nx,maybe,1\n', {'boolean_columns': ['flag']}),
])
def test_load_csv_errors(tmp_path, text, kwargs):
    with raises(DatasetError):
        load_csv(write(tmp_path, 'bad.csv', text), ['label'], **kwargs)


def test_dataset_rejects_inconsistent_rows():
    with raises(DatasetError):
        Dataset(name='bad', x_bool=np.zeros((3, 2)), x_real=np.zeros((3, 0)), y=np.zeros(2), task='binary')
    with raises(DatasetError):
        Dataset(name='bad', x_bool=np.zeros((2, 2)), x_real=np.zeros((2, 0)), y=np.zeros(2), task='multilabel')


def test_subset_without_matching_rows():
    dataset = Dataset(name='d', x_bool=np.ones((4, 2)), x_real=np.arange(4.0)[:, None], y=np.ones(4, dtype=int),
                      task='binary', real_names=['r'])
    empty = dataset.subset('val')
    assert len(empty) == 0
    assert empty.x_bool.shape == (0, 2)
    assert empty.x_real.shape == (0, 1)
    assert not dataset.has_split('val')

    no_real = Dataset(name='d', x_bool=np.ones((4, 2)), x_real=np.zeros((4, 0)), y=np.ones(4), task='binary')
    assert no_real.subset('val').x_real.shape == (0, 0)


def test_assign_splits_is_seeded(conjunction_dataset):
    first = assign_splits(conjunction_dataset, seed=3, val_fraction=0.25, test_fraction=0.25)
    second = assign_splits(conjunction_dataset, seed=3, val_fraction=0.25, test_fraction=0.25)
    assert first.splits.tolist() == second.splits.tolist()
    assert sorted(first.splits.tolist()) == ['test', 'train', 'train', 'val']
    with raises(DatasetError):
        assign_splits(conjunction_dataset, 0, 0.5, 0.5)


def test_save_csv_round_trip(tmp_path, conjunction_dataset):
    path = str(tmp_path / 'saved.csv')
    conjunction_dataset.feature_names = ['p', 'q']
    conjunction_dataset.label_names = ['label']
    save_csv(conjunction_dataset, path)
    loaded = load_csv(path, ['label'], boolean_columns=['p', 'q'], split_column='split')
    assert loaded.x_bool.tolist() == conjunction_dataset.x_bool.tolist()
    assert loaded.y.tolist() == conjunction_dataset.y.tolist()


def test_load_monk_file(tmp_path):
    path = write(tmp_path, 'monks-1.train', ' 1 1 1 1 1 3 1 data_5\n 0 3 3 2 3 4 2 data_432\n')
    dataset = load_monk(path)
    assert dataset.x_bool.shape == (2, 17)
    assert dataset.y.tolist() == [1, 0]
    assert dataset.feature_names[:4] == ['a1=1', 'a1=2', 'a1=3', 'a2=1']
    assert dataset.x_bool[0, :3].tolist() == [1, -1, -1]
    assert dataset.x_bool[1, -2:].tolist() == [-1, 1]


def test_load_monk_rejects_bad_levels(tmp_path):
    with raises(DatasetError):
        load_monk(write(tmp_path, 'bad.train', ' 1 4 1 1 1 1 1 data_1\n'))


@pytest.mark.skipif(not os.environ.get('NDNF_MONK_PATH'), reason='NDNF_MONK_PATH not set')
def test_load_real_monk_file():
    dataset = load_monk(os.environ['NDNF_MONK_PATH'])
    assert dataset.x_bool.shape[1] == 17
    assert set(np.unique(dataset.y)) <= {0, 1}
