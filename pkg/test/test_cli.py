import json
import os

import numpy as np
import pytest

from ltgcd import procedures
from ltgcd.cli import build_parser, cli, load_params
from ltgcd.datagen import load_embeddings
from ltgcd.models import ProjectionHead

CONFIG = """
num_classes = 4
num_known = 2
samples_per_known = 20
rho = 2
dim = 8
hidden_dim = 8
proj_dim = 8
epochs = 2
batch_size = 16
sep = 6
"""


@pytest.fixture
def config(tmp_path):
    path = tmp_path / 'c.ini'
    path.write_text(CONFIG)
    return str(path)


def test_train_happy_path(tmp_path, config):
    out = str(tmp_path / 'run')

    code = cli(['train', '--config', config, '--seed', '42', '--out', out])

    assert code == 0
    for name in ('checkpoint.json', 'record.json', 'training_log.csv',
                 'metrics.csv'):
        assert os.path.isfile(os.path.join(out, name))

    with open(os.path.join(out, 'record.json')) as handle:
        record = json.load(handle)
    assert record['seed'] == 42
    assert record['status'] == 'ok'
    assert len(record['epochs']) == 2

    with open(os.path.join(out, 'training_log.csv')) as handle:
        lines = handle.read().splitlines()
    assert lines[0].startswith('epoch,lr,l_ins,l_sup,h_prior,h_uniform,'
                               'l_overall,r_0')
    assert len(lines) == 3


def test_invalid_rho(tmp_path, capsys):
    code = cli(['train', '--rho', '-1', '--out', str(tmp_path)])

    assert code == 1
    assert 'rho' in capsys.readouterr().err


def test_missing_checkpoint(tmp_path, capsys):
    missing = str(tmp_path / 'missing.json')

    code = cli(['eval', '--checkpoint', missing, '--out', str(tmp_path)])

    assert code == 2
    assert 'file not found' in capsys.readouterr().err


def test_missing_config(tmp_path):
    assert cli(['train', '--config', str(tmp_path / 'nope.ini')]) == 2


def test_unknown_subcommand(capsys):
    assert cli(['fit']) == 1
    assert 'usage' in capsys.readouterr().err


def test_unknown_flag(capsys):
    assert cli(['train', '--gamma', '3']) == 1
    assert 'usage' in capsys.readouterr().err


def test_bad_flag_value(tmp_path):
    assert cli(['train', '--epochs', 'many', '--out', str(tmp_path)]) == 1


def test_gen_train_eval(tmp_path, config):
    data_dir = str(tmp_path / 'data')
    run_dir = str(tmp_path / 'run')
    eval_dir = str(tmp_path / 'eval')
    manifest = os.path.join(data_dir, 'manifest.json')

    assert cli(['gen', '--config', config, '--out', data_dir]) == 0
    assert os.path.isfile(manifest)
    assert os.path.isfile(os.path.join(data_dir, 'data.csv'))

    assert cli(['-v', 'train', '--config', config, '--dataset', manifest,
                '--out', run_dir]) == 0

    checkpoint = os.path.join(run_dir, 'checkpoint.json')
    assert cli(['eval', '--config', config, '--dataset', manifest,
                '--checkpoint', checkpoint, '--out', eval_dir]) == 0

    with open(os.path.join(run_dir, 'metrics.csv')) as handle:
        trained = handle.read()
    with open(os.path.join(eval_dir, 'metrics.csv')) as handle:
        evaluated = handle.read()
    assert trained == evaluated


def test_sweep_with_preset(tmp_path, config):
    out = str(tmp_path / 'sweep')

    code = cli(['sweep', '--config', config, '--preset', 'beta',
                '--epochs', '1', '--seed', '0,1', '--out', out])

    assert code == 0
    with open(os.path.join(out, 'results.csv')) as handle:
        assert len(handle.read().splitlines()) == 1 + 4 * 2
    assert os.path.isfile(os.path.join(out, 'beta.svg'))


def test_flags_override_config(config):
    args = build_parser().parse_args(['train', '--config', config, '--beta',
                                      '2', '--batch', '8'])

    params = load_params(args)

    assert params.BETA == 2.0
    assert params.BATCH_SIZE == 8
    assert params.NUM_CLASSES == 4


def test_sweep_flags_set_plan_axes(config):
    args = build_parser().parse_args(['sweep', '--config', config, '--rho',
                                      '1,5', '--preset', 'alpha-beta2'])

    params = load_params(args)

    assert params.RHOS == [1.0, 5.0]
    assert params.ALPHAS == [0.0, 0.5, 1.0, 2.0]
    assert params.BETAS == [2.0]


def test_sweep_on_loaded_dataset(tmp_path, config):
    data_dir = str(tmp_path / 'data')
    out = str(tmp_path / 'sweep')
    manifest = os.path.join(data_dir, 'manifest.json')

    # rho 1 on disk, the config's rho 2 would generate a smaller pool
    assert cli(['gen', '--config', config, '--rho', '1',
                '--out', data_dir]) == 0
    n_unlabeled = int((~load_embeddings(manifest).is_labeled).sum())

    assert cli(['sweep', '--config', config, '--dataset', manifest,
                '--epochs', '1', '--seed', '0', '--beta', '0',
                '--out', out]) == 0

    with open(os.path.join(out, 'runs', 'run_0000.json')) as handle:
        record = json.load(handle)
    assert record['status'] == 'ok'
    assert record['metrics']['n_all'] == n_unlabeled


def test_sweep_on_loaded_dataset_rejects_rho_axis(tmp_path, config, capsys):
    data_dir = str(tmp_path / 'data')
    manifest = os.path.join(data_dir, 'manifest.json')
    assert cli(['gen', '--config', config, '--out', data_dir]) == 0

    code = cli(['sweep', '--config', config, '--dataset', manifest,
                '--rho', '1,5', '--out', str(tmp_path / 'sweep')])

    assert code == 1
    assert 'rho' in capsys.readouterr().err


def test_collapsed_training_exits_2(tmp_path, config, monkeypatch):
    def collapse(head, grads, opt, params):
        return ProjectionHead(*[np.zeros_like(p) for p in head]), opt

    monkeypatch.setattr(procedures, 'sgd_step', collapse)

    code = cli(['train', '--config', config, '--out', str(tmp_path)])

    assert code == 2
    with open(os.path.join(str(tmp_path), 'record.json')) as handle:
        assert json.load(handle)['status'] == 'failed'
