import csv
import json
import os

import numpy as np
import pytest

from ltgcd import plots
from ltgcd.sweep import RESULTS_HEADER, SUMMARY_HEADER, make_plan, \
    summarize, sweep, trend_series

from test.shared import separable_dataset, small_params


def read_csv(path):
    with open(path, newline='') as handle:
        return list(csv.DictReader(handle))


def row(run_id, beta, seed, all_acc, un1=None):
    return {'run_id': run_id, 'seed': seed, 'rho': 5.0, 'alpha': 0.0,
            'beta': beta, 'lambda': 1.0, 'all': all_acc, 'known': 1.0,
            'un1': un1, 'un2': None}


def test_summarize_mean_std():
    rows = [row(0, 0.0, 0, 0.5, 0.2), row(1, 0.0, 1, 0.7, None),
            row(2, 0.0, 2, 0.9, 0.4), row(3, 1.0, 0, 0.6, 0.3)]

    summary = summarize(rows)

    first = {s['metric']: s for s in summary if s['beta'] == 0.0}
    assert first['all']['mean'] == pytest.approx(0.7)
    assert first['all']['std'] == pytest.approx(0.2)
    assert first['all']['n'] == 3
    assert first['un1']['mean'] == pytest.approx(0.3)
    assert first['un1']['n'] == 2
    assert first['un2']['mean'] is None
    assert first['un2']['n'] == 0

    single = {s['metric']: s for s in summary if s['beta'] == 1.0}
    assert single['all']['std'] == 0.0
    assert single['all']['n'] == 1


def test_empty_seed_list(tmp_path):
    params = small_params(SEEDS=[], OUT=str(tmp_path / 'out'))

    with pytest.raises(ValueError):
        make_plan(params)

    assert not os.path.exists(str(tmp_path / 'out'))


def test_invalid_run_rejected_before_running(tmp_path):
    params = small_params(RHOS=[2.0, -1.0], OUT=str(tmp_path / 'out'))

    with pytest.raises(ValueError):
        make_plan(params)


def test_sweep_artifacts(tmp_path):
    out = str(tmp_path / 'out')
    plan = make_plan(small_params(EPOCHS=1, RHOS=[2.0], OUT=out))

    rows = sweep(plan)

    assert [r['run_id'] for r in rows] == [0, 1, 2, 3]
    assert sorted(os.listdir(os.path.join(out, 'runs'))) == \
        ['run_0000.json', 'run_0001.json', 'run_0002.json', 'run_0003.json']

    results = read_csv(os.path.join(out, 'results.csv'))
    summary = read_csv(os.path.join(out, 'summary.csv'))

    with open(os.path.join(out, 'results.csv')) as handle:
        assert handle.readline().strip().split(',') == RESULTS_HEADER
    with open(os.path.join(out, 'summary.csv')) as handle:
        assert handle.readline().strip().split(',') == SUMMARY_HEADER

    assert len(results) == 4
    assert len(summary) == 2 * 4

    for entry in summary:
        values = [float(r[entry['metric']]) for r in results
                  if r['beta'] == entry['beta'] and r[entry['metric']]]
        assert abs(float(entry['mean']) - np.mean(values)) <= 1e-12
        assert int(entry['n']) == len(values)

    assert os.path.isfile(os.path.join(out, 'beta.svg'))
    assert not os.path.exists(os.path.join(out, 'rho.svg'))


def test_sweep_is_deterministic(tmp_path):
    outputs = []
    for name, workers in (('serial', 1), ('again', 1), ('pooled', 2)):
        out = str(tmp_path / name)
        sweep(make_plan(small_params(EPOCHS=1, SEEDS=[0], OUT=out,
                                     WORKERS=workers)))
        with open(os.path.join(out, 'results.csv'), 'rb') as handle:
            outputs.append(handle.read())

    assert outputs[0] == outputs[1] == outputs[2]


def test_loaded_dataset_shared_by_runs(tmp_path):
    out = str(tmp_path / 'out')
    data = separable_dataset()
    plan = make_plan(small_params(EPOCHS=1, RHOS=[2.0], OUT=out), data)

    rows = sweep(plan)

    assert len(rows) == 4
    for name in sorted(os.listdir(os.path.join(out, 'runs'))):
        with open(os.path.join(out, 'runs', name)) as handle:
            record = json.load(handle)
        assert record['status'] == 'ok'
        assert record['metrics']['n_all'] == int((~data.is_labeled).sum())


def test_loaded_dataset_fixes_rho(tmp_path):
    params = small_params(RHOS=[1.0, 5.0], OUT=str(tmp_path / 'out'))

    with pytest.raises(ValueError, match='rho'):
        make_plan(params, separable_dataset())



def test_trend_series_fixes_other_axes(tmp_path):
    plan = make_plan(small_params(ALPHAS=[0.0, 1.0], BETAS=[0.0, 2.0],
                                  OUT=str(tmp_path)))
    summary = [{'rho': 5.0, 'alpha': a, 'beta': b, 'lambda': 1.0,
                'metric': m, 'mean': a + b / 10, 'std': 0.0, 'n': 1}
               for a in (0.0, 1.0) for b in (0.0, 2.0)
               for m in ('all', 'known', 'un1', 'un2')]

    xs, series = trend_series(plan, summary, 'beta')

    assert xs == [0.0, 2.0]
    assert series['all'] == [0.0, 0.2]


def test_trend_plot_structure(tmp_path):
    path = str(tmp_path / 'beta.svg')
    series = {'all': [0.5, 0.6, 0.62, 0.61], 'known': [0.9, 0.85, 0.8, 0.7],
              'un1': [0.4, 0.5, 0.55, 0.6], 'un2': [0.3, 0.4, 0.45, 0.5]}

    plots.trend_plot([0.0, 1.0, 2.0, 5.0], series, 'beta', path)

    with open(path) as handle:
        svg = handle.read()

    assert svg.lstrip().startswith('<?xml')
    assert 'viewBox="0 0 800 600"' in svg
    for metric in series:
        assert 'id="series-{}"'.format(metric) in svg
    assert 'id="xtick_4"' in svg
    assert 'id="xtick_5"' not in svg


def test_trend_plot_is_reproducible(tmp_path):
    series = {'all': [0.5, None], 'known': [0.9, 0.8]}
    first, second = str(tmp_path / 'a.svg'), str(tmp_path / 'b.svg')

    plots.trend_plot([1.0, 2.0], series, 'alpha', first)
    plots.trend_plot([1.0, 2.0], series, 'alpha', second)

    with open(first, 'rb') as a, open(second, 'rb') as b:
        assert a.read() == b.read()
