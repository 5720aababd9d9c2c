"""
Experiment sweeps: the cross product of imbalance factors, regularizer
weights and seeds.  Every run generates its own split unless the plan
carries a loaded dataset, which all runs then share.

Outputs, all in the plan's output directory:

    results.csv   one row per run
    summary.csv   mean / std / n of every metric per configuration
    runs/         one record JSON per run
    <axis>.svg    trend plot for every swept axis
"""
import csv
import itertools
import json
import logging
import os
from collections import OrderedDict, namedtuple
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ltgcd import app, plots
from ltgcd.datagen import generate_mixture
from ltgcd.procedures import train_one

log = logging.getLogger(__name__)

ExperimentPlan = namedtuple('ExperimentPlan',
                            ['params', 'rhos', 'alphas', 'betas', 'lambdas',
                             'seeds', 'out', 'dataset'])

RESULTS_HEADER = ['run_id', 'seed', 'rho', 'alpha', 'beta', 'lambda',
                  'all', 'known', 'un1', 'un2']
SUMMARY_HEADER = ['rho', 'alpha', 'beta', 'lambda', 'metric', 'mean', 'std',
                  'n']
METRICS = OrderedDict([('all', 'all_acc'), ('known', 'known_acc'),
                       ('un1', 'un1_acc'), ('un2', 'un2_acc')])
# Plan axes as (results column, plan field)
AXES = OrderedDict([('rho', 'rhos'), ('alpha', 'alphas'), ('beta', 'betas'),
                    ('lambda', 'lambdas')])


def make_plan(params, dataset=None):
    """
    Build and validate a plan from the sweep fields of the parameters.

    A loaded dataset fixes the split, so the plan may then hold only one
    imbalance factor.

    Args:
        params: Parameters with RHOS, ALPHAS, BETAS, LAMBDAS, SEEDS, OUT
        dataset: EmbeddingDataset shared by every run, None to generate a
            split per run

    Returns:
        ExperimentPlan
    """
    plan = ExperimentPlan(params=params,
                          rhos=list(params.RHOS),
                          alphas=list(params.ALPHAS),
                          betas=list(params.BETAS),
                          lambdas=list(params.LAMBDAS),
                          seeds=[int(s) for s in params.SEEDS],
                          out=params.OUT,
                          dataset=dataset)

    for field in ('rhos', 'alphas', 'betas', 'lambdas', 'seeds'):
        if not getattr(plan, field):
            raise ValueError('empty {} list in the sweep plan'
                             .format(field[:-1]))

    if dataset is not None and len(plan.rhos) > 1:
        raise ValueError('a loaded dataset has a fixed split, got {} rho '
                         'values'.format(len(plan.rhos)))

    for rho, alpha, beta, lam, seed in itertools.product(
            plan.rhos, plan.alphas, plan.betas, plan.lambdas, plan.seeds):
        run = __run_params(params, rho, alpha, beta, lam, seed)
        app.check_params(run)
        if dataset is None:
            app.check_split(run)

    os.makedirs(plan.out, exist_ok=True)
    if not os.access(plan.out, os.W_OK):
        raise ValueError('output directory {} is not writable'
                         .format(plan.out))

    return plan


def __run_params(params, rho, alpha, beta, lam, seed):
    run = app.Parameters(params)
    run.update({'RHO': rho, 'ALPHA': alpha, 'BETA': beta, 'LAMBDA': lam,
                'SEED': seed})
    return run


def run_job(job):
    """
    Generate a split (unless the job carries a dataset), train, evaluate.
    Top level so a process pool can pickle it.

    Args:
        job: (run_id, params, dataset, rho, alpha, beta, lambda, seed),
            dataset None to generate one

    Returns:
        dict results row
        dict run record without the model state
    """
    run_id, params, data, rho, alpha, beta, lam, seed = job
    run = __run_params(params, rho, alpha, beta, lam, seed)

    row = OrderedDict([('run_id', run_id), ('seed', seed), ('rho', rho),
                       ('alpha', alpha), ('beta', beta), ('lambda', lam)])
    row.update((m, None) for m in METRICS)

    try:
        if data is None:
            data = generate_mixture(run, run.SEP,
                                    app.derive_stream(seed, 'split'))
        record = train_one(data, run, seed)
    except (ValueError, FloatingPointError, ArithmeticError) as e:
        log.warning('Run %s failed: %s', run_id, e)
        return row, {'run_id': run_id, 'status': 'failed', 'error': str(e)}

    record.pop('state')
    record['run_id'] = run_id

    if record['metrics'] is not None:
        for column, field in METRICS.items():
            row[column] = record['metrics'][field]

    return row, record


def __format(value):
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows(path, header, rows):
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([__format(row[h]) for h in header])


def summarize(rows):
    """
    Mean, sample standard deviation and count of every metric per
    configuration, in first-seen order.

    Absent metrics (failed runs, undefined Un1 / Un2) do not count.

    Args:
        rows: results rows

    Returns:
        list of summary rows
    """
    groups = OrderedDict()
    for row in rows:
        key = tuple(row[a] for a in AXES)
        groups.setdefault(key, []).append(row)

    summary = []
    for key, members in groups.items():
        for metric in METRICS:
            values = np.array([r[metric] for r in members
                               if r[metric] is not None], dtype=float)
            n = values.size
            entry = OrderedDict(zip(AXES, key))
            entry.update([('metric', metric),
                          ('mean', float(values.mean()) if n else None),
                          ('std', float(values.std(ddof=1)) if n > 1 else
                           (0.0 if n else None)),
                          ('n', n)])
            summary.append(entry)

    return summary


def trend_series(plan, summary, axis):
    """
    Means of every metric along one axis, other axes at their first plan
    value.

    Returns:
        list of axis values, dict metric -> list of means
    """
    fixed = {a: getattr(plan, f)[0] for a, f in AXES.items() if a != axis}
    xs = getattr(plan, AXES[axis])

    series = OrderedDict((m, []) for m in METRICS)
    for x in xs:
        for metric in METRICS:
            match = [s['mean'] for s in summary
                     if s['metric'] == metric and s[axis] == x and
                     all(s[a] == v for a, v in fixed.items())]
            series[metric].append(match[0] if match else None)

    return xs, series


def sweep(plan):
    """
    Run every configuration of the plan and write the artifacts.

    Args:
        plan: ExperimentPlan

    Returns:
        list of results rows, in plan order
    """
    jobs = [(i, dict(plan.params), plan.dataset, rho, alpha, beta, lam,
             seed)
            for i, (rho, alpha, beta, lam, seed) in enumerate(
                itertools.product(plan.rhos, plan.alphas, plan.betas,
                                  plan.lambdas, plan.seeds))]

    log.info('Sweep: %s runs into %s', len(jobs), plan.out)

    workers = int(plan.params.get('WORKERS', 1))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_job, jobs))
    else:
        outcomes = [run_job(job) for job in jobs]

    rows = [row for row, _ in outcomes]

    runs_dir = os.path.join(plan.out, 'runs')
    os.makedirs(runs_dir, exist_ok=True)
    for row, record in outcomes:
        path = os.path.join(runs_dir, 'run_{:04d}.json'.format(row['run_id']))
        with open(path, 'w') as handle:
            json.dump(record, handle, indent=1, sort_keys=True)

    write_rows(os.path.join(plan.out, 'results.csv'), RESULTS_HEADER, rows)

    summary = summarize(rows)
    write_rows(os.path.join(plan.out, 'summary.csv'), SUMMARY_HEADER, summary)

    for axis, field in AXES.items():
        if len(getattr(plan, field)) > 1:
            xs, series = trend_series(plan, summary, axis)
            plots.trend_plot(xs, series, axis,
                             os.path.join(plan.out, '{}.svg'.format(axis)))

    failed = sum(1 for _, record in outcomes if record['status'] != 'ok')
    if failed:
        log.warning('%s of %s runs failed', failed, len(outcomes))

    return rows
