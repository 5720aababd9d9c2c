"""
Command line entry point.

    ltgcd gen    write a synthetic dataset (data.csv + manifest.json)
    ltgcd train  train and evaluate one run
    ltgcd eval   evaluate a checkpoint on a dataset
    ltgcd sweep  run a full experiment plan

Exit codes: 0 success, 1 validation or usage error, 2 runtime failure.
"""
import argparse
import json
import logging
import os
import sys

from ltgcd import app, parameters
from ltgcd.datagen import generate_mixture, load_embeddings, write_embeddings
from ltgcd.evaluate import evaluate
from ltgcd.models import load_checkpoint, save_checkpoint
from ltgcd.procedures import LOSS_FIELDS, train_one
from ltgcd.sweep import make_plan, sweep, write_rows

log = logging.getLogger(__name__)

METRICS_HEADER = ['seed', 'rho', 'alpha', 'beta', 'all', 'known', 'un1',
                  'un2']

# flag -> (single-run key, sweep key)
OVERRIDES = {'seed': ('SEED', 'SEEDS'),
             'rho': ('RHO', 'RHOS'),
             'alpha': ('ALPHA', 'ALPHAS'),
             'beta': ('BETA', 'BETAS'),
             'epochs': ('EPOCHS', 'EPOCHS'),
             'batch': ('BATCH_SIZE', 'BATCH_SIZE'),
             'out': ('OUT', 'OUT')}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write('{}: error: {}\n'.format(self.prog, message))
        raise UsageError(message)


def build_parser():
    parser = _Parser(prog='ltgcd',
                     description='Long-tailed generalized category discovery '
                                 'on embedding data')
    parser.add_argument('-v', '--verbose', action='store_true')
    commands = parser.add_subparsers(dest='command', parser_class=_Parser)
    commands.required = True

    for name in ('gen', 'train', 'eval', 'sweep'):
        sub = commands.add_parser(name)
        sub.add_argument('--config', help='key = value config file')
        sub.add_argument('--out', help='output directory')
        sub.add_argument('--seed')
        sub.add_argument('--rho')
        if name != 'gen':
            sub.add_argument('--dataset', help='embedding manifest JSON')
        if name in ('train', 'sweep'):
            for flag in ('alpha', 'beta', 'epochs', 'batch'):
                sub.add_argument('--' + flag)
        if name == 'eval':
            sub.add_argument('--checkpoint', required=True)
        if name == 'sweep':
            sub.add_argument('--preset', choices=sorted(parameters.presets))

    return parser


def load_params(args):
    """
    Defaults, then the config file, then the preset, then flags.

    Args:
        args: parsed argparse namespace

    Returns:
        Parameters
    """
    params = app.get_default_params()

    if args.config:
        params = app.read_config(args.config, params)

    if getattr(args, 'preset', None):
        params.update(parameters.presets[args.preset])

    slot = 1 if args.command == 'sweep' else 0
    for flag, keys in OVERRIDES.items():
        value = getattr(args, flag, None)
        if value is not None:
            key = keys[slot]
            params[key] = app.coerce(key, value, params[key])

    app.check_params(params)
    if args.command != 'sweep':
        app.check_split(params)

    return params


def __dataset(args, params):
    if getattr(args, 'dataset', None):
        return load_embeddings(args.dataset)

    return generate_mixture(params, params.SEP,
                            app.derive_stream(params.SEED, 'split'))


def __metrics_row(params, metrics):
    return {'seed': params.SEED, 'rho': params.RHO, 'alpha': params.ALPHA,
            'beta': params.BETA, 'all': metrics['all_acc'],
            'known': metrics['known_acc'], 'un1': metrics['un1_acc'],
            'un2': metrics['un2_acc']}


def write_training_log(path, record):
    n_classes = len(record['epochs'][0]['prior']) if record['epochs'] else 0
    header = (['epoch', 'lr'] + list(LOSS_FIELDS) +
              ['r_{}'.format(c) for c in range(n_classes)])

    rows = []
    for e in record['epochs']:
        row = {f: e[f] for f in header[:len(LOSS_FIELDS) + 2]}
        row.update(('r_{}'.format(c), v) for c, v in enumerate(e['prior']))
        rows.append(row)

    write_rows(path, header, rows)


def gen(args, params):
    os.makedirs(params.OUT, exist_ok=True)
    data = __dataset(args, params)
    write_embeddings(data, os.path.join(params.OUT, 'manifest.json'))

    return 0


def train(args, params):
    os.makedirs(params.OUT, exist_ok=True)
    data = __dataset(args, params)
    record = train_one(data, params)

    save_checkpoint(os.path.join(params.OUT, 'checkpoint.json'),
                    record.pop('state'))
    with open(os.path.join(params.OUT, 'record.json'), 'w') as handle:
        json.dump(record, handle, indent=1, sort_keys=True)
    write_training_log(os.path.join(params.OUT, 'training_log.csv'), record)

    if record['status'] != 'ok':
        log.error('Run failed: %s', record['error'])
        return 2

    write_rows(os.path.join(params.OUT, 'metrics.csv'), METRICS_HEADER,
               [__metrics_row(params, record['metrics'])])

    return 0


def evaluate_checkpoint(args, params):
    state = load_checkpoint(args.checkpoint)
    data = __dataset(args, params)
    metrics = evaluate(state, data, params.SEED,
                       params.KMEANS_MAX_ITER)._asdict()

    os.makedirs(params.OUT, exist_ok=True)
    write_rows(os.path.join(params.OUT, 'metrics.csv'), METRICS_HEADER,
               [__metrics_row(params, metrics)])
    print(json.dumps(metrics, sort_keys=True))

    return 0


def run_sweep(args, params):
    data = load_embeddings(args.dataset) if args.dataset else None
    sweep(make_plan(params, data))

    return 0


COMMANDS = {'gen': gen, 'train': train, 'eval': evaluate_checkpoint,
            'sweep': run_sweep}


def cli(argv=None):
    """
    Run one subcommand.

    Args:
        argv: argument list, sys.argv[1:] when None

    Returns:
        int exit code
    """
    try:
        args = build_parser().parse_args(argv)
    except UsageError:
        return 1

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s %(name)s %(levelname)s '
                               '%(message)s')

    try:
        params = load_params(args)
        return COMMANDS[args.command](args, params)
    except ValueError as e:
        sys.stderr.write('error: {}\n'.format(e))
        return 1
    except (OSError, ArithmeticError, RuntimeError) as e:
        sys.stderr.write('error: {}\n'.format(e))
        return 2


def main():
    sys.exit(cli())
