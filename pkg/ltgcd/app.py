""" Main bootstrap and configuration module for ltgcd.  Any module that
requires configuration or services should import app and obtain the
configuration or service from here.

app.py enables a very basic but sufficient form of loose coupling
by setting names of services & configuration once, then allowing other modules
that require these services/information to obtain them by name rather than
directly importing or instantiating.

The random number service lives here too: every consumer of randomness asks
for its own named stream so that changing one consumer never perturbs
another.
"""
import configparser
import copy
import hashlib
import logging
import os

import numpy as np

from ltgcd import parameters
from ltgcd.math_utils import round_half_up


log = logging.getLogger(__name__)

SEED_MAX = 2 ** 64


# Simplify parameter setting and make it easier for adjustment
class Parameters(dict):
    def __init__(self, params):

        super(Parameters, self).__init__(params)

    def __getattr__(self, name):
        if name in self:
            return self[name]
        else:
            raise AttributeError('No such attribute: ' + name)

    def __setattr__(self, name, value):
        self[name] = value

    def __delattr__(self, name):
        if name in self:
            del self[name]
        else:
            raise AttributeError('No such attribute: ' + name)


def get_default_params():
    return Parameters(copy.deepcopy(parameters.defaults))


def stream_id(purpose):
    """
    Stable integer id for a stream purpose label.

    Args:
        purpose: label such as 'split', 'init', 'batch'

    Returns:
        tuple of four 32-bit ints
    """
    digest = hashlib.sha256(purpose.encode('utf-8')).digest()
    return tuple(int.from_bytes(digest[i:i + 4], 'little')
                 for i in range(0, 16, 4))


def derive_stream(seed, purpose):
    """
    Independent deterministic random stream for one consumer.

    The same (seed, purpose) pair yields the same sequence on every run and
    platform; distinct purposes or seeds give unrelated sequences.

    Args:
        seed: 64-bit unsigned integer
        purpose: label naming the consumer

    Returns:
        numpy.random.Generator
    """
    seed = int(seed)
    if not 0 <= seed < SEED_MAX:
        raise ValueError('seed must be a 64-bit unsigned integer, got {}'
                         .format(seed))

    entropy = [seed & 0xffffffff, seed >> 32] + list(stream_id(purpose))

    bits = np.random.PCG64(np.random.SeedSequence(entropy))

    return np.random.Generator(bits)


def __require(cond, message, *args):
    if not cond:
        raise ValueError(message.format(*args))


def check_params(params):
    """
    Validate the hyper-parameter fields.

    Args:
        params: Parameters

    Raises:
        ValueError naming the first offending field
    """
    __require(params.TAU > 0, 'tau must be positive, got {}', params.TAU)
    __require(params.TAU_P > 0, 'tau_p must be positive, got {}',
              params.TAU_P)

    for name in ('LAMBDA', 'ALPHA', 'BETA', 'WEIGHT_DECAY'):
        __require(params[name] >= 0, '{} must be nonnegative, got {}',
                  name.lower(), params[name])

    __require(0 <= params.MU <= 1, 'mu must be in [0, 1], got {}', params.MU)
    __require(0 <= params.MOMENTUM < 1, 'momentum must be in [0, 1), got {}',
              params.MOMENTUM)
    __require(params.LR0 > 0, 'lr0 must be positive, got {}', params.LR0)
    __require(params.EPOCHS >= 0, 'epochs must be nonnegative, got {}',
              params.EPOCHS)
    __require(params.BATCH_SIZE > 0, 'batch_size must be positive, got {}',
              params.BATCH_SIZE)
    __require(0 <= int(params.SEED) < SEED_MAX,
              'seed must be a 64-bit unsigned integer, got {}', params.SEED)
    __require(0 <= params.PROTO_EMA <= 1, 'proto_ema must be in [0, 1], '
              'got {}', params.PROTO_EMA)
    __require(params.NOISE_SIGMA >= 0, 'noise_sigma must be nonnegative, '
              'got {}', params.NOISE_SIGMA)
    __require(0 <= params.DROP_PROB < 1, 'drop_prob must be in [0, 1), '
              'got {}', params.DROP_PROB)
    __require(params.HIDDEN_DIM > 0 and params.PROJ_DIM > 0,
              'hidden_dim and proj_dim must be positive')


def check_split(params):
    """
    Validate the split fields.

    Args:
        params: Parameters

    Raises:
        ValueError naming the first offending field
    """
    __require(params.NUM_CLASSES > 0, 'num_classes must be positive, got {}',
              params.NUM_CLASSES)
    __require(0 < params.NUM_KNOWN < params.NUM_CLASSES,
              'num_known must be in [1, num_classes), got {}',
              params.NUM_KNOWN)
    __require(params.SAMPLES_PER_KNOWN > 0,
              'samples_per_known must be positive, got {}',
              params.SAMPLES_PER_KNOWN)
    __require(params.RHO > 0, 'rho must be positive, got {}', params.RHO)
    __require(round_half_up(params.SAMPLES_PER_KNOWN / params.RHO) >= 1,
              'n_k / rho rounds to zero samples per unknown class '
              '(n_k={}, rho={})', params.SAMPLES_PER_KNOWN, params.RHO)
    __require(0 < params.LABELED_FRACTION < 1,
              'labeled_fraction must be in (0, 1), got {}',
              params.LABELED_FRACTION)
    __require(params.DIM > 0, 'dim must be positive, got {}', params.DIM)
    __require(params.SEP >= 0, 'sep must be nonnegative, got {}', params.SEP)


def coerce(key, text, default):
    """
    Convert a raw config string to the type of its default value.

    Args:
        key: parameter name, for error messages
        text: raw string from the config file or command line
        default: default value for the parameter

    Returns:
        converted value
    """
    text = text.strip()
    try:
        if isinstance(default, bool):
            if text.lower() not in ('true', 'false', '1', '0', 'yes', 'no'):
                raise ValueError(text)
            return text.lower() in ('true', '1', 'yes')
        if isinstance(default, list):
            item = type(default[0]) if default else float
            return [item(v) for v in text.split(',') if v.strip()]
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise ValueError('invalid value for {}: {!r}'.format(key.lower(),
                                                             text))

    return text


def read_config(path, params=None):
    """
    Read a flat key = value config file on top of the defaults.

    Keys match the parameter names case-insensitively; a leading section
    header is allowed but not required.

    Args:
        path: config file location
        params: Parameters to update, defaults when None

    Returns:
        Parameters
    """
    if not os.path.isfile(path):
        raise FileNotFoundError('file not found: {}'.format(path))

    if params is None:
        params = get_default_params()

    with open(path) as handle:
        text = handle.read()

    parser = configparser.ConfigParser(interpolation=None)
    parser.read_string('[{}]\n'.format(parser.default_section) + text)

    sections = [parser.defaults()] + [parser[s] for s in parser.sections()]
    for section in sections:
        for key, value in section.items():
            name = key.upper()
            if name not in params:
                raise ValueError('unknown config key: {}'.format(key))
            params[name] = coerce(name, value, params[name])

    log.debug('Config read from %s', path)

    return params
