"""
Moving-average estimate of the class distribution of the unlabeled set.

Starting from uniform, once per epoch:

    r := mu r + (1 - mu) z

where z is the hard histogram of the classifier's argmax over the unlabeled
rows.
"""
import logging

import numpy as np

from ltgcd.math_utils import check_simplex
from ltgcd.models import ClassPrior

log = logging.getLogger(__name__)


def init_uniform(num_classes, mu=0.99):
    """
    Uniform prior over C classes.

    Args:
        num_classes: C, at least 2
        mu: momentum carried by the prior

    Returns:
        ClassPrior
    """
    if num_classes < 2:
        raise ValueError('a class prior needs C >= 2, got {}'
                         .format(num_classes))
    if not 0 <= mu <= 1:
        raise ValueError('mu must be in [0, 1], got {}'.format(mu))

    return ClassPrior(r=np.full(num_classes, 1.0 / num_classes), mu=mu,
                      epoch_count=0)


def hard_histogram(probs):
    """
    Fraction of rows whose argmax is each class.

    np.argmax returns the first maximum, so ties go to the lowest index.

    Args:
        probs: n x C row-stochastic array, n >= 1

    Returns:
        1-d ndarray on the simplex
    """
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 2 or probs.shape[0] < 1:
        raise ValueError('hard_histogram needs at least one row')

    counts = np.bincount(np.argmax(probs, axis=1), minlength=probs.shape[1])

    return counts / probs.shape[0]


def ema_update(prior, z):
    """
    One moving-average step of the prior toward z.

    Args:
        prior: ClassPrior
        z: C-simplex vector

    Returns:
        ClassPrior
    """
    z = np.asarray(z, dtype=float)
    check_simplex(z, 'z')
    if z.shape != prior.r.shape:
        raise ValueError('z has {} classes, prior has {}'
                         .format(z.size, prior.r.size))

    r = prior.mu * prior.r + (1 - prior.mu) * z
    log.debug('Prior update %s: max shift %s', prior.epoch_count + 1,
              np.abs(r - prior.r).max())

    return prior._replace(r=r, epoch_count=prior.epoch_count + 1)
