"""
Prototype classifier: one unit-norm vector per class, probabilities from a
temperature-scaled softmax over cosine similarities.

Prototypes are refreshed once per epoch and held constant within a gradient
step, so the distribution regularizers only push on the features.
"""
import logging

import numpy as np
from scipy.special import softmax

from ltgcd.math_utils import normalize_rows
from ltgcd.models.kmeans import plusplus

log = logging.getLogger(__name__)


def init_prototypes(features, labels, is_labeled, known_classes, num_classes,
                    rng):
    """
    Initial prototypes for all C classes.

    Known classes start at the normalized mean of their labeled features,
    unknown classes are k-means++ seeded from the unlabeled features,
    continuing from the known prototypes.

    Args:
        features: n x p unit-norm features of the whole dataset
        labels: n class ids
        is_labeled: n booleans
        known_classes: sorted known class ids
        num_classes: C
        rng: numpy Generator, the 'proto' stream

    Returns:
        C x p ndarray
    """
    protos = np.zeros((num_classes, features.shape[1]))
    known = np.asarray(sorted(known_classes), dtype=int)

    means = np.array([features[is_labeled & (labels == c)].mean(axis=0)
                      for c in known])
    protos[known] = normalize_rows(means)

    unknown = np.setdiff1d(np.arange(num_classes), known)
    protos[unknown] = plusplus(features[~is_labeled], len(unknown), rng,
                               fixed=protos[known])

    return protos


def predict_probs(features, protos, tau_p):
    """
    Class probabilities q_ic = softmax_c(<v_i, M_c> / tau_p).

    Args:
        features: batch x p unit-norm array
        protos: C x p unit-norm array
        tau_p: prototype temperature

    Returns:
        batch x C row-stochastic ndarray
    """
    return softmax(features @ protos.T / tau_p, axis=1)


def __blend(old, target, ema):
    mixed = ema * old + (1 - ema) * target
    norm = np.linalg.norm(mixed)

    # Antipodal old/target at ema = 0.5 cancel out
    if norm < 1e-12:
        return old

    return mixed / norm


def update_prototypes(features, assignments, labels, is_labeled, protos, ema,
                      known_classes):
    """
    Move every prototype toward the normalized mean of its members.

    Known class targets come from the labeled features of the class, unknown
    class targets from the unlabeled features assigned to it.  A class with
    no members keeps its prototype.

    Args:
        features: n x p unit-norm features of the whole dataset
        assignments: n argmax class ids, only unlabeled rows are read
        labels: n class ids, only labeled rows are read
        is_labeled: n booleans
        protos: C x p current prototypes
        ema: weight of the old prototype, in [0, 1]
        known_classes: known class ids

    Returns:
        C x p ndarray
    """
    if not 0 <= ema <= 1:
        raise ValueError('ema must be in [0, 1], got {}'.format(ema))

    known = set(int(c) for c in known_classes)
    updated = protos.copy()

    for c in range(protos.shape[0]):
        if c in known:
            members = is_labeled & (labels == c)
        else:
            members = ~is_labeled & (assignments == c)

        if not members.any():
            continue

        mean = features[members].mean(axis=0)
        norm = np.linalg.norm(mean)
        if norm < 1e-12:
            continue

        updated[c] = __blend(protos[c], mean / norm, ema)

    return updated
