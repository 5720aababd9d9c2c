import base64
import json
import os
from collections import namedtuple

import numpy as np

# Data
EmbeddingDataset = namedtuple('EmbeddingDataset',
                              ['points', 'labels', 'is_labeled',
                               'known_classes', 'unknown_classes',
                               'num_classes', 'dim'])
ViewPair = namedtuple('ViewPair', ['view_a', 'view_b', 'source'])

# Model
ProjectionHead = namedtuple('ProjectionHead', ['w1', 'b1', 'w2', 'b2'])
OptimizerState = namedtuple('OptimizerState',
                            ['velocity', 'epoch', 'total_epochs'])
ModelState = namedtuple('ModelState', ['head', 'prototypes', 'optimizer'])

# Objective
ClassPrior = namedtuple('ClassPrior', ['r', 'mu', 'epoch_count'])
BatchViews = namedtuple('BatchViews', ['z', 'labeled_mask', 'labels'])
ContrastiveResult = namedtuple('ContrastiveResult',
                               ['value', 'grad', 'n_anchors'])
LossBreakdown = namedtuple('LossBreakdown',
                           ['l_ins', 'l_sup', 'h_prior', 'h_uniform',
                            'l_overall', 'grad_z'])

# Evaluation; un1_acc / un2_acc are None when there are no novel rows
MetricsReport = namedtuple('MetricsReport',
                           ['all_acc', 'known_acc', 'un1_acc', 'un2_acc',
                            'n_all', 'n_known', 'n_novel', 'seed'])


def __encode(array):
    array = np.ascontiguousarray(array, dtype='<f8')
    return {'shape': list(array.shape),
            'data': base64.b64encode(array.tobytes()).decode('ascii')}


def __decode(entry):
    raw = base64.b64decode(entry['data'])
    return np.frombuffer(raw, dtype='<f8').reshape(entry['shape']).copy()


def save_checkpoint(path, state):
    """
    Write the projection head and prototypes as JSON.

    Every matrix is stored with its shape and a base64 string of its
    little-endian float64 buffer, so a reload is bit exact.

    Args:
        path: destination file
        state: ModelState
    """
    doc = {'head': {k: __encode(v) for k, v in state.head._asdict().items()},
           'prototypes': __encode(state.prototypes)}

    with open(path, 'w') as handle:
        json.dump(doc, handle, indent=1, sort_keys=True)


def load_checkpoint(path):
    """
    Read a checkpoint written by save_checkpoint.

    Args:
        path: checkpoint file

    Returns:
        ModelState with no optimizer state
    """
    if not os.path.isfile(path):
        raise FileNotFoundError('file not found: {}'.format(path))

    with open(path) as handle:
        doc = json.load(handle)

    try:
        head = ProjectionHead(**{k: __decode(doc['head'][k])
                                 for k in ProjectionHead._fields})
        prototypes = __decode(doc['prototypes'])
    except (KeyError, TypeError, ValueError) as e:
        raise ValueError('malformed checkpoint {}: {}'.format(path, e))

    return ModelState(head=head, prototypes=prototypes, optimizer=None)
