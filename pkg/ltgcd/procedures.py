"""Functions for providing the over-arching methodology. Tying together the
individual components that make up one training run: augmentation,
projection, the weighted objective, manual backprop, SGD, and the per-epoch
refresh of the class prior and the prototypes.

Methods must accept the processing parameters, then use those values for the
more functional methods that they call.

The result of a run is a plain dict, the run record, carrying the config
echo, the per-epoch training log, the final metrics and the model snapshot.
"""
import logging
import time

import numpy as np

from ltgcd import app, prior as class_prior
from ltgcd.datagen import make_views
from ltgcd.evaluate import evaluate
from ltgcd.losses import overall_loss
from ltgcd.math_utils import interleave, learning_rate
from ltgcd.models import BatchViews, ModelState
from ltgcd.models.projection import (backward, forward, init_head,
                                     init_optimizer, sgd_step)
from ltgcd.models.prototypes import (init_prototypes, predict_probs,
                                     update_prototypes)
from ltgcd.version import __algorithm__ as algorithm

log = logging.getLogger(__name__)

LOSS_FIELDS = ('l_ins', 'l_sup', 'h_prior', 'h_uniform', 'l_overall')


def init_state(data, params, seed):
    """
    Fresh head, prototypes and optimizer for a dataset.

    Args:
        data: EmbeddingDataset
        params: Parameters
        seed: run seed

    Returns:
        ModelState
    """
    head = init_head(data.dim, params.HIDDEN_DIM, params.PROJ_DIM,
                     app.derive_stream(seed, 'init'))

    features = forward(head, data.points)
    protos = init_prototypes(features, data.labels, data.is_labeled,
                             data.known_classes, data.num_classes,
                             app.derive_stream(seed, 'proto'))

    return ModelState(head=head, prototypes=protos,
                      optimizer=init_optimizer(head, params.EPOCHS))


def __train_epoch(data, state, prior, params, order, augment_rng):
    """
    One pass over the shuffled rows.

    Returns:
        ModelState after the last batch
        dict of mean loss components over the batches that ran
    """
    head, opt = state.head, state.optimizer
    totals = dict.fromkeys(LOSS_FIELDS, 0.0)
    batches = 0

    for start in range(0, order.size, params.BATCH_SIZE):
        idx = order[start:start + params.BATCH_SIZE]
        labeled = data.is_labeled[idx]

        if np.sum(~labeled) < 2:
            log.warning('Skipping batch at %s with %s unlabeled rows', start,
                        np.sum(~labeled))
            continue

        views = make_views(data, idx, params.NOISE_SIGMA, params.DROP_PROB,
                           augment_rng)
        x = interleave(views.view_a, views.view_b)

        # Unlabeled labels are masked out; training never sees them
        visible = np.where(labeled, data.labels[idx], -1)
        z = forward(head, x)
        if not np.all(np.isfinite(z)):
            raise FloatingPointError('non-finite features at batch {}'
                                     .format(start))

        batch = BatchViews(z=z, labeled_mask=labeled, labels=visible)

        losses = overall_loss(batch, state.prototypes, prior.r, params)
        if not np.isfinite(losses.l_overall):
            raise FloatingPointError('non-finite loss {} at batch {}'
                                     .format(losses.l_overall, start))

        grads = backward(head, x, losses.grad_z)
        head, opt = sgd_step(head, grads, opt, params)

        for field in LOSS_FIELDS:
            totals[field] += getattr(losses, field)
        batches += 1

        log.debug('Batch %s: overall=%s', start, losses.l_overall)

    means = {k: (v / batches if batches else None) for k, v in totals.items()}

    return state._replace(head=head, optimizer=opt), means


def __refresh(data, state, prior, params):
    """
    Per-epoch update of the class prior and the prototypes from the whole
    dataset.
    """
    features = forward(state.head, data.points)
    probs = predict_probs(features, state.prototypes, params.TAU_P)
    assignments = np.argmax(probs, axis=1)

    prior = class_prior.ema_update(
        prior, class_prior.hard_histogram(probs[~data.is_labeled]))
    protos = update_prototypes(features, assignments, data.labels,
                               data.is_labeled, state.prototypes,
                               params.PROTO_EMA, data.known_classes)

    return state._replace(prototypes=protos), prior


def train_one(data, params, seed=None):
    """
    Train and evaluate one model.

    Epoch loop: shuffle; per batch make_views -> forward -> overall_loss ->
    backward -> sgd_step; per epoch hard histogram of the unlabeled
    predictions -> prior update -> prototype update.  A non-finite loss or
    gradient, or a projection collapsing to a zero-norm feature, ends the
    run with status 'failed'.

    Args:
        data: EmbeddingDataset
        params: Parameters
        seed: run seed, params.SEED when None

    Returns:
        dict run record: algorithm, config, seed, status, error, epochs,
        metrics and the ModelState under 'state'
    """
    seed = params.SEED if seed is None else seed
    app.check_params(params)
    if np.sum(~data.is_labeled) < 2:
        raise ValueError('need at least 2 unlabeled rows to train')

    t1 = time.time()

    state = init_state(data, params, seed)
    prior = class_prior.init_uniform(data.num_classes, params.MU)
    batch_rng = app.derive_stream(seed, 'batch')
    augment_rng = app.derive_stream(seed, 'augment')

    record = {'algorithm': algorithm,
              'config': {k.lower(): v for k, v in params.items()},
              'seed': int(seed),
              'status': 'ok',
              'error': None,
              'epochs': []}

    try:
        for epoch in range(params.EPOCHS):
            order = batch_rng.permutation(data.labels.size)
            lr = learning_rate(params.LR0, epoch, params.EPOCHS,
                               params.LR_MILESTONES)

            state, means = __train_epoch(data, state, prior, params, order,
                                         augment_rng)
            state, prior = __refresh(data, state, prior, params)
            state = state._replace(
                optimizer=state.optimizer._replace(epoch=epoch + 1))

            entry = {'epoch': epoch, 'lr': lr, 'prior': prior.r.tolist()}
            entry.update(means)
            record['epochs'].append(entry)

            log.info('Epoch %s/%s: lr=%s overall=%s', epoch + 1, params.EPOCHS,
                     lr, means['l_overall'])
    except (FloatingPointError, ValueError) as e:
        log.error('Run with seed %s aborted: %s', seed, e)
        record['status'] = 'failed'
        record['error'] = str(e)
        record['metrics'] = None
        record['state'] = state
        return record

    record['metrics'] = evaluate(state, data, seed,
                                 params.KMEANS_MAX_ITER)._asdict()
    record['state'] = state

    log.debug('Total time for run: %s', time.time() - t1)

    return record
