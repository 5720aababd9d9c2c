"""
Training objective: instance contrastive loss on unlabeled views, supervised
contrastive loss on labeled views, and two cross-entropies pulling the
batch-mean prediction toward the estimated class prior and toward uniform.

    L = L_ins + lambda L_sup + alpha H(r, q_bar) + beta H(u, q_bar)

Every function returns its value together with the exact gradient on the
feature rows it was given.  Rows 2i and 2i+1 of a feature matrix are the two
views of instance i.
"""
import logging

import numpy as np
from scipy.special import logsumexp

from ltgcd.math_utils import LOG_FLOOR, check_simplex
from ltgcd.models import ContrastiveResult, LossBreakdown
from ltgcd.models.prototypes import predict_probs

log = logging.getLogger(__name__)


def __log_softmax_offdiag(z, tau):
    """
    Row-wise log-softmax of z z^T / tau with the diagonal excluded.

    Returns:
        log probabilities (diagonal -inf) and probabilities (diagonal 0)
    """
    logits = z @ z.T / tau
    np.fill_diagonal(logits, -np.inf)
    log_prob = logits - logsumexp(logits, axis=1, keepdims=True)

    return log_prob, np.exp(log_prob)


def __contrastive(z, positives, tau):
    """
    Mean over anchors with at least one positive of the mean -log p over
    its positives.

    Args:
        z: m x p features
        positives: m x m boolean, diagonal False
        tau: temperature

    Returns:
        ContrastiveResult
    """
    counts = positives.sum(axis=1)
    active = counts > 0
    n_anchors = int(active.sum())

    if n_anchors == 0:
        return ContrastiveResult(0.0, np.zeros_like(z), 0)

    log_prob, prob = __log_softmax_offdiag(z, tau)

    weights = np.zeros_like(prob)
    weights[active] = positives[active] / counts[active, None]

    per_anchor = -np.sum(np.where(positives, log_prob, 0.0), axis=1)
    value = float(np.sum(per_anchor[active] / counts[active]) / n_anchors)

    # d value / d logits; logits = z z^T / tau
    grad_logits = np.zeros_like(prob)
    grad_logits[active] = (prob[active] - weights[active]) / n_anchors

    grad = (grad_logits + grad_logits.T) @ z / tau

    return ContrastiveResult(value, grad, n_anchors)


def info_nce(z, tau):
    """
    Instance-level contrastive loss over interleaved views.

    The positive of anchor a is its sibling view, the denominator runs over
    every other view in the sub-batch.

    Args:
        z: 2B_u x p features of unlabeled instances, views interleaved
        tau: temperature

    Returns:
        ContrastiveResult
    """
    m = z.shape[0]
    if m < 4 or m % 2:
        raise ValueError('info_nce needs at least 2 instances with two views '
                         'each, got {} rows'.format(m))

    siblings = np.arange(m) ^ 1
    positives = np.zeros((m, m), dtype=bool)
    positives[np.arange(m), siblings] = True

    return __contrastive(z, positives, tau)


def sup_con(z, labels, tau):
    """
    Supervised contrastive loss; positives of an anchor are all other views
    with the same label, the sibling view included.

    Anchors without positives are left out of the mean; when no anchor has a
    positive the value is 0 with n_anchors == 0 as the flag.

    Args:
        z: m x p features of labeled views
        labels: m class ids, one per view
        tau: temperature

    Returns:
        ContrastiveResult
    """
    labels = np.asarray(labels)
    m = z.shape[0]

    positives = labels[:, None] == labels[None, :]
    np.fill_diagonal(positives, False)

    result = __contrastive(z, positives, tau)
    if result.n_anchors == 0:
        log.warning('SupCon batch of %s views has no positive pair', m)

    return result


def target_cross_entropy(q_bar, target):
    """
    H(target, q_bar) = -sum_c target_c log q_bar_c, with q_bar clamped at
    1e-12 before the log.

    Args:
        q_bar: C-simplex vector, the mean prediction
        target: C-simplex vector

    Returns:
        float: value
        1-d ndarray: gradient on q_bar
    """
    q_bar = np.asarray(q_bar, dtype=float)
    target = np.asarray(target, dtype=float)
    check_simplex(q_bar, 'q_bar')
    check_simplex(target, 'target')

    clamped = np.maximum(q_bar, LOG_FLOOR)

    return float(-np.sum(target * np.log(clamped))), -target / clamped


def __instance_rows(mask):
    idx = np.flatnonzero(mask)
    rows = np.empty(2 * idx.size, dtype=int)
    rows[0::2] = 2 * idx
    rows[1::2] = 2 * idx + 1

    return rows


def overall_loss(batch, protos, prior_r, params):
    """
    Weighted objective and its gradient on every feature row of the batch.

    The regularizer gradients pass through the batch mean and the softmax of
    the prototype classifier; prototypes are constants here.

    Args:
        batch: BatchViews
        protos: C x p prototypes
        prior_r: C-simplex estimated class prior
        params: Parameters with TAU, TAU_P, LAMBDA, ALPHA, BETA

    Returns:
        LossBreakdown
    """
    z = np.asarray(batch.z, dtype=float)
    mask = np.asarray(batch.labeled_mask, dtype=bool)
    labels = np.asarray(batch.labels)
    check_simplex(prior_r, 'prior')

    unl_rows = __instance_rows(~mask)
    lab_rows = __instance_rows(mask)

    grad_z = np.zeros_like(z)

    ins = info_nce(z[unl_rows], params.TAU)
    grad_z[unl_rows] += ins.grad

    if lab_rows.size:
        sup = sup_con(z[lab_rows], np.repeat(labels[mask], 2), params.TAU)
        grad_z[lab_rows] += params.LAMBDA * sup.grad
        l_sup = sup.value
    else:
        l_sup = 0.0

    z_unl = z[unl_rows]
    q = predict_probs(z_unl, protos, params.TAU_P)
    q_bar = q.mean(axis=0)
    uniform = np.full(protos.shape[0], 1.0 / protos.shape[0])

    h_prior, g_prior = target_cross_entropy(q_bar, prior_r)
    h_uniform, g_uniform = target_cross_entropy(q_bar, uniform)

    # d/dq_i of the weighted regularizers, identical for every row
    g_q = (params.ALPHA * g_prior + params.BETA * g_uniform) / q.shape[0]
    g_logits = q * (g_q[None, :] - (q @ g_q)[:, None])
    grad_z[unl_rows] += g_logits @ protos / params.TAU_P

    l_overall = (ins.value + params.LAMBDA * l_sup +
                 params.ALPHA * h_prior + params.BETA * h_uniform)

    return LossBreakdown(l_ins=ins.value, l_sup=l_sup, h_prior=h_prior,
                         h_uniform=h_uniform, l_overall=l_overall,
                         grad_z=grad_z)
