"""
Two-layer projection head mapping input embeddings onto the unit sphere.

    a = W1 x + b1,  h = relu(a),  z = W2 h + b2,  v = z / |z|

Gradients are worked out by hand; there is no autodiff engine underneath.
"""
import logging

import numpy as np

from ltgcd.math_utils import DEGENERATE_NORM, learning_rate, row_norms
from ltgcd.models import OptimizerState, ProjectionHead

log = logging.getLogger(__name__)


def init_head(dim, hidden_dim, proj_dim, rng):
    """
    He-uniform initialization, zero biases.

    Args:
        dim: input dimension d
        hidden_dim: hidden width h
        proj_dim: output dimension p
        rng: numpy Generator, the 'init' stream

    Returns:
        ProjectionHead
    """
    bound1 = np.sqrt(6.0 / dim)
    bound2 = np.sqrt(6.0 / hidden_dim)

    return ProjectionHead(w1=rng.uniform(-bound1, bound1, (hidden_dim, dim)),
                          b1=np.zeros(hidden_dim),
                          w2=rng.uniform(-bound2, bound2,
                                         (proj_dim, hidden_dim)),
                          b2=np.zeros(proj_dim))


def __affine(head, x):
    pre = x @ head.w1.T + head.b1
    hidden = np.maximum(pre, 0)
    z = hidden @ head.w2.T + head.b2
    norms = row_norms(z)

    if np.any(norms < DEGENERATE_NORM):
        raise ValueError('degenerate projection: pre-normalization norm {}'
                         .format(norms.min()))

    return pre, hidden, z, norms


def forward(head, x):
    """
    Project a batch of embeddings to unit-norm features.

    Args:
        head: ProjectionHead
        x: batch x d array

    Returns:
        batch x p ndarray with unit-norm rows
    """
    _, _, z, norms = __affine(head, np.asarray(x, dtype=float))

    return z / norms[:, None]


def backward(head, x, grad_out):
    """
    Parameter gradients of a scalar loss given its gradient on the features.

    The row normalization contributes the Jacobian (I - v v^T) / |z|.

    Args:
        head: ProjectionHead
        x: batch x d array, the inputs given to forward
        grad_out: batch x p gradient of the loss on forward(head, x)

    Returns:
        ProjectionHead of gradients, same shapes as head
    """
    x = np.asarray(x, dtype=float)
    pre, hidden, z, norms = __affine(head, x)
    v = z / norms[:, None]

    radial = np.sum(v * grad_out, axis=1)
    grad_z = (grad_out - v * radial[:, None]) / norms[:, None]

    grad_hidden = grad_z @ head.w2
    grad_pre = grad_hidden * (pre > 0)

    return ProjectionHead(w1=grad_pre.T @ x,
                          b1=grad_pre.sum(axis=0),
                          w2=grad_z.T @ hidden,
                          b2=grad_z.sum(axis=0))


def init_optimizer(head, total_epochs):
    """
    Zero velocity buffers shaped like every parameter of the head.

    Args:
        head: ProjectionHead
        total_epochs: configured number of epochs

    Returns:
        OptimizerState
    """
    velocity = ProjectionHead(*[np.zeros_like(p) for p in head])

    return OptimizerState(velocity=velocity, epoch=0,
                          total_epochs=total_epochs)


def sgd_step(head, grads, opt, params):
    """
    One SGD update with momentum, weight decay and the step schedule.

        v <- momentum * v + grad + weight_decay * param
        param <- param - lr * v

    Args:
        head: ProjectionHead
        grads: ProjectionHead of gradients
        opt: OptimizerState
        params: Parameters with LR0, MOMENTUM, WEIGHT_DECAY, LR_MILESTONES

    Returns:
        ProjectionHead: updated parameters
        OptimizerState: updated velocity
    """
    if opt.epoch >= opt.total_epochs:
        raise ValueError('epoch {} is past the configured {} epochs'
                         .format(opt.epoch, opt.total_epochs))

    if not all(np.all(np.isfinite(g)) for g in grads):
        raise FloatingPointError('non-finite gradient')

    lr = learning_rate(params.LR0, opt.epoch, opt.total_epochs,
                       params.LR_MILESTONES)

    velocity = [params.MOMENTUM * v + g + params.WEIGHT_DECAY * p
                for p, g, v in zip(head, grads, opt.velocity)]
    updated = [p - lr * v for p, v in zip(head, velocity)]

    return (ProjectionHead(*updated),
            opt._replace(velocity=ProjectionHead(*velocity)))
