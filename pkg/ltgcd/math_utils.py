"""
Contains commonly used math functions.

This file is meant to help code reuse, profiling, and look at speeding up
individual operations.

In the interest of avoiding circular imports, this should be kept to be fairly
stand-alone. I.e. it should not import any other piece of the overall project.
"""
import numpy as np

# Pre-normalization rows shorter than this cannot be projected on the sphere
DEGENERATE_NORM = 1e-12

# Lower clamp on probabilities before taking logs
LOG_FLOOR = 1e-12


def round_half_up(value):
    """
    Round to the nearest integer, halves going up.

    Python's round() sends halves to the even neighbour, which would make
    n_k / rho = 2.5 produce 2 samples.

    Args:
        value: float

    Returns:
        int
    """
    return int(np.floor(value + 0.5))


def row_norms(matrix):
    """
    Euclidean norm of every row.

    Args:
        matrix: 2-d array

    Returns:
        1-d ndarray
    """
    return np.sqrt(np.sum(matrix ** 2, axis=1))


def normalize_rows(matrix):
    """
    Scale every row to unit length.

    Args:
        matrix: 2-d array

    Returns:
        2-d ndarray of unit-norm rows

    Raises:
        ValueError: a row has norm below DEGENERATE_NORM
    """
    norms = row_norms(matrix)

    if np.any(norms < DEGENERATE_NORM):
        raise ValueError('degenerate row: norm {} below {}'
                         .format(norms.min(), DEGENERATE_NORM))

    return matrix / norms[:, None]


def on_simplex(vector, tol=1e-6):
    """
    Check that a vector is a probability distribution.

    Args:
        vector: 1-d array
        tol: allowed deviation of the sum from one

    Returns:
        bool
    """
    vector = np.asarray(vector, dtype=float)

    return (vector.ndim == 1 and np.all(np.isfinite(vector)) and
            np.all(vector >= 0) and abs(vector.sum() - 1) <= tol)


def check_simplex(vector, name, tol=1e-6):
    if not on_simplex(vector, tol):
        raise ValueError('{} is not on the probability simplex: {}'
                         .format(name, vector))


def entropy(dist):
    """
    Shannon entropy in nats, with 0 log 0 := 0.

    Args:
        dist: 1-d array on the simplex

    Returns:
        float
    """
    dist = np.asarray(dist, dtype=float)
    nz = dist > 0

    return float(-np.sum(dist[nz] * np.log(dist[nz])))


def learning_rate(lr0, epoch, total_epochs, milestones=(0.5, 0.75)):
    """
    Step schedule: lr0 divided by ten for each milestone already reached.

    Args:
        lr0: initial learning rate
        epoch: current 0-based epoch
        total_epochs: configured number of epochs
        milestones: fractions of total_epochs

    Returns:
        float
    """
    passed = sum(1 for m in milestones if epoch >= m * total_epochs)

    return lr0 * 0.1 ** passed


def interleave(view_a, view_b):
    """
    Stack two views so rows 2i and 2i+1 come from instance i.

    Args:
        view_a: n x d array
        view_b: n x d array

    Returns:
        2n x d ndarray
    """
    out = np.empty((2 * view_a.shape[0], view_a.shape[1]))
    out[0::2] = view_a
    out[1::2] = view_b

    return out
