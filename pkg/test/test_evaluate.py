import itertools

import numpy as np
import pytest

from ltgcd.evaluate import agnostic_metrics, cluster_accuracy, evaluate, \
    hungarian
from ltgcd.models import ModelState

from test.shared import identity_head, separable_dataset


def brute_force(cost, perms):
    return cost[np.arange(cost.shape[0]), perms].sum(axis=1).min()


def test_hungarian_identity():
    perm = hungarian([[0, 1], [1, 0]])

    assert list(perm) == [0, 1]


def test_hungarian_three():
    cost = np.array([[4, 1, 3], [2, 0, 5], [3, 2, 2]])

    perm = hungarian(cost)

    assert list(perm) == [1, 0, 2]
    assert cost[np.arange(3), perm].sum() == 5


def test_hungarian_brute_force():
    rng = np.random.default_rng(0)

    for n in range(2, 9):
        perms = np.array(list(itertools.permutations(range(n))))
        for _ in range(100):
            cost = rng.random((n, n))
            perm = hungarian(cost)

            assert sorted(perm) == list(range(n))
            assert np.isclose(cost[np.arange(n), perm].sum(),
                              brute_force(cost, perms), rtol=0, atol=1e-12)


def test_hungarian_rejects_bad_input():
    with pytest.raises(ValueError):
        hungarian(np.zeros((2, 3)))

    with pytest.raises(ValueError):
        hungarian([[0, np.inf], [1, 0]])


def test_cluster_accuracy_example():
    assert cluster_accuracy([0, 0, 1, 1, 2], [1, 1, 0, 0, 0]) == 0.8


def test_cluster_accuracy_permuted():
    y = np.array([3, 3, 4, 4, 5, 5])

    assert cluster_accuracy(y, [7, 7, 1, 1, 0, 0]) == 1.0


def test_agnostic_perfect():
    y = np.array([0, 0, 1, 1, 2, 2, 3, 3])

    metrics = agnostic_metrics(y, y, (0, 1), (2, 3))

    assert metrics == (1.0, 1.0, 1.0)


def test_agnostic_permutation_invariant():
    y = np.array([0, 0, 1, 1, 2, 2, 3, 3, 3])
    clusters = np.array([0, 1, 1, 1, 2, 3, 3, 3, 2])
    swapped = np.where(clusters == 2, 3, np.where(clusters == 3, 2, clusters))

    assert (agnostic_metrics(y, clusters, (0, 1), (2, 3)) ==
            agnostic_metrics(y, swapped, (0, 1), (2, 3)))


def test_agnostic_known_clusters_are_not_matched():
    # Known clusters keep their identity even when swapping would score more
    y = np.array([0, 0, 1, 1])
    clusters = np.array([1, 1, 0, 0])

    all_acc, known_acc, un2_acc = agnostic_metrics(y, clusters, (0, 1), (2,))

    assert all_acc == 0.0
    assert known_acc == 0.0
    assert un2_acc is None


def test_agnostic_novel_rows_in_known_clusters():
    y = np.array([0, 1, 2, 2])
    clusters = np.array([0, 1, 0, 2])

    all_acc, known_acc, un2_acc = agnostic_metrics(y, clusters, (0, 1), (2,))

    assert all_acc == 0.75
    assert known_acc == 1.0
    assert un2_acc == 0.5


def separable_state(data):
    return ModelState(head=identity_head(data.dim), prototypes=None,
                      optimizer=None)


def test_evaluate_separable():
    data = separable_dataset()

    report = evaluate(separable_state(data), data, seed=0)

    assert report.all_acc == 1.0
    assert report.known_acc == 1.0
    assert report.un1_acc == 1.0
    assert report.un2_acc == 1.0
    assert report.n_all == 30
    assert report.n_known == 10
    assert report.n_novel == 20


def test_evaluate_without_novel_rows():
    data = separable_dataset(n_known=4)

    report = evaluate(separable_state(data), data, seed=0)

    assert report.known_acc == 1.0
    assert report.un1_acc is None
    assert report.un2_acc is None
    assert report.n_novel == 0


def test_evaluate_deterministic():
    data = separable_dataset(spread=2.0, seed=5)
    state = separable_state(data)

    assert evaluate(state, data, seed=4) == evaluate(state, data, seed=4)
