"""
Clustering accuracy in the four flavours reported for long-tailed GCD.

All / Known / Un2 (unknown-agnostic) come from one semi-supervised clustering
of every unlabeled row: known-class clusters are seeded by labeled means with
the labeled rows anchored, so they keep their class identity, and only the
novel clusters are Hungarian-matched to novel classes.

Un1 (unknown-aware) clusters the rows whose true class is novel on their own
and Hungarian-matches the result over all novel classes.
"""
import logging

import numpy as np
from scipy.optimize import linear_sum_assignment

from ltgcd import app
from ltgcd.math_utils import normalize_rows
from ltgcd.models import MetricsReport
from ltgcd.models.kmeans import seeded_kmeans
from ltgcd.models.projection import forward

log = logging.getLogger(__name__)


def hungarian(cost):
    """
    Permutation minimizing the total assignment cost.

    Args:
        cost: n x n finite array

    Returns:
        1-d ndarray pi with row i assigned to column pi[i]
    """
    cost = np.asarray(cost, dtype=float)

    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ValueError('cost matrix must be square, got shape {}'
                         .format(cost.shape))
    if not np.all(np.isfinite(cost)):
        raise ValueError('cost matrix has non-finite entries')

    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(cost.shape[0], dtype=int)
    perm[rows] = cols

    return perm


def __match_counts(clusters, classes, cluster_ids, class_ids):
    """
    Cluster -> class mapping maximizing matched counts.

    The confusion matrix is padded with zero rows / columns to a square.

    Returns:
        dict cluster id -> class id, clusters matched to padding left out
    """
    size = max(len(cluster_ids), len(class_ids))
    counts = np.zeros((size, size))

    cluster_pos = {c: i for i, c in enumerate(cluster_ids)}
    class_pos = {c: j for j, c in enumerate(class_ids)}
    for c, y in zip(clusters, classes):
        if c in cluster_pos and y in class_pos:
            counts[cluster_pos[c], class_pos[y]] += 1

    perm = hungarian(-counts)

    return {cluster_ids[i]: class_ids[perm[i]]
            for i in range(len(cluster_ids)) if perm[i] < len(class_ids)}


def cluster_accuracy(y_true, clusters):
    """
    Fraction of rows correct after the optimal cluster-to-class matching.

    Args:
        y_true: n class ids
        clusters: n cluster ids

    Returns:
        float
    """
    y_true = np.asarray(y_true)
    clusters = np.asarray(clusters)

    mapping = __match_counts(clusters.tolist(), y_true.tolist(),
                             np.unique(clusters).tolist(),
                             np.unique(y_true).tolist())
    predicted = np.array([mapping.get(c, -1) for c in clusters.tolist()])

    return float(np.mean(predicted == y_true))


def __accuracy(pred, truth, rows):
    if not rows.any():
        return None
    return float(np.mean(pred[rows] == truth[rows]))


def agnostic_metrics(y_true, clusters, known_classes, novel_classes):
    """
    All / Known / Un2 accuracies of a joint clustering.

    Cluster i < len(known_classes) stands for the i-th known class (sorted);
    the remaining clusters are matched to novel classes.

    Args:
        y_true: true class of every unlabeled row
        clusters: cluster of every unlabeled row
        known_classes: known class ids
        novel_classes: novel class ids

    Returns:
        tuple of all, known and un2 accuracies; None where no row qualifies
    """
    y_true = np.asarray(y_true)
    clusters = np.asarray(clusters)
    known = sorted(int(c) for c in known_classes)
    novel = sorted(int(c) for c in novel_classes)
    k = len(known)

    predicted = np.full(y_true.size, -1)
    in_known = clusters < k
    predicted[in_known] = np.asarray(known, dtype=int)[clusters[in_known]]

    novel_ids = sorted(set(clusters[~in_known].tolist()) |
                       set(range(k, k + len(novel))))
    mapping = __match_counts(clusters[~in_known].tolist(),
                             y_true[~in_known].tolist(), novel_ids, novel)
    for cluster, cls in mapping.items():
        predicted[clusters == cluster] = cls

    is_novel = np.isin(y_true, novel)

    return (__accuracy(predicted, y_true, np.ones(y_true.size, dtype=bool)),
            __accuracy(predicted, y_true, ~is_novel),
            __accuracy(predicted, y_true, is_novel))


def evaluate(state, data, seed, max_iter=300):
    """
    Score a model snapshot on a dataset with ground truth on unlabeled rows.

    Args:
        state: ModelState, only the head is used
        data: EmbeddingDataset
        seed: seed of the 'kmeans' stream
        max_iter: cap on Lloyd iterations

    Returns:
        MetricsReport
    """
    rng = app.derive_stream(seed, 'kmeans')
    features = forward(state.head, data.points)

    known = sorted(data.known_classes)
    novel = sorted(data.unknown_classes)
    labeled = data.is_labeled
    unlabeled = ~labeled

    lookup = np.full(data.num_classes, -1)
    lookup[known] = np.arange(len(known))
    anchors = np.where(labeled, lookup[data.labels], -1)

    seeds = normalize_rows(np.array([features[labeled & (data.labels == c)]
                                     .mean(axis=0) for c in known]))

    clusters, _ = seeded_kmeans(features, data.num_classes, rng, seeds=seeds,
                                anchors=anchors, max_iter=max_iter)

    y_unl = data.labels[unlabeled]
    all_acc, known_acc, un2_acc = agnostic_metrics(y_unl, clusters[unlabeled],
                                                   known, novel)

    novel_rows = unlabeled & np.isin(data.labels, novel)
    n_novel = int(novel_rows.sum())
    if n_novel:
        n_clusters = min(len(novel), n_novel)
        aware, _ = seeded_kmeans(features[novel_rows], n_clusters,
                                 rng, max_iter=max_iter)
        un1_acc = cluster_accuracy(data.labels[novel_rows], aware)
    else:
        log.warning('No novel-class rows, Un1 / Un2 are undefined')
        un1_acc = None

    report = MetricsReport(all_acc=all_acc, known_acc=known_acc,
                           un1_acc=un1_acc, un2_acc=un2_acc,
                           n_all=int(unlabeled.sum()),
                           n_known=int(unlabeled.sum()) - n_novel,
                           n_novel=n_novel, seed=int(seed))

    log.info('Evaluation: all=%s known=%s un1=%s un2=%s', all_acc, known_acc,
             un1_acc, un2_acc)

    return report
