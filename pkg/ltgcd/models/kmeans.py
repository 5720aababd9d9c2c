"""
Cosine-similarity k-means with optional seed centroids and anchored points.

Seed centroids fill a prefix of the clusters, the remaining clusters are
seeded by k-means++ continued from them.  Anchored points are pinned to a
cluster for the whole run, which is how labeled data keeps the known-class
clusters attached to their class.  Follows the scikit-learn
__init__/fit/predict paradigm.
"""
import logging

import numpy as np
import sklearn.base
from sklearn.cluster import kmeans_plusplus

log = logging.getLogger(__name__)

# Largest seed sklearn accepts for its RandomState
_SEED_BOUND = 2 ** 31 - 1


def plusplus(X, n_new, rng, fixed=None):
    """
    k-means++ seeding of n_new centroids drawn from the rows of X.

    With fixed centroids the D^2 sampling continues from them, so the new
    centroids avoid regions the fixed ones already cover.

    Args:
        X: n x p array of unit-norm rows
        n_new: number of centroids to draw
        rng: numpy Generator
        fixed: optional m x p array of existing centroids

    Returns:
        n_new x p ndarray
    """
    if n_new == 0:
        return np.empty((0, X.shape[1]))

    if fixed is None or len(fixed) == 0:
        seed = int(rng.integers(_SEED_BOUND))
        centers, _ = kmeans_plusplus(X, n_new, random_state=seed)
        return centers

    sq_dist = np.min(((X[:, None, :] - fixed[None, :, :]) ** 2).sum(axis=2),
                     axis=1)

    picks = []
    for _ in range(n_new):
        total = sq_dist.sum()
        if total > 0:
            pick = rng.choice(X.shape[0], p=sq_dist / total)
        else:
            pick = rng.integers(X.shape[0])
        picks.append(pick)
        sq_dist = np.minimum(sq_dist, ((X - X[pick]) ** 2).sum(axis=1))

    return X[picks].copy()


def _normalized_means(X, labels, centers):
    out = centers.copy()
    for c in range(centers.shape[0]):
        members = labels == c
        if not members.any():
            continue
        mean = X[members].mean(axis=0)
        norm = np.linalg.norm(mean)
        if norm > 1e-12:
            out[c] = mean / norm

    return out


class SeededKMeans(sklearn.base.BaseEstimator):
    """ Spherical k-means with seeded centroids and anchored assignments

    Args:
        n_clusters (int): number of clusters K
        max_iter (int): cap on Lloyd iterations (default: 300)
        random_state (numpy.random.Generator): stream used for k-means++
            and nothing else

    Attributes:
        labels_ (np.ndarray): cluster index of every training row
        cluster_centers_ (np.ndarray): K x p unit-norm centroids
        inertia_ (float): total within-cluster cosine dissimilarity
        n_iter_ (int): Lloyd iterations run
    """

    def __init__(self, n_clusters, max_iter=300, random_state=None):
        self.n_clusters = n_clusters
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, seeds=None, anchors=None):
        """ Cluster the rows of X

        Args:
            X (np.ndarray): n x p unit-norm features
            seeds (np.ndarray): optional m x p unit-norm centroids for
                clusters 0..m-1
            anchors (np.ndarray): optional length-n ints, the fixed cluster of
                each row or -1 for a free row

        Returns:
            object: `self`
        """
        X = np.asarray(X, dtype=float)
        n = X.shape[0]
        k = self.n_clusters

        if not 0 < k <= n:
            raise ValueError('need 0 < K <= n, got K={} n={}'.format(k, n))

        rng = self.random_state
        if rng is None:
            rng = np.random.default_rng(0)

        if seeds is None:
            seeds = np.empty((0, X.shape[1]))
        seeds = np.asarray(seeds, dtype=float)
        if seeds.shape[0] > k:
            raise ValueError('{} seed centroids for {} clusters'
                             .format(seeds.shape[0], k))
        if seeds.shape[0] and not np.allclose(np.linalg.norm(seeds, axis=1),
                                              1.0, atol=1e-6):
            raise ValueError('seed centroids must be unit-norm')

        if anchors is None:
            anchors = np.full(n, -1)
        anchors = np.asarray(anchors, dtype=int)
        anchored = anchors >= 0
        if np.any(anchors >= k):
            raise ValueError('anchor cluster id out of range')

        centers = np.vstack([seeds, plusplus(X, k - seeds.shape[0], rng,
                                             fixed=seeds)])

        labels = None
        iteration = 0
        while iteration < self.max_iter:
            iteration += 1
            sims = X @ centers.T
            assigned = np.argmax(sims, axis=1)
            assigned[anchored] = anchors[anchored]
            self.__reseed_empty(assigned, sims, anchored, k)

            if labels is not None and np.array_equal(assigned, labels):
                break

            labels = assigned
            centers = _normalized_means(X, labels, centers)

        self.labels_ = labels
        self.cluster_centers_ = centers
        self.n_iter_ = iteration
        self.inertia_ = float(np.sum(1.0 - np.sum(X * centers[labels],
                                                  axis=1)))

        log.debug('Seeded k-means: K=%s n=%s iterations=%s', k, n, iteration)

        return self

    @staticmethod
    def __reseed_empty(assigned, sims, anchored, k):
        counts = np.bincount(assigned, minlength=k)

        for cluster in np.flatnonzero(counts == 0):
            movable = ~anchored & (counts[assigned] > 1)
            if not movable.any():
                log.warning('Cluster %s is empty and no point can move',
                            cluster)
                continue

            candidates = np.flatnonzero(movable)
            own = sims[candidates, assigned[candidates]]
            farthest = candidates[np.argmin(own)]

            log.warning('Cluster %s empty, re-seeded from point %s',
                        cluster, farthest)
            counts[assigned[farthest]] -= 1
            assigned[farthest] = cluster
            counts[cluster] = 1

    def predict(self, X):
        """ Nearest centroid by cosine similarity

        Args:
            X (np.ndarray): n x p unit-norm features

        Returns:
            np.ndarray: cluster index per row
        """
        return np.argmax(np.asarray(X, dtype=float) @ self.cluster_centers_.T,
                         axis=1)


def seeded_kmeans(features, n_clusters, rng, seeds=None, anchors=None,
                  max_iter=300):
    """
    Functional wrapper around SeededKMeans.

    Args:
        features: n x p unit-norm array
        n_clusters: K
        rng: numpy Generator, the 'kmeans' stream
        seeds: optional fixed centroids for clusters 0..m-1
        anchors: optional length-n ints, -1 for free rows
        max_iter: cap on Lloyd iterations

    Returns:
        1-d ndarray: assignments
        2-d ndarray: centroids
    """
    model = SeededKMeans(n_clusters, max_iter=max_iter,
                         random_state=rng).fit(features, seeds=seeds,
                                               anchors=anchors)

    return model.labels_, model.cluster_centers_
