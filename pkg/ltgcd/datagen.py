"""
Long-tailed splits over embedding data.

Synthetic datasets are Gaussian mixtures: known classes are the head with
n_k samples each, unknown classes the tail with round(n_k / rho) each, and a
balanced labeled_fraction of every known class is labeled.  Externally
produced embeddings are read from a CSV + JSON manifest pair.

Labels of unlabeled rows are ground truth for evaluation only; training code
must never read them.
"""
import csv
import json
import logging
import os

import numpy as np

from ltgcd import app
from ltgcd.math_utils import round_half_up
from ltgcd.models import EmbeddingDataset, ViewPair

log = logging.getLogger(__name__)


def check_dataset(data):
    """
    Validate the dataset invariants.

    Args:
        data: EmbeddingDataset

    Raises:
        ValueError describing the first violation
    """
    known = set(data.known_classes)
    unknown = set(data.unknown_classes)

    if known & unknown:
        raise ValueError('known and unknown classes overlap: {}'
                         .format(sorted(known & unknown)))
    if known | unknown != set(range(data.num_classes)):
        raise ValueError('known and unknown classes do not cover 0..{}'
                         .format(data.num_classes - 1))
    if data.points.shape != (data.labels.size, data.dim):
        raise ValueError('points shape {} does not match n={} d={}'
                         .format(data.points.shape, data.labels.size,
                                 data.dim))
    if not np.all(np.isfinite(data.points)):
        raise ValueError('points contain non-finite values')
    if np.any(data.labels < 0) or np.any(data.labels >= data.num_classes):
        raise ValueError('class id outside [0, {})'.format(data.num_classes))

    labeled = data.labels[data.is_labeled]
    bad = set(labeled.tolist()) - known
    if bad:
        raise ValueError('labeled unknown class: {}'.format(sorted(bad)))

    missing = known - set(labeled.tolist())
    if missing:
        raise ValueError('known classes without labeled rows: {}'
                         .format(sorted(missing)))


def class_sizes(params):
    """
    Per-class sample counts of a split.

    Returns:
        int: n_k, samples per known class
        int: n_u, samples per unknown class
        int: labeled samples per known class
    """
    n_k = params.SAMPLES_PER_KNOWN
    n_u = round_half_up(n_k / params.RHO)
    n_lab = round_half_up(n_k * params.LABELED_FRACTION)

    if n_lab < 1:
        raise ValueError('labeled_fraction {} leaves no labeled row out of {}'
                         .format(params.LABELED_FRACTION, n_k))

    return n_k, n_u, n_lab


def generate_mixture(params, sep, rng):
    """
    Sample a long-tailed Gaussian mixture split.

    Class means lie uniformly on the sphere of radius sep, every class has
    unit isotropic covariance.  Known classes are 0..num_known-1.

    Args:
        params: Parameters with the split fields
        sep: radius of the class-mean sphere
        rng: numpy Generator, the 'split' stream

    Returns:
        EmbeddingDataset
    """
    app.check_split(params)
    if sep < 0:
        raise ValueError('sep must be nonnegative, got {}'.format(sep))

    n_classes = params.NUM_CLASSES
    dim = params.DIM
    n_k, n_u, n_lab = class_sizes(params)

    directions = rng.standard_normal((n_classes, dim))
    means = sep * directions / np.linalg.norm(directions, axis=1)[:, None]

    points, labels, flags = [], [], []
    for c in range(n_classes):
        known = c < params.NUM_KNOWN
        count = n_k if known else n_u

        points.append(means[c] + rng.standard_normal((count, dim)))
        labels.append(np.full(count, c))

        flag = np.zeros(count, dtype=bool)
        if known:
            flag[rng.choice(count, n_lab, replace=False)] = True
        flags.append(flag)

    data = EmbeddingDataset(points=np.vstack(points),
                            labels=np.concatenate(labels),
                            is_labeled=np.concatenate(flags),
                            known_classes=tuple(range(params.NUM_KNOWN)),
                            unknown_classes=tuple(range(params.NUM_KNOWN,
                                                        n_classes)),
                            num_classes=n_classes,
                            dim=dim)
    check_dataset(data)

    log.info('Generated mixture: C=%s known=%s n_k=%s n_u=%s labeled/class=%s '
             'rows=%s', n_classes, params.NUM_KNOWN, n_k, n_u, n_lab,
             data.labels.size)

    return data


def make_views(data, indices, noise_sigma, drop_prob, rng):
    """
    Two independently augmented views of the selected rows.

    Each view adds Gaussian noise to the point, then zeroes every coordinate
    independently with probability drop_prob.

    Args:
        data: EmbeddingDataset
        indices: row indices of the batch
        noise_sigma: standard deviation of the additive noise
        drop_prob: coordinate dropout probability, in [0, 1)
        rng: numpy Generator, the 'augment' stream

    Returns:
        ViewPair
    """
    if noise_sigma < 0:
        raise ValueError('noise_sigma must be nonnegative')
    if not 0 <= drop_prob < 1:
        raise ValueError('drop_prob must be in [0, 1)')

    indices = np.asarray(indices, dtype=int)
    rows = data.points[indices]

    def view():
        out = rows + noise_sigma * rng.standard_normal(rows.shape)
        out[rng.random(rows.shape) < drop_prob] = 0.0
        return out

    view_a = view()
    view_b = view()

    return ViewPair(view_a=view_a, view_b=view_b, source=indices)


def write_embeddings(data, manifest_path, data_path=None):
    """
    Write a dataset as CSV plus JSON manifest.

    Floats are written with repr so a reload is exact.

    Args:
        data: EmbeddingDataset
        manifest_path: destination of the manifest
        data_path: destination of the CSV, next to the manifest by default
    """
    if data_path is None:
        data_path = os.path.join(os.path.dirname(manifest_path) or '.',
                                 'data.csv')

    with open(data_path, 'w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(['id', 'label', 'is_labeled'] +
                        ['f{}'.format(i) for i in range(data.dim)])
        for i in range(data.labels.size):
            writer.writerow([i, int(data.labels[i]),
                             int(data.is_labeled[i])] +
                            [repr(float(v)) for v in data.points[i]])

    manifest = {'data': os.path.relpath(data_path,
                                        os.path.dirname(manifest_path) or '.'),
                'C': int(data.num_classes),
                'd': int(data.dim),
                'known_classes': [int(c) for c in data.known_classes]}

    with open(manifest_path, 'w') as handle:
        json.dump(manifest, handle, indent=1)

    log.info('Wrote %s rows to %s', data.labels.size, data_path)


def __parse_row(row, line, dim):
    if len(row) != dim + 3:
        raise ValueError('malformed row at line {}: expected {} fields, '
                         'got {}'.format(line, dim + 3, len(row)))
    try:
        label = int(row[1])
        flag = int(row[2])
        features = [float(v) for v in row[3:]]
    except ValueError:
        raise ValueError('malformed row at line {}: {}'.format(line, row))

    if flag not in (0, 1):
        raise ValueError('malformed row at line {}: is_labeled must be 0 or 1'
                         .format(line))

    return label, bool(flag), features


def load_embeddings(manifest_path):
    """
    Read a dataset described by a JSON manifest.

    Manifest: {"data": path, "C": int, "d": int, "known_classes": [ints]},
    the data path relative to the manifest.  CSV header:
    id,label,is_labeled,f0,...,f{d-1}.

    Args:
        manifest_path: location of the manifest

    Returns:
        EmbeddingDataset
    """
    if not os.path.isfile(manifest_path):
        raise FileNotFoundError('file not found: {}'.format(manifest_path))

    with open(manifest_path) as handle:
        try:
            manifest = json.load(handle)
            n_classes = int(manifest['C'])
            dim = int(manifest['d'])
            known = sorted(int(c) for c in manifest['known_classes'])
            data_path = os.path.join(os.path.dirname(manifest_path),
                                     manifest['data'])
        except (ValueError, KeyError, TypeError) as e:
            raise ValueError('malformed manifest {}: {}'
                             .format(manifest_path, e))

    if not os.path.isfile(data_path):
        raise FileNotFoundError('file not found: {}'.format(data_path))

    labels, flags, points = [], [], []
    with open(data_path, newline='') as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        expected = ['id', 'label', 'is_labeled'] + ['f{}'.format(i)
                                                    for i in range(dim)]
        if header != expected:
            raise ValueError('malformed header in {}'.format(data_path))

        for line, row in enumerate(reader, start=2):
            label, flag, features = __parse_row(row, line, dim)
            if not 0 <= label < n_classes:
                raise ValueError('class id {} >= C={} at line {}'
                                 .format(label, n_classes, line))
            labels.append(label)
            flags.append(flag)
            points.append(features)

    data = EmbeddingDataset(points=np.array(points, dtype=float).reshape(-1,
                                                                         dim),
                            labels=np.array(labels, dtype=int),
                            is_labeled=np.array(flags, dtype=bool),
                            known_classes=tuple(known),
                            unknown_classes=tuple(c for c in range(n_classes)
                                                  if c not in known),
                            num_classes=n_classes,
                            dim=dim)
    check_dataset(data)

    log.info('Loaded %s rows from %s', data.labels.size, data_path)

    return data
