"""
SVG trend plots of the four accuracies against one swept axis.
"""
import logging

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402

log = logging.getLogger(__name__)

LABELS = {'all': 'Overall', 'known': 'Known', 'un1': 'Unknown-aware (Un1)',
          'un2': 'Unknown-agnostic (Un2)'}
AXIS_LABELS = {'rho': 'imbalance factor rho',
               'alpha': 'alpha (prior weight)',
               'beta': 'beta (uniform weight)',
               'lambda': 'lambda (SupCon weight)'}

# SVG user units are points, 72 to the inch
SVG_WIDTH = 800
SVG_HEIGHT = 600


def trend_plot(xs, series, axis, path):
    """
    Line plot, one series per metric, written as an SVG with an 800 x 600
    viewBox.

    Every line carries the SVG id 'series-<metric>'.  Missing points (None)
    are skipped.

    Args:
        xs: axis values
        series: dict metric -> list of means aligned with xs
        axis: axis name
        path: destination file
    """
    # Fixed hash salt and no date keep the SVG bytes reproducible
    with matplotlib.rc_context({'svg.hashsalt': 'ltgcd',
                                'svg.fonttype': 'none'}):
        fig, ax = plt.subplots(figsize=(SVG_WIDTH / 72, SVG_HEIGHT / 72))

        for metric, values in series.items():
            points = [(x, y) for x, y in zip(xs, values) if y is not None]
            if not points:
                continue
            px, py = zip(*points)
            line, = ax.plot(px, py, marker='o',
                            label=LABELS.get(metric, metric))
            line.set_gid('series-{}'.format(metric))

        ax.set_xticks(list(xs))
        ax.set_xlabel(AXIS_LABELS.get(axis, axis))
        ax.set_ylabel('clustering accuracy')
        ax.set_ylim(0, 1)
        ax.grid(True, alpha=0.3)
        ax.legend(loc='best')

        fig.savefig(path, format='svg', metadata={'Date': None})
        plt.close(fig)

    log.info('Wrote trend plot %s', path)
