import logging

from ltgcd import app
from ltgcd.datagen import generate_mixture
from ltgcd.procedures import train_one
from .version import __version__
from .version import __algorithm__ as algorithm
from .version import __name

log = logging.getLogger(__name)


def discover(data=None, params=None):
    """Entry point call to train and evaluate one model

    Without a dataset a synthetic long-tailed split is generated from the
    parameters and their seed.

    Args:
        data: optional EmbeddingDataset
        params: python dictionary to change module wide processing
            parameters

    Returns:
        dict run record, see ltgcd.procedures.train_one
    """
    proc_params = app.get_default_params()

    if params:
        proc_params.update(params)

    app.check_params(proc_params)

    if data is None:
        app.check_split(proc_params)
        data = generate_mixture(proc_params, proc_params.SEP,
                                app.derive_stream(proc_params.SEED, 'split'))

    log.debug('Discovering with %s on %s rows', algorithm, data.labels.size)

    return train_one(data, proc_params)
