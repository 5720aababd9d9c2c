"""ltgcd is a desk-scale laboratory for long-tailed Generalized Category
Discovery on embedding data: a small projection head trained with instance
and supervised contrastive losses plus class-prior and uniform-distribution
regularizers, a moving-average class prior, and the All / Known /
unknown-aware / unknown-agnostic clustering accuracies.
"""

from setuptools import setup
from os import path

here = path.abspath(path.dirname(__file__))


# bring in __version__ and __name from version.py for install.
with open(path.join(here, 'ltgcd', 'version.py')) as h:
    exec(h.read())

setup(

    # __name is defined in version.py
    name=__name,

    # __version__ is defined in version.py
    version=__version__,

    description='Long-tailed generalized category discovery on embeddings',
    long_description=__doc__,
    license='Public Domain',

    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: Public Domain',
        'Programming Language :: Python :: 3',
    ],

    keywords='python category discovery contrastive long-tailed',

    packages=['ltgcd', 'ltgcd.models'],

    python_requires='>=3.8',

    install_requires=['numpy>=1.17.0',
                      'scipy>=1.4.0',
                      'scikit-learn>=0.24',
                      'matplotlib>=3.3'],

    extras_require={
        'test': ['flake8>=3.0.4',
                 'coverage>=4.2',
                 'pytest>=3.0.2',
                 'hypothesis>=5.0'],
        'dev': ['jupyter',
                'line_profiler'],
    },

    tests_require=['pytest>=3.0.2', 'hypothesis>=5.0'],

    entry_points={'console_scripts': ['ltgcd=ltgcd.cli:main', ], },
)
