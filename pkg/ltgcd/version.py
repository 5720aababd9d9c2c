""" Module specifically to hold algorithm version information.  The version
information is needed in both setup.py for install and in ltgcd/__init__.py
when generating run records.  If these values were defined in
ltgcd/__init__.py then install would fail because numpy, scipy and friends
are not present until after install. Do not import anything into this
module."""
__name = 'ltgcd-lab'

# The objective and its defaults carry their own version, reported with every
# run record, separate from the release version used for packaging.
__algorithm_version__ = '2026.10.19'

__algorithm__ = ':'.join([__name, __algorithm_version__])
__version__ = __algorithm_version__
