"""Sparse graphical-model identification for periodic reciprocal processes.

The heavy lifting lives in the `_rgm` extension module: block-circulant
algebra in the frequency (symbol) domain, maximum-entropy covariance
completion, and the regularized dual solver that estimates a sparse banded
concentration matrix from AR time-series data.
"""

from _rgm import *  # noqa: F401,F403
from _rgm import __doc__ as _core_doc  # noqa: F401
