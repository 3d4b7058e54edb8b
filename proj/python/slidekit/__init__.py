"""Sliding deformations, discrete energies and gradient flows on node lattices."""

from ._slidekit import *  # noqa: F401,F403
from ._slidekit import Error, Field, Grid, __doc__  # noqa: F401

__version__ = "0.1.0"
