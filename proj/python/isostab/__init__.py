"""Numerical laboratory for approximate isometries of real Hilbert spaces.

The heavy lifting lives in the compiled extension; this package re-exports
its surface. Matrices and vectors cross the boundary as numpy arrays.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401
from ._core import __version__  # noqa: F401
