"""Synchronized-driving simulator and controller library.

The heavy lifting lives in the compiled `_core` extension; this package
re-exports its public surface.
"""

from syncdrive._core import *  # noqa: F401,F403
from syncdrive._core import __doc__  # noqa: F401

__version__ = "0.1.0"
