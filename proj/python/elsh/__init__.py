"""Entropy-probe nearest neighbor search.

Everything lives in the compiled extension; this package just re-exports it.
"""

from ._elsh import *  # noqa: F401,F403
from ._elsh import __version__  # noqa: F401
