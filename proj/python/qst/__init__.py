"""Quantum state transfer through XX spin chains.

Thin wrapper around the compiled ``_qst`` extension; energies and times are
in units of the bulk coupling J = 1.
"""

from ._qst import *  # noqa: F401,F403
from ._qst import QstError, __doc__  # noqa: F401
