"""Exact stationary sampling by coupling from the past, plus the estimators
and learners built on it. Everything is implemented in the compiled
extension; this package only re-exports it."""

from ._cftp import *  # noqa: F401,F403
from ._cftp import __doc__  # noqa: F401
