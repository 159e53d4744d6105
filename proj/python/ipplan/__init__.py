"""Informative path planning: GP mutual-information rewards, Q-learning and classical planners."""

try:
    from ._ipplan import *  # noqa: F401,F403
    from ._ipplan import __doc__  # noqa: F401
except ImportError:
    from _ipplan import *  # noqa: F401,F403

SOLVERS = ("rl", "greedy", "ga", "rg", "brute")
