"""Entropy-number experiments for tree operators and the critical Volterra kernel.

Thin layer over the compiled ``_core`` module. Nodes are ``(level, index)``
tuples and tree measures are ``{node: mass}`` dicts.
"""

from ._core import *  # noqa: F401,F403
from ._core import (
    BudgetError,
    CounterRng,
    DepthLimitError,
    InvariantViolation,
    QuadratureError,
)

__version__ = "0.1.0"


def delta(level, index, mass=1.0):
    """Point mass at one node."""
    return {(level, index): mass}
