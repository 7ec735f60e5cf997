"""Margolus-automaton diffusion: exact chain, closed form and simulation."""

from ._core import *  # noqa: F401,F403
from ._core import DomainError, Grid, RuleParams

__all__ = [name for name in dir() if not name.startswith("_")]
