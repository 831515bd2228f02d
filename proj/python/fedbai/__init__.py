"""Federated and peer-to-peer best-arm identification simulator."""

from ._fedbai import *  # noqa: F401,F403
from ._fedbai import FedbaiError, ProblemInstance

__all__ = [name for name in dir() if not name.startswith("_")]
