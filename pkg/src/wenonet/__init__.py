"""Data-driven WENO3 face reconstruction and a 1D finite-volume benchmark harness."""

__version__ = "0.1.0"

from . import analysis, funcspace, ratnet, reconstruct, solver, train  # noqa: F401
