"""Simulation-error system identification by controlled-multiplier optimization."""

__version__ = "0.1.0"
