"""Solvers and exact counters for polynomial matrix equations with generic coefficients."""

__version__ = "0.1.0"
