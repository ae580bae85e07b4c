"""Exact diagonalization and peripheral entanglement of XYZ spin-star networks."""

__version__ = "0.1.0"
