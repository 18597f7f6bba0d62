"""Finite-domain laboratory for quantified constraint satisfaction."""

__version__ = "0.1.0"
