"""Exact mixed-integer programming with safe propagation and dual-proof conflicts."""

__version__ = "0.1.0"
