"""Exact computations with frescos (regular (a,b)-modules of rank k)."""

__version__ = "0.1.0"
