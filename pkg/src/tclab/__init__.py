"""Exact computations with tame Selmer groups and ray class groups."""

__version__ = "0.1.0"
