"""Causal identification over acyclic directed mixed graphs."""

__version__ = "0.1.0"
