"""Nonparanormal and forest density estimation for undirected graphs."""

__version__ = "0.1.0"
