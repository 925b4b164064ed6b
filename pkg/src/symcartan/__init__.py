"""Exact symmetric Cartan calculus for affine connections on coordinate charts."""

__version__ = "0.1.0"
