"""Exact Gram-matrix arithmetic and proof replay for double-cover branch data."""

__version__ = "0.1.0"
