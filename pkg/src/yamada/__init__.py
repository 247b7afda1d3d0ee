"""Exact Yamada polynomials of spatial graph diagrams and root-density search."""

__version__ = "0.1.0"
