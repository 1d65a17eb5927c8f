"""Exact engine for crowned diagrams of periodic chain complexes."""

__version__ = "0.1.0"
