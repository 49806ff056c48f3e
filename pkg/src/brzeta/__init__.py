"""Branched zeta values of decorated rooted forests."""

__version__ = "0.1.0"
