"""Computable core of geometric valuation theory on polytopes and convex functions."""

__version__ = "0.1.0"
