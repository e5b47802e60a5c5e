"""Exact computations for Noether-Lefschetz divisors on orthogonal modular varieties."""

__version__ = "0.1.0"
