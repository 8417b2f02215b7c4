"""Numerical Orlicz calculus and inequality verification harness."""

__version__ = "1.0.0"
