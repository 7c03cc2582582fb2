"""Numerical toolkit for determinant n-norms, s-quasi-Cauchy sequences and ward continuity."""

__version__ = "0.1.0"
