"""Sheffer polynomials from Q(z)^x Q(-z)^(1-x): Riordan combinatorics and critical-line zeros."""

__version__ = "0.1.0"
TOOL_NAME = "riordan-critical"
