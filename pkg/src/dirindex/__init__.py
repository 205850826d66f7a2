"""Numerical toolkit for the L-index in a direction on the unit ball of C^n."""
__version__ = "0.1.0"
