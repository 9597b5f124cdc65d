"""Arithmetic structures in subsets of random sparse sets of Z_N."""
__version__ = "0.1.0"
