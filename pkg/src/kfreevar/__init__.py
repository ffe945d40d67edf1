"""Verification toolkit for the variance of k-free numbers in arithmetic progressions."""

__version__ = "0.1.0"
