"""Weighted signature kernels, expected-signature kernels against Wiener measure, and MMD tools."""

__version__ = "0.1.0"
