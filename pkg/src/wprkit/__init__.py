"""Computational checks for weak pro-regularity, adic completion and derived completion."""

__version__ = "0.1.0"
