"""Penning-trap laser cooling and axialization toolkit."""

__version__ = "1.0.0"
