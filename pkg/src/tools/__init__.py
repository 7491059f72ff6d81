"""Sweep, output and verification tools behind the penning-axial CLI."""
